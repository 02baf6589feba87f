#pragma once

#include <span>

namespace texret {

// Generalized Gaussian density p(x) = beta / (2 alpha Gamma(1/beta))
// * exp(-(|x|/alpha)^beta). beta = 2 is Gaussian, beta = 1 Laplacian.
struct GgdParams {
    double alpha = 1.0;  // scale
    double beta = 2.0;   // shape

    bool operator==(const GgdParams&) const = default;
};

// Clamping ranges for estimated parameters.
inline constexpr double kGgdAlphaMin = 1e-8;
inline constexpr double kGgdAlphaMax = 1e8;
inline constexpr double kGgdBetaMin = 0.05;
inline constexpr double kGgdBetaMax = 10.0;

enum class FitStatus {
    ok,
    clamped,       // moment ratio or root outside the beta search range
    degenerate,    // all-zero or constant samples; params substituted
    mme_fallback,  // MLE did not converge; MME result returned
};

struct GgdFit {
    GgdParams params;
    FitStatus status = FitStatus::ok;
};

// E|x|^2 moment ratio Gamma(2/b)^2 / (Gamma(1/b) Gamma(3/b)); strictly
// increasing in b on the supported range.
double mme_ratio(double beta);

// Moment-matching fit: solves mme_ratio(beta) = (mean|x|)^2 / mean(x^2)
// by bisection on [0.05, 10] to |d beta| < 1e-8. Degenerate samples are
// reported with substituted params (alpha = 1e-8, beta = 2).
GgdFit fit_mme(std::span<const double> samples);

// Maximum-likelihood fit: 1-D safeguarded Newton on the profile shape
// equation, initialized from MME, tolerance 1e-8 on beta; falls back to
// the MME result after 200 iterations without convergence.
GgdFit fit_mle(std::span<const double> samples);

// Mean log-likelihood is not needed; this is the total log-likelihood of
// the samples under the given params (used to compare estimators).
double ggd_log_likelihood(std::span<const double> samples, const GgdParams& p);

// Closed-form Kullback-Leibler divergence D(p || q) between two GGDs.
double kld_ggd(const GgdParams& p, const GgdParams& q);

// Symmetric divergence: kld_ggd(p, q) + kld_ggd(q, p).
double skld(const GgdParams& p, const GgdParams& q);

}  // namespace texret
