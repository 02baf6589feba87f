#include "texret/ggd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "texret/core.hpp"
#include "texret/specfun.hpp"

namespace texret {

namespace {

constexpr std::size_t kMinSamples = 16;
constexpr double kBetaTol = 1e-8;
constexpr int kMaxIterations = 200;

double clamp_alpha(double a) { return std::clamp(a, kGgdAlphaMin, kGgdAlphaMax); }

struct Moments {
    double m1 = 0.0;  // mean |x|
    double m2 = 0.0;  // mean x^2
    double min = 0.0;
    double max = 0.0;
};

Moments compute_moments(std::span<const double> samples) {
    Moments m;
    m.min = std::numeric_limits<double>::infinity();
    m.max = -m.min;
    for (double x : samples) {
        m.m1 += std::abs(x);
        m.m2 += x * x;
        m.min = std::min(m.min, x);
        m.max = std::max(m.max, x);
    }
    const double n = static_cast<double>(samples.size());
    m.m1 /= n;
    m.m2 /= n;
    return m;
}

void validate_samples(std::span<const double> samples) {
    if (samples.size() < kMinSamples) {
        throw Error(Error::Kind::config,
                    "GGD fit needs at least " + std::to_string(kMinSamples) +
                        " samples, got " + std::to_string(samples.size()));
    }
}

GgdFit degenerate_fit() { return {{kGgdAlphaMin, 2.0}, FitStatus::degenerate}; }

// Profile MLE pieces: with r_i = |x_i| / max|x|,
//   S0(b) = sum r_i^b,  S1(b) = sum r_i^b log r_i,
// the shape equation is
//   g(b) = 1 + psi(1/b)/b - S1/S0 - log_max + log((b/N) S0 m^b)/b = 0
// and alpha(b) = m ((b/N) S0)^(1/b). Scaling by m keeps the powers
// representable for b up to 10 on raw subband coefficients.
struct MleContext {
    std::vector<double> ratios;      // |x_i| / m for the nonzero samples
    std::vector<double> log_ratios;  // log of the above
    double log_m = 0.0;
    double n = 0.0;  // all samples, including zeros

    void sums(double beta, double& s0, double& s1) const {
        s0 = 0.0;
        s1 = 0.0;
        for (std::size_t i = 0; i < ratios.size(); ++i) {
            const double p = std::pow(ratios[i], beta);
            s0 += p;
            s1 += p * log_ratios[i];
        }
    }

    double g(double beta) const {
        double s0, s1;
        sums(beta, s0, s1);
        if (s0 <= 0.0) {
            return std::numeric_limits<double>::quiet_NaN();
        }
        const double inv_b = 1.0 / beta;
        return 1.0 + digamma(inv_b) * inv_b - (s1 / s0 + log_m) +
               (std::log(beta / n) + std::log(s0) + beta * log_m) * inv_b;
    }

    double alpha(double beta) const {
        double s0, s1;
        sums(beta, s0, s1);
        return std::exp(log_m + (std::log(beta / n) + std::log(s0)) / beta);
    }
};

MleContext make_context(std::span<const double> samples) {
    MleContext ctx;
    ctx.n = static_cast<double>(samples.size());
    double m = 0.0;
    for (double x : samples) {
        m = std::max(m, std::abs(x));
    }
    ctx.log_m = std::log(m);
    ctx.ratios.reserve(samples.size());
    for (double x : samples) {
        const double r = std::abs(x) / m;
        if (r > 0.0) {
            ctx.ratios.push_back(r);
            ctx.log_ratios.push_back(std::log(r));
        }
    }
    return ctx;
}

}  // namespace

double mme_ratio(double beta) {
    if (!(beta >= 0.01 && beta <= 50.0)) {
        throw Error(Error::Kind::config,
                    "mme_ratio defined for beta in [0.01, 50]");
    }
    return std::exp(2.0 * gamma_ln(2.0 / beta) - gamma_ln(1.0 / beta) -
                    gamma_ln(3.0 / beta));
}

GgdFit fit_mme(std::span<const double> samples) {
    validate_samples(samples);
    const Moments m = compute_moments(samples);
    if (m.m2 == 0.0 || m.min == m.max) {
        return degenerate_fit();
    }
    const double target = m.m1 * m.m1 / m.m2;
    FitStatus status = FitStatus::ok;
    double beta;
    if (target <= mme_ratio(kGgdBetaMin)) {
        beta = kGgdBetaMin;
        status = FitStatus::clamped;
    } else if (target >= mme_ratio(kGgdBetaMax)) {
        beta = kGgdBetaMax;
        status = FitStatus::clamped;
    } else {
        double lo = kGgdBetaMin, hi = kGgdBetaMax;
        while (hi - lo > kBetaTol) {
            const double mid = 0.5 * (lo + hi);
            (mme_ratio(mid) < target ? lo : hi) = mid;
        }
        beta = 0.5 * (lo + hi);
    }
    const double alpha =
        m.m1 * std::exp(gamma_ln(1.0 / beta) - gamma_ln(2.0 / beta));
    return {{clamp_alpha(alpha), beta}, status};
}

GgdFit fit_mle(std::span<const double> samples) {
    validate_samples(samples);
    const GgdFit init = fit_mme(samples);
    if (init.status == FitStatus::degenerate) {
        return init;
    }
    const MleContext ctx = make_context(samples);

    // Bracket a sign change of g around the MME estimate, expanding both
    // ends geometrically. No assumption about g's orientation.
    double lo = init.params.beta, hi = init.params.beta;
    double g_lo = ctx.g(lo), g_hi = g_lo;
    while (std::isfinite(g_lo) && std::isfinite(g_hi) &&
           (g_lo < 0.0) == (g_hi < 0.0) &&
           (lo > kGgdBetaMin || hi < kGgdBetaMax)) {
        lo = std::max(kGgdBetaMin, lo / 1.5);
        hi = std::min(kGgdBetaMax, hi * 1.5);
        g_lo = ctx.g(lo);
        g_hi = ctx.g(hi);
    }
    if (!std::isfinite(g_lo) || !std::isfinite(g_hi)) {
        return {init.params, FitStatus::mme_fallback};
    }
    if ((g_lo < 0.0) == (g_hi < 0.0)) {
        // No root inside the search range: clamp to the better endpoint.
        const double beta = std::abs(g_lo) < std::abs(g_hi) ? lo : hi;
        return {{clamp_alpha(ctx.alpha(beta)), beta}, FitStatus::clamped};
    }

    // Safeguarded Newton with numerical derivative; bisection whenever the
    // Newton step leaves the bracket.
    double beta = std::clamp(init.params.beta, lo, hi);
    for (int it = 0; it < kMaxIterations; ++it) {
        const double g = ctx.g(beta);
        if (std::isnan(g)) {
            return {init.params, FitStatus::mme_fallback};
        }
        if ((g < 0.0) == (g_lo < 0.0)) {
            lo = beta;
            g_lo = g;
        } else {
            hi = beta;
            g_hi = g;
        }
        const double h = 1e-6 * std::max(beta, 0.1);
        const double dg = (ctx.g(beta + h) - ctx.g(beta - h)) / (2.0 * h);
        double next = beta - g / dg;
        if (!std::isfinite(next) || next <= lo || next >= hi) {
            next = 0.5 * (lo + hi);
        }
        const double step = std::abs(next - beta);
        beta = next;
        if (step < kBetaTol || hi - lo < kBetaTol) {
            return {{clamp_alpha(ctx.alpha(beta)), beta}, FitStatus::ok};
        }
    }
    return {init.params, FitStatus::mme_fallback};
}

double ggd_log_likelihood(std::span<const double> samples, const GgdParams& p) {
    const double n = static_cast<double>(samples.size());
    double sum_pow = 0.0;
    for (double x : samples) {
        sum_pow += std::pow(std::abs(x) / p.alpha, p.beta);
    }
    return n * (std::log(p.beta) - std::log(2.0 * p.alpha) -
                gamma_ln(1.0 / p.beta)) -
           sum_pow;
}

double kld_ggd(const GgdParams& p, const GgdParams& q) {
    const double log_term = std::log(p.beta / q.beta) +
                            std::log(q.alpha / p.alpha) +
                            gamma_ln(1.0 / q.beta) - gamma_ln(1.0 / p.beta);
    const double cross = std::exp(q.beta * std::log(p.alpha / q.alpha) +
                                  gamma_ln((q.beta + 1.0) / p.beta) -
                                  gamma_ln(1.0 / p.beta));
    return log_term + cross - 1.0 / p.beta;
}

double skld(const GgdParams& p, const GgdParams& q) {
    return kld_ggd(p, q) + kld_ggd(q, p);
}

}  // namespace texret
