#pragma once

// Test-only oracles, independent of the library implementation paths they
// check: a portable RNG, a GGD sampler, an adaptive quadrature rule, a
// naive 2-D DFT, and small helpers for building fixtures.

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "texret/core.hpp"

namespace oracle {

// Deterministic uniform/normal source; mt19937_64 mapped to doubles the
// same way on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do {
            u1 = unit();
        } while (u1 <= 0.0);
        const double u2 = unit();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * M_PI * u2);
        have_spare_ = true;
        return r * std::cos(2.0 * M_PI * u2);
    }

    std::uint64_t raw() { return eng_(); }

private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Marsaglia-Tsang gamma sampler, shape a > 0, scale 1.
inline double gamma_draw(Rng& rng, double a) {
    if (a < 1.0) {
        const double u = rng.unit();
        return gamma_draw(rng, a + 1.0) * std::pow(u, 1.0 / a);
    }
    const double d = a - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    while (true) {
        double x, v;
        do {
            x = rng.normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.unit();
        if (u < 1.0 - 0.0331 * x * x * x * x) {
            return d * v;
        }
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
            return d * v;
        }
    }
}

// GGD sampling via x = s * alpha * G^(1/beta), G ~ Gamma(1/beta, 1),
// s = +-1 equiprobable.
inline std::vector<double> ggd_draws(std::uint64_t seed, double alpha,
                                     double beta, std::size_t n) {
    Rng rng(seed);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double g = gamma_draw(rng, 1.0 / beta);
        const double mag = alpha * std::pow(g, 1.0 / beta);
        out[i] = (rng.unit() < 0.5) ? -mag : mag;
    }
    return out;
}

inline double ggd_log_pdf(double x, double alpha, double beta) {
    return std::log(beta / (2.0 * alpha)) - std::lgamma(1.0 / beta) -
           std::pow(std::abs(x) / alpha, beta);
}

inline double ggd_pdf(double x, double alpha, double beta) {
    return std::exp(ggd_log_pdf(x, alpha, beta));
}

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on P_n.
struct GaussLegendre {
    std::vector<double> nodes, weights;

    explicit GaussLegendre(int n) : nodes(n), weights(n) {
        for (int i = 0; i < (n + 1) / 2; ++i) {
            double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = x;
                for (int k = 2; k <= n; ++k) {
                    const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-15) {
                    break;
                }
            }
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
    }
};

// KL divergence between two GGDs by quadrature (independent of the
// closed form under test): composite 40-point Gauss-Legendre over
// geometric panels, log-domain integrand, compensated summation.
inline double kld_quadrature(double ap, double bp, double aq, double bq) {
    static const GaussLegendre rule(40);
    auto integrand = [&](double x) {
        const double lp = ggd_log_pdf(x, ap, bp);
        return std::exp(lp) * (lp - ggd_log_pdf(x, aq, bq));
    };
    // Integrate 2 * int_0^T; T truncates where p is ~1e-35 of its peak.
    const double tail = ap * std::pow(80.0, 1.0 / bp);
    long double sum = 0.0L;
    double lo = 0.0;
    double hi = 1e-8 * ap;
    while (lo < tail) {
        const double mid = 0.5 * (hi + lo), half = 0.5 * (hi - lo);
        long double panel = 0.0L;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            panel += static_cast<long double>(rule.weights[i]) *
                     integrand(mid + half * rule.nodes[i]);
        }
        sum += panel * half;
        lo = hi;
        hi = std::min(tail, hi * 1.35);
    }
    return 2.0 * static_cast<double>(sum);
}

// Naive O(n^2) 2-D DFT for cross-checking the FFT wrapper on small sizes.
inline std::vector<std::complex<double>> naive_dft2d(const texret::Matrix& in) {
    const std::size_t H = in.rows, W = in.cols;
    std::vector<std::complex<double>> out(H * W);
    for (std::size_t u = 0; u < H; ++u) {
        for (std::size_t v = 0; v < W; ++v) {
            std::complex<double> acc(0.0, 0.0);
            for (std::size_t r = 0; r < H; ++r) {
                for (std::size_t c = 0; c < W; ++c) {
                    const double phase =
                        -2.0 * M_PI *
                        (static_cast<double>(u * r) / static_cast<double>(H) +
                         static_cast<double>(v * c) / static_cast<double>(W));
                    acc += in.at(r, c) *
                           std::complex<double>(std::cos(phase), std::sin(phase));
                }
            }
            out[u * W + v] = acc;
        }
    }
    return out;
}

inline texret::Matrix random_matrix(std::size_t rows, std::size_t cols,
                                    std::uint64_t seed, double lo = 0.0,
                                    double hi = 255.0) {
    Rng rng(seed);
    texret::Matrix m(rows, cols);
    for (double& v : m.data) {
        v = rng.uniform(lo, hi);
    }
    return m;
}

}  // namespace oracle
