#pragma once

namespace texret {

// log Gamma(x) for x > 0, Lanczos approximation (g = 7, 9 terms).
// Relative error below 1e-12 on the parameter ranges used by the GGD
// code (arguments in roughly [0.09, 250]). Self-contained so results
// are bit-stable across platforms and libm versions.
double gamma_ln(double x);

// Gamma(x) = exp(gamma_ln(x)) for x > 0.
double gamma_fn(double x);

// Digamma psi(x) for x > 0: recurrence up to x >= 10, then the
// asymptotic Bernoulli series through x^-12.
double digamma(double x);

}  // namespace texret
