#pragma once

#include <cstdint>

namespace oprisk {

/// Tolerances for the self-contained error-function kernel.
struct SpecialFnTolerances {
    double erf_abs_tol = 1e-14;    // absolute error bound for erf/erfc
    double inv_bisect_tol = 1e-12; // absolute tolerance for erfc_inv

    void validate() const;
};

// Error function and complement, evaluated by rational (Chebyshev-minimax)
// approximations over three regions. Self-contained; absolute error below
// 1e-14 over the full double range.
double erf(double x);
double erfc(double x);

/// Inverse of erfc on (0, 2); bracketed bisection refined by Newton steps.
double erfc_inv(double y, double tol = 1e-12);

/// log(n!) for n >= 0.
double log_factorial(unsigned n);

/// Regularized incomplete beta I_x(a, b) by continued fraction.
double beta_reg(double a, double b, double x);

/// Quantile of Beta(a, b); a = +inf is read as the degenerate law at 1.
double beta_reg_inv(double a, double b, double p);

} // namespace oprisk
