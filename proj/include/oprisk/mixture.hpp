#pragma once

#include <cstdint>
#include <vector>

namespace oprisk {

/// Relative-weight truncation of the infinite Poisson mixture: keep terms
/// whose weight is at least rel_cutoff times the peak weight.
struct TruncationRule {
    double rel_cutoff = 8.533047625744066e-17; // exp(-37)
    long hard_cap = 10000;

    void validate() const;
};

/// One mixture component. n (and m for the two-risk grid) are the Poisson
/// indices; delta_tilde is the S(0) location from the convolution algebra
/// while edge is the support edge the component density actually starts at.
struct MixtureTerm {
    long n = 0;
    long m = 0;
    double weight = 0.0;
    double gamma_tilde = 0.0;
    double delta_tilde = 0.0;
    double edge = 0.0;
};

/*!
 * Truncated Poisson mixture of positive-support stable components: the exact
 * annual-loss law of a compound Poisson process with severity scale gamma
 * and support edge delta (one or two independent risk cells).
 *
 * The distribution has an atom of exp(-lambda_total) at zero and, above it,
 * component n with scale n^2 gamma starting at n delta. Weights are computed
 * in log space and summed smallest-first.
 */
struct MixtureDist {
    double lambda1 = 0.0;
    double gamma1 = 0.0;
    double delta1 = 0.0;
    bool two_risk = false;
    double lambda2 = 0.0;
    double gamma2 = 0.0;
    double delta2 = 0.0;

    double atom_at_zero = 0.0;
    long n_lower = 0;
    long n_upper = 0;
    long peak_index = 0;    // argmax of the W_n = lambda^n n^2 / n! series
    double tail_epsilon = 0.0; // Poisson mass outside the kept terms

    std::vector<MixtureTerm> terms;      // ascending component index
    std::vector<std::size_t> sum_order;  // term indices, ascending weight

    double lambda_total() const { return two_risk ? lambda1 + lambda2 : lambda1; }
};

/// Index of the largest W_n = lambda^n n^2 / n! (first index on ties).
long w_series_peak(double lambda);

// Poisson mixing weights only; a Binomial or Negative-Binomial frequency
// would swap the weight sequence here and leave the components untouched.
MixtureDist build_mixture(double lambda, double gamma, double delta,
                          const TruncationRule& rule = {});

MixtureDist build_mixture_two_risks(double lambda1, double gamma1, double delta1,
                                    double lambda2, double gamma2, double delta2,
                                    const TruncationRule& rule = {});

/// Annual-loss law of the retained (per-event-capped) process when the
/// severity support edge clears the cap (delta >= tcl): every loss shifts
/// down by tcl, so the mixture shifts component-wise. Below the edge no
/// closed form exists; callers must simulate instead.
MixtureDist build_mixture_ilp_retained(double lambda, double gamma, double delta, double tcl,
                                       const TruncationRule& rule = {});

/// Continuous density of the positive part; the atom at zero is not a
/// density and is reported separately in the distribution object.
double mixture_pdf(const MixtureDist& dist, double z);

/// Right-continuous distribution function; jumps by the atom at z = 0.
double mixture_cdf(const MixtureDist& dist, double z);

/// z with cdf(z) = q, bisected to 1e-9 relative. q must exceed the atom and
/// stay below the retained mass 1 - tail_epsilon.
double mixture_quantile(const MixtureDist& dist, double q);

/// Median-contribution diagnostic series C_mu * sum W_n with
/// W_n = lambda^n n^2 / n! and C_mu = (1/2) e^-lambda erfc_inv(1/2)^2 gamma.
/// A weighted mix of per-component median-scale constants, not the
/// distributional median (use mixture_quantile(dist, 0.5) for that); its
/// value is a truncation-quality diagnostic.
struct MedianSeries {
    double value = 0.0;
    long n_lower = 0;
    long n_upper = 0;
    std::vector<double> contributions; // W_n for n in [n_lower, n_upper]
};
MedianSeries mixture_median_series(const MixtureDist& dist,
                                   const TruncationRule& rule = {});

/// Tail diagnostic series z^-1.5 e^-lambda c_1/2 sum (lambda^n/n!) sqrt(gamma_n).
/// The z-exponent matches the component densities rather than their survival
/// functions (which decay like z^-1/2), so this is a diagnostic only.
double tail_series_diagnostic(const MixtureDist& dist, double z);

// --- Closed-form claims analytics (per-event cap at tcl) ---

/// Partial moment integral_delta^tcl x^k levy_pdf(x; gamma, delta) dx for
/// k in {1, 2}; closed form via the error-function antiderivatives.
double levy_partial_moment(double gamma, double delta, double tcl, int k);

/// E[min(X, tcl)^k] for the positive-support law (k in {1, 2}).
double levy_capped_moment(double gamma, double delta, double tcl, int k);

/// Expected annual claims under a per-event cover limit: lambda E[min(X, tcl)]
/// summed over the model's risk cells.
double analytic_expected_claim(const MixtureDist& dist, double tcl);

/// Insurer solvency capital: expected annual claims plus three standard
/// deviations, with Var = lambda E[min(X, tcl)^2] per cell.
double analytic_scr(const MixtureDist& dist, double tcl);

/// Tail expected-shortfall series with the cubic-growth kernel
/// (2/3)(tcl^1.5 - var_q^1.5) per component. Kept in this form for
/// comparability; analytic_es_mcr_tail is the variant consistent with the
/// power-law tail density and is the one that tracks simulation.
double analytic_es_mcr(const MixtureDist& dist, double tcl, double var_q);

/// Tail-asymptotic estimate of E[min(Z, tcl) | Z > var_q]: power-law tail
/// density integrated over (var_q, tcl] plus the capped mass beyond tcl,
/// normalised by the exact survival probability at var_q.
double analytic_es_mcr_tail(const MixtureDist& dist, double tcl, double var_q);

} // namespace oprisk
