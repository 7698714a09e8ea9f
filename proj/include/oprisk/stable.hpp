#pragma once

#include <optional>
#include <span>
#include <vector>

#include "oprisk/rng.hpp"

namespace oprisk {

/*!
 * Four-parameter alpha-stable law in the continuous S(0) parameterization.
 *
 * alpha is the tail index in (0, 2], beta the skewness in [-1, 1], gamma the
 * scale (> 0) and delta the location in currency units. With `truncated` set
 * the support is restricted to x >= 0 by rejection at sample time.
 *
 * Location convention for the positive-support sub-family (alpha = 1/2,
 * beta = 1): delta is the support edge, i.e. the law with density
 * sqrt(gamma/2pi) (x-delta)^-3/2 exp(-gamma/(2(x-delta))) on (delta, inf).
 * All closed-form annual-loss machinery in this project builds on that
 * convention, and truncation is a no-op for it whenever delta >= 0.
 */
struct StableParams {
    double alpha;
    double beta;
    double gamma;
    double delta;
    bool truncated = false;

    StableParams(double alpha_, double beta_, double gamma_, double delta_,
                 bool truncated_ = false);
};

/// True when params denote the analytic positive-support member (alpha = 1/2,
/// beta = 1).
bool is_levy(const StableParams& params);

/// One draw from the law; truncated laws reject negative draws (capped at
/// 1e6 attempts).
double sample_stable(const StableParams& params, RngStream& rng);

// Density and distribution function of the positive-support sub-family with
// scale gamma and support edge delta. Total functions: zero at and below the
// edge.
double levy_pdf(double x, double gamma, double delta);
double levy_cdf(double x, double gamma, double delta);

/// Power-law tail approximation P(X > x) ~ gamma^alpha c_alpha (1+beta)
/// x^-alpha, valid as x -> inf. Rejects alpha = 2 (no power tail).
double stable_tail(double x, const StableParams& params);

/// Mean of the law: delta - beta gamma tan(pi alpha / 2) for alpha > 1;
/// nullopt marks the infinite-mean regime alpha <= 1.
std::optional<double> stable_mean(const StableParams& params);

/// Parameters of the sum of independent components sharing one alpha.
StableParams convolve_params(std::span<const StableParams> components);

/// Parameters of a*X + b (a != 0).
StableParams scale_shift_params(const StableParams& params, double a, double b);

} // namespace oprisk
