#include "oprisk/stable.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "oprisk/special_functions.hpp"

namespace oprisk {

namespace {

constexpr double kPi = 3.141592653589793238462643383279;
constexpr double kAlphaOneEps = 1e-10; // |alpha - 1| below this uses the alpha = 1 branch
constexpr long kMaxTruncationAttempts = 1000000;

bool alpha_is_one(double alpha) {
    return std::fabs(alpha - 1.0) < kAlphaOneEps;
}

// Uniform on (-pi/2, pi/2), endpoints excluded.
double uniform_angle(RngStream& rng) {
    double u;
    do {
        u = rng.uniform01();
    } while (u == 0.0);
    return kPi * (u - 0.5);
}

// One untruncated draw.
double sample_raw(const StableParams& p, RngStream& rng) {
    if (p.alpha == 2.0) {
        // Gaussian member: variance 2 gamma^2, skewness immaterial.
        return p.delta + p.gamma * std::sqrt(2.0) * rng.normal01();
    }
    if (is_levy(p)) {
        // Positive-support member, support edge at delta: delta + gamma / N^2
        // with N standard normal.
        double z;
        do {
            z = rng.normal01();
        } while (z == 0.0);
        return p.delta + p.gamma / (z * z);
    }
    if (alpha_is_one(p.alpha)) {
        // Log-form branch of the Chambers-Mallows-Stuck construction.
        const double u = uniform_angle(rng);
        const double w = rng.exponential(1.0);
        const double half_pi = 0.5 * kPi;
        const double z = (1.0 / half_pi) *
                         ((half_pi + p.beta * u) * std::tan(u) -
                          p.beta * std::log((half_pi * w * std::cos(u)) / (half_pi + p.beta * u)));
        return p.gamma * z + p.delta;
    }
    // General Chambers-Mallows-Stuck draw, shifted into S(0).
    const double u = uniform_angle(rng);
    const double w = rng.exponential(1.0);
    const double tan_half = std::tan(0.5 * kPi * p.alpha);
    const double theta0 = std::atan(p.beta * tan_half) / p.alpha;
    const double at = p.alpha * (theta0 + u);
    const double z = std::sin(at) / std::pow(std::cos(p.alpha * theta0) * std::cos(u), 1.0 / p.alpha) *
                     std::pow(std::cos(at - u) / w, (1.0 - p.alpha) / p.alpha);
    return p.gamma * (z - p.beta * tan_half) + p.delta;
}

} // namespace

StableParams::StableParams(double alpha_, double beta_, double gamma_, double delta_,
                           bool truncated_)
    : alpha(alpha_), beta(beta_), gamma(gamma_), delta(delta_), truncated(truncated_) {
    if (!(alpha > 0.0) || !(alpha <= 2.0)) {
        throw std::invalid_argument("StableParams: alpha must lie in (0, 2]");
    }
    if (!(beta >= -1.0) || !(beta <= 1.0)) {
        throw std::invalid_argument("StableParams: beta must lie in [-1, 1]");
    }
    if (!(gamma > 0.0)) {
        throw std::invalid_argument("StableParams: gamma must be positive");
    }
    if (!std::isfinite(delta)) {
        throw std::invalid_argument("StableParams: delta must be finite");
    }
}

bool is_levy(const StableParams& params) {
    return std::fabs(params.alpha - 0.5) < kAlphaOneEps && std::fabs(params.beta - 1.0) < kAlphaOneEps;
}

double sample_stable(const StableParams& params, RngStream& rng) {
    if (!params.truncated || (is_levy(params) && params.delta >= 0.0)) {
        return sample_raw(params, rng);
    }
    for (long attempt = 0; attempt < kMaxTruncationAttempts; ++attempt) {
        const double x = sample_raw(params, rng);
        if (x >= 0.0) {
            return x;
        }
    }
    throw std::runtime_error("sample_stable: truncation mass too small");
}

double levy_pdf(double x, double gamma, double delta) {
    if (!(gamma > 0.0)) {
        throw std::invalid_argument("levy_pdf: gamma must be positive");
    }
    const double u = x - delta;
    if (!(u > 0.0)) {
        return 0.0;
    }
    // log-space evaluation so the edge (u -> 0) underflows to 0 instead of
    // producing inf * 0.
    const double log_pdf = 0.5 * std::log(gamma / (2.0 * kPi)) - 1.5 * std::log(u) - gamma / (2.0 * u);
    return log_pdf < -745.0 ? 0.0 : std::exp(log_pdf);
}

double levy_cdf(double x, double gamma, double delta) {
    if (!(gamma > 0.0)) {
        throw std::invalid_argument("levy_cdf: gamma must be positive");
    }
    const double u = x - delta;
    if (!(u > 0.0)) {
        return 0.0;
    }
    return erfc(std::sqrt(gamma / (2.0 * u)));
}

double stable_tail(double x, const StableParams& params) {
    if (params.alpha >= 2.0) {
        throw std::invalid_argument("stable_tail: power-law tail requires alpha < 2");
    }
    if (!(x > 0.0)) {
        throw std::invalid_argument("stable_tail: x must be positive");
    }
    const double c_alpha = std::sin(0.5 * kPi * params.alpha) * std::tgamma(params.alpha) / kPi;
    return std::pow(params.gamma, params.alpha) * c_alpha * (1.0 + params.beta) *
           std::pow(x, -params.alpha);
}

std::optional<double> stable_mean(const StableParams& params) {
    if (params.alpha <= 1.0) {
        return std::nullopt;
    }
    // tan(pi) is not exactly zero in floating point; pin the alpha = 2 case.
    const double tan_half = params.alpha == 2.0 ? 0.0 : std::tan(0.5 * kPi * params.alpha);
    return params.delta - params.beta * params.gamma * tan_half;
}

StableParams convolve_params(std::span<const StableParams> components) {
    if (components.empty()) {
        throw std::invalid_argument("convolve_params: component list is empty");
    }
    const double alpha = components.front().alpha;
    for (const auto& c : components) {
        if (c.alpha != alpha) {
            throw std::invalid_argument("convolve_params: components must share one alpha");
        }
    }

    double gamma_pow_sum = 0.0;  // sum |gamma_i|^alpha
    double beta_gamma_pow = 0.0; // sum beta_i |gamma_i|^alpha
    double delta_sum = 0.0;
    double beta_gamma = 0.0;     // sum beta_i gamma_i
    double beta_gamma_log = 0.0; // sum beta_i gamma_i log gamma_i
    for (const auto& c : components) {
        const double gp = std::pow(c.gamma, alpha);
        gamma_pow_sum += gp;
        beta_gamma_pow += c.beta * gp;
        delta_sum += c.delta;
        beta_gamma += c.beta * c.gamma;
        beta_gamma_log += c.beta * c.gamma * std::log(c.gamma);
    }

    const double gamma_tilde = std::pow(gamma_pow_sum, 1.0 / alpha);
    const double beta_tilde = beta_gamma_pow / gamma_pow_sum;
    double delta_tilde;
    if (alpha_is_one(alpha)) {
        delta_tilde = delta_sum + (2.0 / kPi) * (beta_tilde * gamma_tilde * std::log(gamma_tilde) -
                                                 beta_gamma_log);
    } else {
        delta_tilde = delta_sum +
                      std::tan(0.5 * kPi * alpha) * (beta_tilde * gamma_tilde - beta_gamma);
    }
    const bool truncated = components.front().truncated;
    return StableParams(alpha, beta_tilde, gamma_tilde, delta_tilde, truncated);
}

StableParams scale_shift_params(const StableParams& params, double a, double b) {
    if (a == 0.0) {
        throw std::invalid_argument("scale_shift_params: a must be non-zero");
    }
    const double sign_a = a > 0.0 ? 1.0 : -1.0;
    return StableParams(params.alpha, sign_a * params.beta, std::fabs(a) * params.gamma,
                        a * params.delta + b, params.truncated);
}

} // namespace oprisk
