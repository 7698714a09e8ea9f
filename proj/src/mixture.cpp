#include "oprisk/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "oprisk/special_functions.hpp"
#include "oprisk/stable.hpp"

namespace oprisk {

namespace {

constexpr double kPi = 3.141592653589793238462643383279;
// c_alpha at alpha = 1/2: sin(pi/4) Gamma(1/2) / pi = 1/sqrt(2 pi).
constexpr double kCHalf = 0.3989422804014326779399461;

double log_poisson_weight(double lambda, long n) {
    return -lambda + static_cast<double>(n) * std::log(lambda) -
           log_factorial(static_cast<unsigned>(n));
}

// Inclusive index range [lo, hi] of Poisson weights within rel_cutoff of the
// peak weight, scanned outward from the peak. n_min is 0 or 1 depending on
// whether the zero-count term belongs to the series.
struct WeightRange {
    long lo;
    long hi;
};

WeightRange poisson_weight_range(double lambda, long n_min, const TruncationRule& rule) {
    // Peak of lambda^n / n! over n >= n_min.
    long peak = std::max<long>(n_min, static_cast<long>(std::floor(lambda)));
    if (peak > rule.hard_cap) {
        throw std::runtime_error("series truncation failed: hard cap reached before cutoff");
    }
    const double log_cut = log_poisson_weight(lambda, peak) + std::log(rule.rel_cutoff);

    long lo = peak;
    while (lo > n_min && log_poisson_weight(lambda, lo - 1) >= log_cut) {
        --lo;
    }
    long hi = peak;
    while (hi < rule.hard_cap && log_poisson_weight(lambda, hi + 1) >= log_cut) {
        ++hi;
    }
    if (hi == rule.hard_cap && log_poisson_weight(lambda, hi) >= log_cut) {
        throw std::runtime_error("series truncation failed: hard cap reached before cutoff");
    }
    return {lo, hi};
}

void finalize(MixtureDist& dist) {
    double weight_sum = 0.0;
    dist.sum_order.resize(dist.terms.size());
    for (std::size_t i = 0; i < dist.terms.size(); ++i) {
        dist.sum_order[i] = i;
    }
    std::sort(dist.sum_order.begin(), dist.sum_order.end(),
              [&](std::size_t a, std::size_t b) { return dist.terms[a].weight < dist.terms[b].weight; });
    for (std::size_t i : dist.sum_order) {
        weight_sum += dist.terms[i].weight;
    }
    dist.tail_epsilon = std::max(0.0, 1.0 - dist.atom_at_zero - weight_sum);
}

void check_positive(double v, const char* name) {
    if (!(v > 0.0)) {
        throw std::invalid_argument(std::string("mixture: ") + name + " must be positive");
    }
}

double capped_moment_sum(const MixtureDist& dist, double tcl, int k) {
    double total = dist.lambda1 * levy_capped_moment(dist.gamma1, dist.delta1, tcl, k);
    if (dist.two_risk) {
        total += dist.lambda2 * levy_capped_moment(dist.gamma2, dist.delta2, tcl, k);
    }
    return total;
}

} // namespace

void TruncationRule::validate() const {
    if (!(rel_cutoff > 0.0) || !(rel_cutoff < 1.0)) {
        throw std::invalid_argument("TruncationRule: rel_cutoff must lie in (0, 1)");
    }
    if (hard_cap < 1) {
        throw std::invalid_argument("TruncationRule: hard_cap must be >= 1");
    }
}

long w_series_peak(double lambda) {
    check_positive(lambda, "lambda");
    // W_{n+1} / W_n = lambda (n+1) / n^2; climb while strictly increasing.
    long n = 1;
    while (lambda * static_cast<double>(n + 1) > static_cast<double>(n) * static_cast<double>(n)) {
        ++n;
    }
    return n;
}

MixtureDist build_mixture(double lambda, double gamma, double delta, const TruncationRule& rule) {
    check_positive(lambda, "lambda");
    check_positive(gamma, "gamma");
    rule.validate();

    MixtureDist dist;
    dist.lambda1 = lambda;
    dist.gamma1 = gamma;
    dist.delta1 = delta;
    dist.atom_at_zero = std::exp(-lambda);
    dist.peak_index = w_series_peak(lambda);

    const WeightRange range = poisson_weight_range(lambda, 1, rule);
    dist.n_lower = range.lo;
    dist.n_upper = range.hi;
    dist.terms.reserve(static_cast<std::size_t>(range.hi - range.lo + 1));
    for (long n = range.lo; n <= range.hi; ++n) {
        MixtureTerm term;
        term.n = n;
        const double dn = static_cast<double>(n);
        term.weight = std::exp(log_poisson_weight(lambda, n));
        term.gamma_tilde = dn * dn * gamma;
        // tan(pi/4) = 1 in the location correction.
        term.delta_tilde = dn * delta + (term.gamma_tilde - dn * gamma);
        term.edge = dn * delta;
        dist.terms.push_back(term);
    }
    finalize(dist);
    return dist;
}

MixtureDist build_mixture_two_risks(double lambda1, double gamma1, double delta1, double lambda2,
                                    double gamma2, double delta2, const TruncationRule& rule) {
    check_positive(lambda1, "lambda1");
    check_positive(gamma1, "gamma1");
    check_positive(lambda2, "lambda2");
    check_positive(gamma2, "gamma2");
    rule.validate();

    MixtureDist dist;
    dist.two_risk = true;
    dist.lambda1 = lambda1;
    dist.gamma1 = gamma1;
    dist.delta1 = delta1;
    dist.lambda2 = lambda2;
    dist.gamma2 = gamma2;
    dist.delta2 = delta2;
    dist.atom_at_zero = std::exp(-lambda1 - lambda2);
    dist.peak_index = w_series_peak(lambda1 + lambda2);

    // Product Poisson weights truncated by the same relative rule: keep
    // (n, m) != (0, 0) with w_n w_m >= rel_cutoff * peak product. The
    // single-margin ranges below the cutoff already bound the grid.
    const WeightRange r1 = poisson_weight_range(lambda1, 0, rule);
    const WeightRange r2 = poisson_weight_range(lambda2, 0, rule);
    const double log_peak =
        log_poisson_weight(lambda1, std::max<long>(0, static_cast<long>(std::floor(lambda1)))) +
        log_poisson_weight(lambda2, std::max<long>(0, static_cast<long>(std::floor(lambda2))));
    const double log_cut = log_peak + std::log(rule.rel_cutoff);

    dist.n_lower = r1.lo;
    dist.n_upper = r1.hi;
    const double sqrt_g1 = std::sqrt(gamma1);
    const double sqrt_g2 = std::sqrt(gamma2);
    for (long n = r1.lo; n <= r1.hi; ++n) {
        const double lw1 = log_poisson_weight(lambda1, n);
        for (long m = r2.lo; m <= r2.hi; ++m) {
            if (n == 0 && m == 0) {
                continue; // the atom
            }
            const double lw = lw1 + log_poisson_weight(lambda2, m);
            if (lw < log_cut) {
                continue;
            }
            MixtureTerm term;
            term.n = n;
            term.m = m;
            term.weight = std::exp(lw);
            const double dn = static_cast<double>(n);
            const double dm = static_cast<double>(m);
            const double root = dn * sqrt_g1 + dm * sqrt_g2;
            term.gamma_tilde = root * root;
            term.edge = dn * delta1 + dm * delta2;
            term.delta_tilde = term.edge + (term.gamma_tilde - dn * gamma1 - dm * gamma2);
            dist.terms.push_back(term);
        }
    }
    if (dist.terms.empty()) {
        throw std::runtime_error("series truncation failed: no terms retained");
    }
    finalize(dist);
    return dist;
}

MixtureDist build_mixture_ilp_retained(double lambda, double gamma, double delta, double tcl,
                                       const TruncationRule& rule) {
    if (!(tcl >= 0.0)) {
        throw std::invalid_argument("build_mixture_ilp_retained: tcl must be >= 0");
    }
    if (tcl > delta) {
        throw std::invalid_argument(
            "build_mixture_ilp_retained: no closed form when the cap cuts into the support "
            "(tcl > delta); simulate instead");
    }
    return build_mixture(lambda, gamma, delta - tcl, rule);
}

double mixture_pdf(const MixtureDist& dist, double z) {
    if (!(z >= 0.0)) {
        return 0.0;
    }
    double density = 0.0;
    for (std::size_t i : dist.sum_order) {
        const MixtureTerm& t = dist.terms[i];
        density += t.weight * levy_pdf(z, t.gamma_tilde, t.edge);
    }
    return density;
}

double mixture_cdf(const MixtureDist& dist, double z) {
    if (z < 0.0) {
        return 0.0;
    }
    double p = 0.0;
    for (std::size_t i : dist.sum_order) {
        const MixtureTerm& t = dist.terms[i];
        p += t.weight * levy_cdf(z, t.gamma_tilde, t.edge);
    }
    return p + dist.atom_at_zero;
}

double mixture_quantile(const MixtureDist& dist, double q) {
    if (!(q > dist.atom_at_zero)) {
        throw std::runtime_error("mixture_quantile: quantile inside zero atom");
    }
    if (!(q < 1.0 - dist.tail_epsilon)) {
        throw std::runtime_error("mixture_quantile: quantile beyond truncated mass");
    }

    double lo = 0.0;
    double hi = std::max(1.0, dist.terms.front().edge + dist.terms.front().gamma_tilde);
    while (mixture_cdf(dist, hi) < q) {
        hi *= 2.0;
        if (hi > 1e300) {
            throw std::runtime_error("mixture_quantile: bracket expansion failed");
        }
    }
    for (int i = 0; i < 200 && (hi - lo) > 1e-9 * std::max(1.0, hi); ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mixture_cdf(dist, mid) < q) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

MedianSeries mixture_median_series(const MixtureDist& dist, const TruncationRule& rule) {
    if (dist.two_risk) {
        throw std::invalid_argument("mixture_median_series: single-risk distributions only");
    }
    rule.validate();
    const double lambda = dist.lambda1;

    // W_n = lambda^n n^2 / n!, truncated by the same relative rule around the
    // W peak.
    const long peak = w_series_peak(lambda);
    auto log_w = [lambda](long n) {
        const double dn = static_cast<double>(n);
        return log_poisson_weight(lambda, n) + lambda + 2.0 * std::log(dn);
    };
    const double log_cut = log_w(peak) + std::log(rule.rel_cutoff);

    MedianSeries series;
    long lo = peak;
    while (lo > 1 && log_w(lo - 1) >= log_cut) {
        --lo;
    }
    long hi = peak;
    while (hi < rule.hard_cap && log_w(hi + 1) >= log_cut) {
        ++hi;
    }
    series.n_lower = lo;
    series.n_upper = hi;

    const double inv_half = erfc_inv(0.5);
    const double constant =
        0.5 * std::exp(-lambda) * inv_half * inv_half * std::fabs(dist.gamma1);
    double w_sum = 0.0;
    series.contributions.reserve(static_cast<std::size_t>(hi - lo + 1));
    for (long n = lo; n <= hi; ++n) {
        const double w = std::exp(log_w(n));
        series.contributions.push_back(w);
        w_sum += w;
    }
    series.value = constant * w_sum;
    return series;
}

double tail_series_diagnostic(const MixtureDist& dist, double z) {
    if (dist.two_risk) {
        throw std::invalid_argument("tail_series_diagnostic: single-risk distributions only");
    }
    if (!(z > 0.0)) {
        throw std::invalid_argument("tail_series_diagnostic: z must be positive");
    }
    double series = 0.0;
    for (const MixtureTerm& t : dist.terms) {
        series += t.weight * std::sqrt(t.gamma_tilde);
    }
    // weights already carry exp(-lambda).
    return std::pow(z, -1.5) * kCHalf * series;
}

double levy_partial_moment(double gamma, double delta, double tcl, int k) {
    check_positive(gamma, "gamma");
    if (k != 1 && k != 2) {
        throw std::invalid_argument("levy_partial_moment: k must be 1 or 2");
    }
    const double y = tcl - delta;
    if (!(y > 0.0)) {
        return 0.0;
    }
    const double root = std::sqrt(gamma / (2.0 * y));
    const double tail = erfc(root);                       // P(X <= tcl) for the shifted law
    const double gauss = std::exp(-gamma / (2.0 * y));    // exp(-gamma/2y)
    const double m1_zero = std::sqrt(2.0 * gamma * y / kPi) * gauss - gamma * tail;
    if (k == 1) {
        return m1_zero + delta * tail;
    }
    const double m2_zero =
        std::sqrt(2.0 * gamma * y / kPi) * (y - gamma) * gauss / 3.0 + gamma * gamma * tail / 3.0;
    return m2_zero + 2.0 * delta * m1_zero + delta * delta * tail;
}

double levy_capped_moment(double gamma, double delta, double tcl, int k) {
    check_positive(gamma, "gamma");
    if (k != 1 && k != 2) {
        throw std::invalid_argument("levy_capped_moment: k must be 1 or 2");
    }
    if (!(tcl > 0.0)) {
        return 0.0;
    }
    if (tcl <= delta) {
        // Support starts at delta >= tcl: every loss is capped.
        return k == 1 ? tcl : tcl * tcl;
    }
    const double exceed = 1.0 - levy_cdf(tcl, gamma, delta);
    const double cap = k == 1 ? tcl : tcl * tcl;
    return levy_partial_moment(gamma, delta, tcl, k) + cap * exceed;
}

double analytic_expected_claim(const MixtureDist& dist, double tcl) {
    if (!(tcl >= 0.0)) {
        throw std::invalid_argument("analytic_expected_claim: tcl must be >= 0");
    }
    if (tcl == 0.0) {
        return 0.0;
    }
    return capped_moment_sum(dist, tcl, 1);
}

double analytic_scr(const MixtureDist& dist, double tcl) {
    const double expected = analytic_expected_claim(dist, tcl);
    const double variance = tcl == 0.0 ? 0.0 : capped_moment_sum(dist, tcl, 2);
    if (variance < 0.0) {
        std::ostringstream msg;
        msg << "analytic_scr: negative claim variance " << variance << " (expected claim "
            << expected << ")";
        throw std::runtime_error(msg.str());
    }
    return expected + 3.0 * std::sqrt(variance);
}

double analytic_es_mcr(const MixtureDist& dist, double tcl, double var_q) {
    if (!(var_q < tcl)) {
        throw std::invalid_argument("analytic_es_mcr: var_q must be below tcl");
    }
    if (!(var_q >= 0.0)) {
        throw std::invalid_argument("analytic_es_mcr: var_q must be >= 0");
    }
    const double denom = 1.0 - mixture_cdf(dist, var_q);
    if (!(denom > 0.0)) {
        throw std::runtime_error("analytic_es_mcr: no mass beyond var_q");
    }
    const double bracket =
        (2.0 / 3.0) * (std::pow(tcl, 1.5) - std::pow(var_q, 1.5));
    double series = 0.0;
    for (std::size_t i : dist.sum_order) {
        const MixtureTerm& t = dist.terms[i];
        series += t.weight * std::sqrt(t.gamma_tilde) * 2.0 * kCHalf * bracket;
    }
    return series / denom;
}

double analytic_es_mcr_tail(const MixtureDist& dist, double tcl, double var_q) {
    if (!(var_q < tcl)) {
        throw std::invalid_argument("analytic_es_mcr_tail: var_q must be below tcl");
    }
    if (!(var_q > 0.0)) {
        throw std::invalid_argument("analytic_es_mcr_tail: var_q must be positive");
    }
    const double denom = 1.0 - mixture_cdf(dist, var_q);
    if (!(denom > 0.0)) {
        throw std::runtime_error("analytic_es_mcr_tail: no mass beyond var_q");
    }
    // Component tail density ~ sqrt(gamma_n) c_1/2 x^-3/2, so the integral of
    // x f(x) over (var_q, tcl] is 2 sqrt(gamma_n) c_1/2 (sqrt(tcl) -
    // sqrt(var_q)) and the mass beyond tcl contributes tcl * survival(tcl).
    const double kernel = 2.0 * (std::sqrt(tcl) - std::sqrt(var_q)) + 2.0 * std::sqrt(tcl);
    double series = 0.0;
    for (std::size_t i : dist.sum_order) {
        const MixtureTerm& t = dist.terms[i];
        series += t.weight * std::sqrt(t.gamma_tilde) * kCHalf * kernel;
    }
    return series / denom;
}

} // namespace oprisk
