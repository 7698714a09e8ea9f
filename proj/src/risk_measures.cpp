#include "oprisk/risk_measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "oprisk/mixture.hpp"

namespace oprisk {

namespace {

// ceil(q n) with a guard against q n landing a hair above an integer.
std::size_t order_statistic_rank(double q, std::size_t n) {
    const double target = q * static_cast<double>(n);
    auto rank = static_cast<std::size_t>(std::ceil(target - 1e-9));
    if (rank < 1) {
        rank = 1;
    }
    if (rank > n) {
        rank = n;
    }
    return rank;
}

void require_quantile(double q) {
    if (!(q > 0.0) || !(q < 1.0)) {
        throw std::invalid_argument("risk measure: quantile must lie in (0, 1)");
    }
}

} // namespace

double empirical_var(std::span<const double> sample, double q) {
    require_quantile(q);
    if (sample.empty()) {
        throw std::invalid_argument("empirical_var: empty sample");
    }
    std::vector<double> sorted(sample.begin(), sample.end());
    const std::size_t rank = order_statistic_rank(q, sorted.size());
    auto nth = sorted.begin() + static_cast<std::ptrdiff_t>(rank - 1);
    std::nth_element(sorted.begin(), nth, sorted.end());
    return *nth;
}

double empirical_es(std::span<const double> sample, double q) {
    const double threshold = empirical_var(sample, q);
    double total = 0.0;
    std::size_t count = 0;
    for (double v : sample) {
        if (v >= threshold) {
            total += v;
            ++count;
        }
    }
    if (count == 0) {
        throw std::runtime_error("empirical_es: no exceedances");
    }
    return total / static_cast<double>(count);
}

double empirical_scr(std::span<const double> claims) {
    if (claims.size() < 2) {
        throw std::invalid_argument("empirical_scr: need at least two observations");
    }
    double mean = 0.0;
    for (double v : claims) {
        mean += v;
    }
    mean /= static_cast<double>(claims.size());
    double ss = 0.0;
    for (double v : claims) {
        const double d = v - mean;
        ss += d * d;
    }
    const double sd = std::sqrt(ss / static_cast<double>(claims.size() - 1));
    return mean + 3.0 * sd;
}

double mcr(std::span<const double> claims, double q, McrMeasure measure) {
    return measure == McrMeasure::kVar ? empirical_var(claims, q) : empirical_es(claims, q);
}

ComparativeMetrics comparative_metrics(double gross_var, std::span<const double> mitigated,
                                       std::span<const double> claims, double q) {
    if (!(gross_var > 0.0)) {
        throw std::invalid_argument("comparative_metrics: gross VaR must be positive");
    }
    ComparativeMetrics out;
    out.pct_var = empirical_var(mitigated, q) / gross_var;
    out.pct_var_mit = 1.0 - out.pct_var;
    out.pct_mcr = empirical_var(claims, q) / gross_var;
    return out;
}

double fair_premium(std::span<const double> claims, double loading) {
    if (!(loading >= 0.0)) {
        throw std::invalid_argument("fair_premium: loading must be >= 0");
    }
    if (claims.empty()) {
        throw std::invalid_argument("fair_premium: empty claims sample");
    }
    double mean = 0.0;
    for (double v : claims) {
        mean += v;
    }
    mean /= static_cast<double>(claims.size());
    return mean * (1.0 + loading);
}

double basel_cap(double gross_var, double mitigated_var) {
    if (!(gross_var >= 0.0) || !(mitigated_var >= 0.0)) {
        throw std::invalid_argument("basel_cap: inputs must be >= 0");
    }
    return std::max(mitigated_var, 0.8 * gross_var);
}

double fair_premium_analytic(const MixtureDist& dist, double tcl, double loading) {
    if (!(loading >= 0.0)) {
        throw std::invalid_argument("fair_premium_analytic: loading must be >= 0");
    }
    if (std::isinf(tcl)) {
        // Uncapped claims on the alpha = 1/2 severity family: infinite mean.
        return std::numeric_limits<double>::infinity();
    }
    return analytic_expected_claim(dist, tcl) * (1.0 + loading);
}

RiskReport build_risk_report(std::span<const double> gross, std::span<const double> retained,
                             std::span<const double> claims, double q_bank, double q_insurer,
                             bool infinite_mean_severity) {
    RiskReport report;
    report.q_bank = q_bank;
    report.q_insurer = q_insurer;
    report.var_q = empirical_var(retained, q_bank);
    report.es_q = empirical_es(retained, q_bank);
    report.scr = empirical_scr(claims);
    report.mcr = mcr(claims, q_insurer);
    const double gross_var = empirical_var(gross, q_bank);
    if (gross_var > 0.0) {
        const auto metrics = comparative_metrics(gross_var, retained, claims, q_bank);
        report.pct_var = metrics.pct_var;
        report.pct_var_mit = metrics.pct_var_mit;
        // MCR ratio at the insurer's quantile level.
        report.pct_mcr = empirical_var(claims, q_insurer) / gross_var;
    }
    report.es_divergent_in_law = infinite_mean_severity;
    return report;
}

} // namespace oprisk
