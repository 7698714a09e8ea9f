#pragma once

#include <span>
#include <vector>

namespace oprisk {

/*!
 * Empirical and analytic risk measures on annual-total samples.
 *
 * The quantile estimator is the ceil(q n)-th order statistic (the inf-based
 * quantile applied to the empirical distribution), with no interpolation so
 * results are bit-comparable across implementations.
 */

/// ceil(q n)-th order statistic of the sample, 0 < q < 1.
double empirical_var(std::span<const double> sample, double q);

/// Mean of the sample values >= empirical_var(sample, q).
double empirical_es(std::span<const double> sample, double q);

/// Mean plus three unbiased sample standard deviations (needs n >= 2).
double empirical_scr(std::span<const double> claims);

enum class McrMeasure { kVar, kEs };

/// Minimum capital requirement of the claims process: VaR or ES at q
/// (default 0.95) of the annual claims totals.
double mcr(std::span<const double> claims, double q = 0.95, McrMeasure measure = McrMeasure::kVar);

struct ComparativeMetrics {
    double pct_var = 0.0;     // VaR(mitigated) / VaR(gross)
    double pct_var_mit = 0.0; // 1 - pct_var
    double pct_mcr = 0.0;     // VaR(claims) / VaR(gross)
};

/// The three comparative ratios at quantile q; gross VaR must be positive.
ComparativeMetrics comparative_metrics(double gross_var, std::span<const double> mitigated,
                                       std::span<const double> claims, double q);

/// Premium at a loading over the expected annual claim. The analytic variant
/// lives beside the mixture code; this one is the empirical estimator.
double fair_premium(std::span<const double> claims, double loading);

/// Regulatory floor: insurance mitigation is capped at 20% of the gross
/// charge, so the capital held is max(mitigated, 0.8 * gross).
double basel_cap(double gross_var, double mitigated_var);

struct MixtureDist;

/// Premium from the closed-form expected claim. An uncapped policy
/// (tcl = +inf) on the infinite-mean severity family yields +inf.
double fair_premium_analytic(const MixtureDist& dist, double tcl, double loading);

/// Risk summary for one model + policy combination.
struct RiskReport {
    double var_q = 0.0;
    double es_q = 0.0;
    double scr = 0.0;
    double mcr = 0.0;
    double q_bank = 0.95;
    double q_insurer = 0.95;
    double pct_var = 1.0;
    double pct_var_mit = 0.0;
    double pct_mcr = 0.0;
    // Set when the gross severity has tail index <= 1: the ES estimate is a
    // finite sample statistic for a divergent population quantity.
    bool es_divergent_in_law = false;
};

/// Assemble a RiskReport from the three annual-total samples of one
/// model + policy run.
RiskReport build_risk_report(std::span<const double> gross, std::span<const double> retained,
                             std::span<const double> claims, double q_bank, double q_insurer,
                             bool infinite_mean_severity);

} // namespace oprisk
