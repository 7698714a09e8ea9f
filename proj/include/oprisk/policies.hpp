#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "oprisk/lda.hpp"
#include "oprisk/rng.hpp"

namespace oprisk {

// The six policy structures. Limits may be +inf to express an uncapped side
// (used by the CLP degeneracy identities).
struct NoInsurance {};
struct Ilp {
    double tcl; // per-event cover limit
};
struct Alp {
    double acl; // annual cover limit
};
struct Clp {
    double tcl;
    double acl;
};
struct Alp2 {
    double acl; // annual limit shared across exactly two cells
};
struct Hlp {
    double tcl; // per-event limit, discounted by the haircut alpha(t) = t
};
enum class BandScale { kLinear, kLog };
struct Blp {
    double tcl;
    int bands;        // D >= 2
    BandScale scale;
};

using PolicySpec = std::variant<NoInsurance, Ilp, Alp, Clp, Alp2, Hlp, Blp>;

/// Validates limits (non-negative; BLP needs tcl > 0 and D >= 2).
void validate_policy(const PolicySpec& policy);

std::string policy_name(const PolicySpec& policy);

/// Per-event Beta draws recorded by the banded policy, with the band index
/// each one discounted.
struct BandDraws {
    std::vector<int> band;
    std::vector<double> delta;
};

// Each apply_* fills outcome.retained / outcome.claimed from outcome.gross
// (and outcome.times where the policy is time-aware), leaving gross and
// times untouched. Conservation retained + claimed == gross holds per event.

/// Per-event cap: claimed = min(X, tcl).
void apply_ilp(YearOutcome& outcome, double tcl);

/// Annual cap paid in event-time order; the crossing event is split.
void apply_alp(YearOutcome& outcome, double acl);

/// Per-event cap plus annual cap on the paid claims.
void apply_clp(YearOutcome& outcome, double tcl, double acl);

/// Annual cap shared by two cells: events merged in time order and run as
/// one annual-cap stream.
void apply_alp2(YearOutcome& first, YearOutcome& second, double acl);

/// Haircut policy: the available cover at event time t is t * tcl.
void apply_hlp(YearOutcome& outcome, double tcl);

/// Banded policy with stochastic payment discounts; returns the Beta draws
/// actually used.
BandDraws apply_blp(YearOutcome& outcome, const Blp& spec, RngStream& rng);

/// Deterministic variant: one caller-supplied discount per event.
void apply_blp_with_draws(YearOutcome& outcome, const Blp& spec, std::span<const double> draws,
                          std::vector<int>* bands_out = nullptr);

/// Dispatch on the policy kind. Alp2 is rejected here (it needs two years).
void apply_policy(YearOutcome& outcome, const PolicySpec& policy, RngStream& rng);

/// Beta(alpha, beta) parameters of the payment discount for band d of D.
/// Literal evaluation of the banding indicator formulas; the D = 2, d = 1
/// denominator degenerates to +inf, read as the limit law (discount == 1).
std::pair<double, double> beta_band_params(int d, int bands);

/// Band index of a loss under equal-width bands of tcl / D.
int linear_band_index(double x, double tcl, int bands);

/// Log-scale band widths as fractions of tcl; they sum to 1.
std::vector<double> log_band_widths(int bands);

/// Band index of a loss under the log-scale widths.
int log_band_index(double x, double tcl, std::span<const double> widths);

} // namespace oprisk
