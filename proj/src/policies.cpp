#include "oprisk/policies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace oprisk {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_same_lengths(const YearOutcome& y, const char* who) {
    if (y.gross.size() != y.times.size()) {
        throw std::invalid_argument(std::string(who) + ": event times missing or inconsistent");
    }
}

void reset_split(YearOutcome& y) {
    y.retained.resize(y.gross.size());
    y.claimed.resize(y.gross.size());
}

// Band bookkeeping shared by the linear and log scales.
struct BandLayout {
    // lower[i] is the currency floor of band i+1; width[i] its currency width.
    std::vector<double> lower;
    std::vector<double> width;
};

BandLayout make_layout(const Blp& spec) {
    BandLayout layout;
    const int d = spec.bands;
    layout.lower.resize(static_cast<std::size_t>(d));
    layout.width.resize(static_cast<std::size_t>(d));
    if (spec.scale == BandScale::kLinear) {
        const double len = spec.tcl / d;
        for (int i = 0; i < d; ++i) {
            layout.lower[i] = i * len;
            layout.width[i] = len;
        }
    } else {
        const auto widths = log_band_widths(d);
        double cum = 0.0;
        for (int i = 0; i < d; ++i) {
            layout.lower[i] = cum * spec.tcl;
            layout.width[i] = widths[i] * spec.tcl;
            cum += widths[i];
        }
    }
    return layout;
}

int band_of(double x, const Blp& spec, std::span<const double> log_widths) {
    return spec.scale == BandScale::kLinear ? linear_band_index(x, spec.tcl, spec.bands)
                                            : log_band_index(x, spec.tcl, log_widths);
}

// Cover limit of one loss given its band and discount draw: completed lower
// bands in full plus the discounted share of the active band.
double banded_cover(double x, int band, double delta, const BandLayout& layout) {
    const std::size_t i = static_cast<std::size_t>(band - 1);
    const double in_band = std::min(layout.width[i], x - layout.lower[i]);
    return layout.lower[i] + delta * std::max(in_band, 0.0);
}

} // namespace

void validate_policy(const PolicySpec& policy) {
    std::visit(
        [](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, Ilp> || std::is_same_v<T, Hlp>) {
                if (!(p.tcl >= 0.0)) throw std::invalid_argument("policy: tcl must be >= 0");
            } else if constexpr (std::is_same_v<T, Alp> || std::is_same_v<T, Alp2>) {
                if (!(p.acl >= 0.0)) throw std::invalid_argument("policy: acl must be >= 0");
            } else if constexpr (std::is_same_v<T, Clp>) {
                if (!(p.tcl >= 0.0) || !(p.acl >= 0.0)) {
                    throw std::invalid_argument("policy: limits must be >= 0");
                }
            } else if constexpr (std::is_same_v<T, Blp>) {
                if (!(p.tcl > 0.0)) throw std::invalid_argument("policy: banded tcl must be > 0");
                if (p.bands < 2) throw std::invalid_argument("policy: bands must be >= 2");
            }
        },
        policy);
}

std::string policy_name(const PolicySpec& policy) {
    struct Namer {
        std::string operator()(const NoInsurance&) const { return "none"; }
        std::string operator()(const Ilp&) const { return "ilp"; }
        std::string operator()(const Alp&) const { return "alp"; }
        std::string operator()(const Clp&) const { return "clp"; }
        std::string operator()(const Alp2&) const { return "alp2"; }
        std::string operator()(const Hlp&) const { return "hlp"; }
        std::string operator()(const Blp&) const { return "blp"; }
    };
    return std::visit(Namer{}, policy);
}

void apply_ilp(YearOutcome& y, double tcl) {
    if (!(tcl >= 0.0)) {
        throw std::invalid_argument("apply_ilp: tcl must be >= 0");
    }
    reset_split(y);
    for (std::size_t s = 0; s < y.gross.size(); ++s) {
        const double x = y.gross[s];
        const double claim = std::min(x, tcl);
        y.claimed[s] = claim;
        y.retained[s] = x - claim;
    }
}

void apply_alp(YearOutcome& y, double acl) {
    if (!(acl >= 0.0)) {
        throw std::invalid_argument("apply_alp: acl must be >= 0");
    }
    reset_split(y);
    double paid = 0.0;
    for (std::size_t s = 0; s < y.gross.size(); ++s) {
        const double x = y.gross[s];
        const double claim = std::min(x, std::max(acl - paid, 0.0));
        paid += claim;
        y.claimed[s] = claim;
        y.retained[s] = x - claim;
    }
}

void apply_clp(YearOutcome& y, double tcl, double acl) {
    if (!(tcl >= 0.0) || !(acl >= 0.0)) {
        throw std::invalid_argument("apply_clp: limits must be >= 0");
    }
    reset_split(y);
    double paid = 0.0;
    for (std::size_t s = 0; s < y.gross.size(); ++s) {
        const double x = y.gross[s];
        const double nominal = std::min(x, tcl);
        const double claim = std::min(nominal, std::max(acl - paid, 0.0));
        paid += claim;
        y.claimed[s] = claim;
        y.retained[s] = x - claim;
    }
}

void apply_alp2(YearOutcome& first, YearOutcome& second, double acl) {
    if (!(acl >= 0.0)) {
        throw std::invalid_argument("apply_alp2: acl must be >= 0");
    }
    require_same_lengths(first, "apply_alp2");
    require_same_lengths(second, "apply_alp2");
    reset_split(first);
    reset_split(second);

    // Merge the two event streams in time order (ties: first cell wins) and
    // run them against the one shared annual limit.
    std::size_t i = 0;
    std::size_t j = 0;
    double paid = 0.0;
    while (i < first.size() || j < second.size()) {
        const bool take_first =
            j >= second.size() || (i < first.size() && first.times[i] <= second.times[j]);
        YearOutcome& y = take_first ? first : second;
        const std::size_t s = take_first ? i++ : j++;
        const double x = y.gross[s];
        const double claim = std::min(x, std::max(acl - paid, 0.0));
        paid += claim;
        y.claimed[s] = claim;
        y.retained[s] = x - claim;
    }
}

void apply_hlp(YearOutcome& y, double tcl) {
    if (!(tcl >= 0.0)) {
        throw std::invalid_argument("apply_hlp: tcl must be >= 0");
    }
    require_same_lengths(y, "apply_hlp");
    reset_split(y);
    for (std::size_t s = 0; s < y.gross.size(); ++s) {
        const double x = y.gross[s];
        const double cover = y.times[s] * tcl;
        const double claim = std::min(x, cover);
        y.claimed[s] = claim;
        y.retained[s] = x - claim;
    }
}

std::pair<double, double> beta_band_params(int d, int bands) {
    if (bands < 2) {
        throw std::invalid_argument("beta_band_params: bands must be >= 2");
    }
    if (d < 1 || d > bands) {
        throw std::invalid_argument("beta_band_params: band index out of range");
    }
    const int ceil_half = (bands + 2) / 2;  // ceil((D+1)/2)
    const int floor_half = (bands + 1) / 2; // floor((D+1)/2)

    double a;
    if (d >= ceil_half) {
        a = 1.0;
    } else {
        const int denom = bands - ceil_half;
        a = denom == 0 ? kInf : (ceil_half - d) * (2.0 / denom);
    }
    double b;
    if (d <= floor_half) {
        b = 1.0;
    } else {
        b = (d - floor_half) * (2.0 / (bands - floor_half));
    }
    return {a, b};
}

int linear_band_index(double x, double tcl, int bands) {
    const double len = tcl / bands;
    const int d = static_cast<int>(std::floor(x / len)) + 1;
    return std::min(bands, std::max(1, d));
}

std::vector<double> log_band_widths(int bands) {
    if (bands < 2) {
        throw std::invalid_argument("log_band_widths: bands must be >= 2");
    }
    const double l = 1.0 / bands;
    const double denom = std::exp(1.0) - 1.0;
    std::vector<double> widths(static_cast<std::size_t>(bands));
    for (int i = 1; i <= bands; ++i) {
        widths[i - 1] = (std::exp(i * l) - std::exp((i - 1) * l)) / denom;
    }
    return widths;
}

int log_band_index(double x, double tcl, std::span<const double> widths) {
    const double ratio = x / tcl;
    double cum = 0.0;
    for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
        cum += widths[i];
        if (ratio <= cum) {
            return static_cast<int>(i) + 1;
        }
    }
    return static_cast<int>(widths.size());
}

void apply_blp_with_draws(YearOutcome& y, const Blp& spec, std::span<const double> draws,
                          std::vector<int>* bands_out) {
    validate_policy(PolicySpec{spec});
    if (draws.size() != y.gross.size()) {
        throw std::invalid_argument("apply_blp_with_draws: one discount per event required");
    }
    reset_split(y);
    const auto layout = make_layout(spec);
    const auto widths =
        spec.scale == BandScale::kLog ? log_band_widths(spec.bands) : std::vector<double>{};
    if (bands_out) {
        bands_out->resize(y.gross.size());
    }
    for (std::size_t s = 0; s < y.gross.size(); ++s) {
        const double x = y.gross[s];
        const int band = band_of(x, spec, widths);
        const double claim = std::min(x, banded_cover(x, band, draws[s], layout));
        y.claimed[s] = claim;
        y.retained[s] = x - claim;
        if (bands_out) {
            (*bands_out)[s] = band;
        }
    }
}

BandDraws apply_blp(YearOutcome& y, const Blp& spec, RngStream& rng) {
    validate_policy(PolicySpec{spec});
    const auto widths =
        spec.scale == BandScale::kLog ? log_band_widths(spec.bands) : std::vector<double>{};
    BandDraws record;
    record.band.resize(y.gross.size());
    record.delta.resize(y.gross.size());
    for (std::size_t s = 0; s < y.gross.size(); ++s) {
        const int band = band_of(y.gross[s], spec, widths);
        const auto [a, b] = beta_band_params(band, spec.bands);
        record.band[s] = band;
        record.delta[s] = rng.beta(a, b);
    }
    apply_blp_with_draws(y, spec, record.delta);
    return record;
}

void apply_policy(YearOutcome& y, const PolicySpec& policy, RngStream& rng) {
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, NoInsurance>) {
                reset_split(y);
                for (std::size_t s = 0; s < y.gross.size(); ++s) {
                    y.retained[s] = y.gross[s];
                    y.claimed[s] = 0.0;
                }
            } else if constexpr (std::is_same_v<T, Ilp>) {
                apply_ilp(y, p.tcl);
            } else if constexpr (std::is_same_v<T, Alp>) {
                apply_alp(y, p.acl);
            } else if constexpr (std::is_same_v<T, Clp>) {
                apply_clp(y, p.tcl, p.acl);
            } else if constexpr (std::is_same_v<T, Alp2>) {
                throw std::invalid_argument("apply_policy: alp2 needs two outcomes");
            } else if constexpr (std::is_same_v<T, Hlp>) {
                apply_hlp(y, p.tcl);
            } else if constexpr (std::is_same_v<T, Blp>) {
                apply_blp(y, p, rng);
            }
        },
        policy);
}

} // namespace oprisk
