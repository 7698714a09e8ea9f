#pragma once

#include <string>
#include <vector>

#include "oprisk/rng.hpp"
#include "oprisk/stable.hpp"

namespace oprisk {

/// One risk cell: Poisson event intensity paired with its severity law.
struct RiskModel {
    double lambda;
    StableParams severity;
    std::string label;

    RiskModel(double lambda_, StableParams severity_, std::string label_ = {});
};

/*!
 * One simulated loss year. Event times are strictly increasing in [0, 1);
 * gross, retained and claimed run parallel to times. Every policy preserves
 * retained[s] + claimed[s] == gross[s] per event.
 */
struct YearOutcome {
    std::vector<double> times;
    std::vector<double> gross;
    std::vector<double> retained;
    std::vector<double> claimed;

    std::size_t size() const { return times.size(); }
    void clear();
};

enum class LossSeries { kGross, kRetained, kClaimed };

/// Simulate one year: exponential inter-arrivals accumulated until the year
/// ends, one severity per arrival. Retained starts equal to gross, claimed
/// at zero (no policy applied yet).
YearOutcome simulate_year(const RiskModel& model, RngStream& rng);

/// Allocation-free variant used by the long Monte Carlo loops.
void simulate_year_into(const RiskModel& model, RngStream& rng, YearOutcome& out);

/// Total of the selected per-event series; 0 for an empty year.
double annual_loss(const YearOutcome& outcome, LossSeries which);

/// One independent year per cell, each drawn from its own substream.
std::vector<YearOutcome> simulate_portfolio_year(const std::vector<RiskModel>& models,
                                                 std::vector<RngStream>& substreams);

} // namespace oprisk
