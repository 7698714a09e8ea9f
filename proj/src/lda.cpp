#include "oprisk/lda.hpp"

#include <stdexcept>
#include <utility>

namespace oprisk {

RiskModel::RiskModel(double lambda_, StableParams severity_, std::string label_)
    : lambda(lambda_), severity(severity_), label(std::move(label_)) {
    if (!(lambda > 0.0)) {
        throw std::invalid_argument("RiskModel: lambda must be positive");
    }
}

void YearOutcome::clear() {
    times.clear();
    gross.clear();
    retained.clear();
    claimed.clear();
}

void simulate_year_into(const RiskModel& model, RngStream& rng, YearOutcome& out) {
    out.clear();
    // Arrival, then severity, per event; the order of stream consumption is
    // part of the reproducibility contract.
    double t = rng.exponential(model.lambda);
    while (t < 1.0) {
        out.times.push_back(t);
        out.gross.push_back(sample_stable(model.severity, rng));
        t += rng.exponential(model.lambda);
    }
    out.retained = out.gross;
    out.claimed.assign(out.gross.size(), 0.0);
}

YearOutcome simulate_year(const RiskModel& model, RngStream& rng) {
    YearOutcome out;
    simulate_year_into(model, rng, out);
    return out;
}

double annual_loss(const YearOutcome& outcome, LossSeries which) {
    const std::vector<double>* series = nullptr;
    switch (which) {
        case LossSeries::kGross: series = &outcome.gross; break;
        case LossSeries::kRetained: series = &outcome.retained; break;
        case LossSeries::kClaimed: series = &outcome.claimed; break;
    }
    double total = 0.0;
    for (double v : *series) {
        total += v;
    }
    return total;
}

std::vector<YearOutcome> simulate_portfolio_year(const std::vector<RiskModel>& models,
                                                 std::vector<RngStream>& substreams) {
    if (models.empty()) {
        throw std::invalid_argument("simulate_portfolio_year: no risk cells");
    }
    if (substreams.size() != models.size()) {
        throw std::invalid_argument("simulate_portfolio_year: one substream per cell required");
    }
    std::vector<YearOutcome> years;
    years.reserve(models.size());
    for (std::size_t j = 0; j < models.size(); ++j) {
        years.push_back(simulate_year(models[j], substreams[j]));
    }
    return years;
}

} // namespace oprisk
