#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "oprisk/config.hpp"
#include "oprisk/policies.hpp"

namespace oprisk {

/// Grid-study configuration. Defaults reproduce the reference study design
/// at desk scale (1e5 years per cell; the full 1e6 is one setting away).
struct SweepConfig {
    std::vector<double> alphas = {2.0, 1.9, 1.8, 1.7, 1.6, 1.5, 1.4,
                                  1.3, 1.2, 1.1, 1.0, 0.75, 0.5, 0.25};
    double beta = 0.8;
    double gamma = 10000.0;
    double delta = 0.0;
    std::vector<double> lambdas = {1.0, 10.0};
    std::vector<std::string> policies = {"ilp", "alp", "clp", "alp2", "hlp", "blp"};
    int tcl_strata = 51;
    long years_per_cell = 100000;
    std::uint64_t master_seed = 946684800;
    double acl_percentile = 0.70;
    double q_bank = 0.95;
    double q_mcr = 0.95;
    int blp_bands = 3;
    BandScale blp_scale = BandScale::kLinear;
    long pilot_years = 100000;
    int threads = 1;
    bool timings = false; // real per-cell timings break byte-level determinism

    void validate() const;
};

/// Load a SweepConfig from a parsed config file (unset keys keep defaults).
SweepConfig sweep_config_from(const ConfigFile& file);

/// One grid cell: (alpha, lambda, policy, tcl) with its measured surfaces.
struct CellResult {
    double alpha = 0.0;
    double lambda = 0.0;
    std::string policy;
    double tcl = 0.0;
    double acl = 0.0;
    double var_gross = 0.0;
    double var_mitigated = 0.0;
    double var_capped = 0.0;
    double es_mitigated = 0.0;
    double mcr = 0.0;
    double scr = 0.0;
    double pct_var = 0.0;
    double pct_var_mit = 0.0;
    double pct_mcr = 0.0;
    std::uint64_t seed = 0;
    long years = 0;
    double runtime_ms = 0.0;
    std::string error; // empty on success
};

/// Smallest integer k with Poisson(lambda) cdf(k) >= percentile.
long frequency_percentile(double lambda, double percentile);

/// Annual limit derived from the per-event limit: tcl times the inverse-cdf
/// frequency percentile.
double derive_acl(double tcl, double lambda, double percentile = 0.70);

/// Top cover limit achieving full mitigation (retained VaR at q_bank equal to
/// zero) on a pilot run, found by doubling then bisection.
double calibrate_tcl_max(double alpha, double beta, double gamma, double delta, double lambda,
                         double q_bank, long pilot_years, std::uint64_t master_seed,
                         std::uint64_t pilot_stream_id);

/// Equally spaced strata from 0 to tcl_max inclusive.
std::vector<double> tcl_grid(double tcl_max, int strata);

/// Run the full grid. Cells are grouped by (alpha, lambda) so every policy
/// and stratum in a group sees the same simulated years; groups execute in
/// parallel on a bounded pool and results come back in deterministic order.
std::vector<CellResult> run_sweep(const SweepConfig& config);

void write_sweep_csv(std::ostream& out, const std::vector<CellResult>& cells,
                     bool include_timings = false);
std::vector<CellResult> read_sweep_csv(std::istream& in);

/// Crossing-point extraction from one (alpha, lambda, policy) row of cells
/// ordered by tcl.
struct CrossingPoint {
    enum class Status { kFound, kNone, kDegenerate };
    Status status = Status::kNone;
    double tcl = 0.0;
    double value = 0.0; // interpolated ordinate at the crossing
};

/// TCL where the bank's residual %VaR equals the insurer's %MCR.
CrossingPoint risk_equality_point(const std::vector<CellResult>& row);

/// TCL where %VaR mitigation crosses %MCR; degenerate when the two surfaces
/// coincide (complete risk transfer).
CrossingPoint optimum_insurance_point(const std::vector<CellResult>& row);

/// Group sweep rows by (alpha, lambda, policy), each ordered by tcl.
std::vector<std::vector<CellResult>> group_rows(const std::vector<CellResult>& cells);

} // namespace oprisk
