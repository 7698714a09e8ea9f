#include "oprisk/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "oprisk/lda.hpp"
#include "oprisk/mixture.hpp"
#include "oprisk/risk_measures.hpp"
#include "oprisk/special_functions.hpp"

namespace oprisk {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Stream-id layout per (alpha, lambda) row: base = row_index * 16, then
// +0 first-cell years, +1 second cell (alp2), +2 banded-policy discount
// uniforms, +3 pilot calibration. Fixed; part of the determinism contract.
constexpr std::uint64_t kStreamsPerRow = 16;
constexpr std::uint64_t kStreamSim = 0;
constexpr std::uint64_t kStreamSimSecond = 1;
constexpr std::uint64_t kStreamBandedU = 2;
constexpr std::uint64_t kStreamPilot = 3;

struct PolicyKind {
    enum Value { kIlp, kAlp, kClp, kAlp2, kHlp, kBlp };
};

int policy_index(const std::string& name) {
    if (name == "ilp") return PolicyKind::kIlp;
    if (name == "alp") return PolicyKind::kAlp;
    if (name == "clp") return PolicyKind::kClp;
    if (name == "alp2") return PolicyKind::kAlp2;
    if (name == "hlp") return PolicyKind::kHlp;
    if (name == "blp") return PolicyKind::kBlp;
    throw std::invalid_argument("unknown policy: " + name);
}

// Flat event storage for one simulated block of years.
struct CellSample {
    std::vector<std::size_t> offset; // offset[y] .. offset[y+1] indexes events
    std::vector<double> times;
    std::vector<double> gross;
    std::vector<double> annual;

    std::size_t years() const { return annual.size(); }

    void fill_year(std::size_t y, YearOutcome& out) const {
        const std::size_t b = offset[y];
        const std::size_t e = offset[y + 1];
        out.times.assign(times.begin() + b, times.begin() + e);
        out.gross.assign(gross.begin() + b, gross.begin() + e);
        out.retained.resize(e - b);
        out.claimed.resize(e - b);
    }
};

CellSample simulate_block(const RiskModel& model, long years, RngStream& rng) {
    CellSample block;
    block.offset.reserve(static_cast<std::size_t>(years) + 1);
    block.annual.reserve(static_cast<std::size_t>(years));
    block.offset.push_back(0);
    YearOutcome scratch;
    for (long y = 0; y < years; ++y) {
        simulate_year_into(model, rng, scratch);
        block.times.insert(block.times.end(), scratch.times.begin(), scratch.times.end());
        block.gross.insert(block.gross.end(), scratch.gross.begin(), scratch.gross.end());
        block.offset.push_back(block.times.size());
        block.annual.push_back(annual_loss(scratch, LossSeries::kGross));
    }
    return block;
}

// Per-year discount fractions for the banded policy derived from one fixed
// uniform per event, so strata share their randomness (common random
// numbers); the Beta law still tracks the band the event lands in.
void banded_deltas(const CellSample& block, std::size_t year, const Blp& spec,
                   const std::vector<double>& widths, const std::vector<double>& u,
                   std::vector<double>& deltas) {
    const std::size_t b = block.offset[year];
    const std::size_t e = block.offset[year + 1];
    deltas.resize(e - b);
    for (std::size_t i = b; i < e; ++i) {
        const int band = spec.scale == BandScale::kLinear
                             ? linear_band_index(block.gross[i], spec.tcl, spec.bands)
                             : log_band_index(block.gross[i], spec.tcl, widths);
        const auto [pa, pb] = beta_band_params(band, spec.bands);
        deltas[i - b] = beta_reg_inv(pa, pb, u[i]);
    }
}

struct RowContext {
    const SweepConfig* config;
    double alpha;
    double lambda;
    std::uint64_t sim_seed_id;
    double tcl_max;
    std::vector<double> grid;
    CellSample cell_a;
    CellSample cell_b; // filled only when alp2 runs
    std::vector<double> combined_annual;
    std::vector<double> banded_u;
    double gross_var = 0.0;
    double gross_es = 0.0;
    double gross_var_combined = 0.0;
    double gross_es_combined = 0.0;
};

CellResult evaluate_cell(const RowContext& row, int kind, const std::string& policy_name,
                         double tcl) {
    const SweepConfig& cfg = *row.config;
    const bool two_cells = kind == PolicyKind::kAlp2;
    const std::vector<double>& annual_gross = two_cells ? row.combined_annual : row.cell_a.annual;
    const double gross_var = two_cells ? row.gross_var_combined : row.gross_var;
    const double gross_es = two_cells ? row.gross_es_combined : row.gross_es;

    CellResult cell;
    cell.alpha = row.alpha;
    cell.lambda = row.lambda;
    cell.policy = policy_name;
    cell.tcl = tcl;
    cell.seed = row.sim_seed_id;
    cell.years = static_cast<long>(annual_gross.size());
    cell.var_gross = gross_var;

    const bool uses_acl = kind == PolicyKind::kAlp || kind == PolicyKind::kClp || two_cells;
    cell.acl = uses_acl ? derive_acl(tcl, row.lambda, cfg.acl_percentile) : kInf;

    if (tcl == 0.0) {
        // Insurance-free stratum: the split is gross/zero for every policy.
        cell.var_mitigated = gross_var;
        cell.es_mitigated = gross_es;
        cell.mcr = 0.0;
        cell.scr = 0.0;
        cell.pct_var = 1.0;
        cell.pct_var_mit = 0.0;
        cell.pct_mcr = 0.0;
        cell.var_capped = basel_cap(gross_var, gross_var);
        return cell;
    }

    const std::size_t years = annual_gross.size();
    std::vector<double> retained(years);
    std::vector<double> claimed(years);

    Blp blp_spec{tcl, cfg.blp_bands, cfg.blp_scale};
    const std::vector<double> widths =
        (kind == PolicyKind::kBlp && cfg.blp_scale == BandScale::kLog)
            ? log_band_widths(cfg.blp_bands)
            : std::vector<double>{};

    YearOutcome scratch;
    YearOutcome scratch_b;
    std::vector<double> deltas;
    for (std::size_t y = 0; y < years; ++y) {
        row.cell_a.fill_year(y, scratch);
        switch (kind) {
            case PolicyKind::kIlp:
                apply_ilp(scratch, tcl);
                break;
            case PolicyKind::kAlp:
                apply_alp(scratch, cell.acl);
                break;
            case PolicyKind::kClp:
                apply_clp(scratch, tcl, cell.acl);
                break;
            case PolicyKind::kHlp:
                apply_hlp(scratch, tcl);
                break;
            case PolicyKind::kBlp:
                banded_deltas(row.cell_a, y, blp_spec, widths, row.banded_u, deltas);
                apply_blp_with_draws(scratch, blp_spec, deltas);
                break;
            case PolicyKind::kAlp2:
                row.cell_b.fill_year(y, scratch_b);
                apply_alp2(scratch, scratch_b, cell.acl);
                break;
            default:
                throw std::logic_error("evaluate_cell: unhandled policy");
        }
        double ret = annual_loss(scratch, LossSeries::kRetained);
        double clm = annual_loss(scratch, LossSeries::kClaimed);
        if (kind == PolicyKind::kAlp2) {
            ret += annual_loss(scratch_b, LossSeries::kRetained);
            clm += annual_loss(scratch_b, LossSeries::kClaimed);
        }
        retained[y] = ret;
        claimed[y] = clm;
    }

    cell.var_mitigated = empirical_var(retained, cfg.q_bank);
    cell.es_mitigated = empirical_es(retained, cfg.q_bank);
    cell.mcr = empirical_var(claimed, cfg.q_mcr);
    cell.scr = empirical_scr(claimed);
    cell.var_capped = basel_cap(gross_var, cell.var_mitigated);
    cell.pct_var = cell.var_mitigated / gross_var;
    cell.pct_var_mit = 1.0 - cell.pct_var;
    cell.pct_mcr = cell.mcr / gross_var;
    return cell;
}

void fail_row(const SweepConfig& cfg, double alpha, double lambda, std::uint64_t seed_id,
              const char* what, CellResult* out) {
    const std::size_t cells = cfg.policies.size() * static_cast<std::size_t>(cfg.tcl_strata);
    for (std::size_t i = 0; i < cells; ++i) {
        CellResult& slot = out[i];
        slot = CellResult{};
        slot.alpha = alpha;
        slot.lambda = lambda;
        slot.policy = cfg.policies[i / static_cast<std::size_t>(cfg.tcl_strata)];
        slot.seed = seed_id;
        slot.years = cfg.years_per_cell;
        slot.tcl = slot.acl = slot.var_gross = slot.var_mitigated = slot.var_capped =
            slot.es_mitigated = slot.mcr = slot.scr = slot.pct_var = slot.pct_var_mit =
                slot.pct_mcr = std::numeric_limits<double>::quiet_NaN();
        slot.error = what;
    }
}

void evaluate_row(const SweepConfig& cfg, std::size_t row_index, double alpha, double lambda,
                  CellResult* out) try {
    const std::uint64_t base = static_cast<std::uint64_t>(row_index) * kStreamsPerRow;
    RowContext row;
    row.config = &cfg;
    row.alpha = alpha;
    row.lambda = lambda;
    row.sim_seed_id = base + kStreamSim;

    const StableParams severity(alpha, cfg.beta, cfg.gamma, cfg.delta, /*truncated=*/true);
    const RiskModel model(lambda, severity);

    row.tcl_max = calibrate_tcl_max(alpha, cfg.beta, cfg.gamma, cfg.delta, lambda, cfg.q_bank,
                                    cfg.pilot_years, cfg.master_seed, base + kStreamPilot);
    row.grid = tcl_grid(row.tcl_max, cfg.tcl_strata);

    {
        RngStream sim(cfg.master_seed, base + kStreamSim);
        row.cell_a = simulate_block(model, cfg.years_per_cell, sim);
    }
    row.gross_var = empirical_var(row.cell_a.annual, cfg.q_bank);
    row.gross_es = empirical_es(row.cell_a.annual, cfg.q_bank);

    bool wants_alp2 = false;
    bool wants_blp = false;
    for (const auto& p : cfg.policies) {
        wants_alp2 |= policy_index(p) == PolicyKind::kAlp2;
        wants_blp |= policy_index(p) == PolicyKind::kBlp;
    }
    if (wants_alp2) {
        RngStream sim(cfg.master_seed, base + kStreamSimSecond);
        row.cell_b = simulate_block(model, cfg.years_per_cell, sim);
        row.combined_annual.resize(row.cell_a.annual.size());
        for (std::size_t y = 0; y < row.combined_annual.size(); ++y) {
            row.combined_annual[y] = row.cell_a.annual[y] + row.cell_b.annual[y];
        }
        row.gross_var_combined = empirical_var(row.combined_annual, cfg.q_bank);
        row.gross_es_combined = empirical_es(row.combined_annual, cfg.q_bank);
    }
    if (wants_blp) {
        RngStream u(cfg.master_seed, base + kStreamBandedU);
        row.banded_u.resize(row.cell_a.gross.size());
        for (auto& v : row.banded_u) {
            v = u.uniform01();
        }
    }

    const std::size_t strata = static_cast<std::size_t>(cfg.tcl_strata);
    for (std::size_t p = 0; p < cfg.policies.size(); ++p) {
        const int kind = policy_index(cfg.policies[p]);
        for (std::size_t s = 0; s < strata; ++s) {
            CellResult& slot = out[p * strata + s];
            const auto started = std::chrono::steady_clock::now();
            try {
                slot = evaluate_cell(row, kind, cfg.policies[p], row.grid[s]);
            } catch (const std::exception& ex) {
                slot.alpha = alpha;
                slot.lambda = lambda;
                slot.policy = cfg.policies[p];
                slot.tcl = row.grid[s];
                slot.seed = row.sim_seed_id;
                slot.years = cfg.years_per_cell;
                slot.var_gross = slot.var_mitigated = slot.var_capped = slot.es_mitigated =
                    slot.mcr = slot.scr = slot.pct_var = slot.pct_var_mit = slot.pct_mcr =
                        std::numeric_limits<double>::quiet_NaN();
                slot.error = ex.what();
            }
            if (cfg.timings) {
                const auto elapsed = std::chrono::steady_clock::now() - started;
                slot.runtime_ms =
                    std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(elapsed)
                        .count();
            }
        }
    }
} catch (const std::exception& ex) {
    // Row-level failures (calibration, simulation) mark every cell of the
    // row instead of tearing down the sweep.
    fail_row(cfg, alpha, lambda,
             static_cast<std::uint64_t>(row_index) * kStreamsPerRow + kStreamSim, ex.what(), out);
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

void SweepConfig::validate() const {
    if (alphas.empty() || lambdas.empty() || policies.empty()) {
        throw std::invalid_argument("sweep: alphas, lambdas and policies must be non-empty");
    }
    for (double a : alphas) {
        if (!(a > 0.0) || !(a <= 2.0)) {
            throw std::invalid_argument("sweep: alpha values must lie in (0, 2]");
        }
    }
    for (double l : lambdas) {
        if (!(l > 0.0)) {
            throw std::invalid_argument("sweep: lambda values must be positive");
        }
    }
    for (const auto& p : policies) {
        policy_index(p);
    }
    if (tcl_strata < 2) {
        throw std::invalid_argument("sweep: tcl_strata must be >= 2");
    }
    if (years_per_cell < 1000) {
        throw std::invalid_argument("sweep: years_per_cell must be >= 1000");
    }
    if (pilot_years < 1000) {
        throw std::invalid_argument("sweep: pilot_years must be >= 1000");
    }
    if (!(acl_percentile > 0.0) || !(acl_percentile < 1.0) || !(q_bank > 0.0) || !(q_bank < 1.0) ||
        !(q_mcr > 0.0) || !(q_mcr < 1.0)) {
        throw std::invalid_argument("sweep: percentiles must lie in (0, 1)");
    }
    if (!(beta >= -1.0) || !(beta <= 1.0) || !(gamma > 0.0)) {
        throw std::invalid_argument("sweep: severity parameters out of range");
    }
    if (blp_bands < 2) {
        throw std::invalid_argument("sweep: blp bands must be >= 2");
    }
    if (threads < 0) {
        throw std::invalid_argument("sweep: threads must be >= 0");
    }
}

SweepConfig sweep_config_from(const ConfigFile& file) {
    SweepConfig cfg;
    auto key = [&file](const char* name) {
        return file.has(std::string("sweep.") + name) ? std::string("sweep.") + name
                                                      : std::string(name);
    };
    cfg.alphas = file.get_double_list(key("alphas"), cfg.alphas);
    cfg.beta = file.get_double(key("beta"), cfg.beta);
    cfg.gamma = file.get_double(key("gamma"), cfg.gamma);
    cfg.delta = file.get_double(key("delta"), cfg.delta);
    cfg.lambdas = file.get_double_list(key("lambdas"), cfg.lambdas);
    cfg.policies = file.get_string_list(key("policies"), cfg.policies);
    cfg.tcl_strata = static_cast<int>(file.get_long(key("strata"), cfg.tcl_strata));
    cfg.years_per_cell = file.get_long(key("years"), cfg.years_per_cell);
    cfg.master_seed =
        static_cast<std::uint64_t>(file.get_long(key("master_seed"), static_cast<long>(cfg.master_seed)));
    cfg.acl_percentile = file.get_double(key("acl_percentile"), cfg.acl_percentile);
    cfg.q_bank = file.get_double(key("q_bank"), cfg.q_bank);
    cfg.q_mcr = file.get_double(key("q_mcr"), cfg.q_mcr);
    cfg.pilot_years = file.get_long(key("pilot_years"), cfg.pilot_years);
    cfg.threads = static_cast<int>(file.get_long(key("threads"), cfg.threads));
    cfg.timings = file.get_bool(key("timings"), cfg.timings);
    cfg.blp_bands = static_cast<int>(file.get_long("blp.bands", cfg.blp_bands));
    const std::string scale = file.get_string("blp.scale", cfg.blp_scale == BandScale::kLinear
                                                               ? "linear"
                                                               : "log");
    if (scale == "linear") {
        cfg.blp_scale = BandScale::kLinear;
    } else if (scale == "log") {
        cfg.blp_scale = BandScale::kLog;
    } else {
        throw std::invalid_argument("config: blp.scale must be linear or log");
    }
    return cfg;
}

long frequency_percentile(double lambda, double percentile) {
    if (!(lambda > 0.0)) {
        throw std::invalid_argument("frequency_percentile: lambda must be positive");
    }
    if (!(percentile > 0.0) || !(percentile < 1.0)) {
        throw std::invalid_argument("frequency_percentile: percentile must lie in (0, 1)");
    }
    double term = std::exp(-lambda);
    double cum = term;
    long k = 0;
    while (cum < percentile) {
        ++k;
        term *= lambda / static_cast<double>(k);
        cum += term;
        if (k > 100000000L) {
            throw std::runtime_error("frequency_percentile: did not converge");
        }
    }
    return k;
}

double derive_acl(double tcl, double lambda, double percentile) {
    if (!(tcl >= 0.0)) {
        throw std::invalid_argument("derive_acl: tcl must be >= 0");
    }
    return tcl * static_cast<double>(frequency_percentile(lambda, percentile));
}

double calibrate_tcl_max(double alpha, double beta, double gamma, double delta, double lambda,
                         double q_bank, long pilot_years, std::uint64_t master_seed,
                         std::uint64_t pilot_stream_id) {
    const StableParams severity(alpha, beta, gamma, delta, /*truncated=*/true);
    const RiskModel model(lambda, severity);
    RngStream rng(master_seed, pilot_stream_id);

    // Retained VaR under a per-event cap is zero iff at most n - ceil(q n)
    // pilot years contain an event above the cap, so the yearly maxima carry
    // the whole criterion.
    std::vector<double> yearly_max(static_cast<std::size_t>(pilot_years), 0.0);
    YearOutcome scratch;
    for (long y = 0; y < pilot_years; ++y) {
        simulate_year_into(model, rng, scratch);
        double m = 0.0;
        for (double x : scratch.gross) {
            m = std::max(m, x);
        }
        yearly_max[static_cast<std::size_t>(y)] = m;
    }
    const auto mitigated_var_is_zero = [&](double tcl) {
        std::size_t positive = 0;
        for (double m : yearly_max) {
            positive += m > tcl ? 1 : 0;
        }
        const double n = static_cast<double>(yearly_max.size());
        const auto rank = static_cast<std::size_t>(std::ceil(q_bank * n - 1e-9));
        return positive <= yearly_max.size() - rank;
    };

    if (mitigated_var_is_zero(0.0)) {
        throw std::runtime_error("calibrate_tcl_max: gross VaR already zero at q_bank");
    }
    double hi = gamma;
    while (!mitigated_var_is_zero(hi)) {
        hi *= 2.0;
        if (hi > 1e280) {
            throw std::runtime_error("calibrate_tcl_max: no finite cap fully mitigates");
        }
    }
    double lo = hi * 0.5;
    while (hi - lo > 1e-6 * hi) {
        const double mid = 0.5 * (lo + hi);
        if (mitigated_var_is_zero(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return hi;
}

std::vector<double> tcl_grid(double tcl_max, int strata) {
    if (strata < 2) {
        throw std::invalid_argument("tcl_grid: strata must be >= 2");
    }
    if (!(tcl_max > 0.0)) {
        throw std::invalid_argument("tcl_grid: tcl_max must be positive");
    }
    std::vector<double> grid(static_cast<std::size_t>(strata));
    for (int i = 0; i < strata; ++i) {
        grid[static_cast<std::size_t>(i)] =
            tcl_max * static_cast<double>(i) / static_cast<double>(strata - 1);
    }
    return grid;
}

std::vector<CellResult> run_sweep(const SweepConfig& config) {
    config.validate();
    struct Row {
        std::size_t index;
        double alpha;
        double lambda;
    };
    std::vector<Row> rows;
    rows.reserve(config.alphas.size() * config.lambdas.size());
    for (std::size_t ai = 0; ai < config.alphas.size(); ++ai) {
        for (std::size_t li = 0; li < config.lambdas.size(); ++li) {
            rows.push_back({rows.size(), config.alphas[ai], config.lambdas[li]});
        }
    }

    const std::size_t cells_per_row = config.policies.size() * static_cast<std::size_t>(config.tcl_strata);
    std::vector<CellResult> results(rows.size() * cells_per_row);

    unsigned pool = config.threads > 0 ? static_cast<unsigned>(config.threads)
                                       : std::max(1u, std::thread::hardware_concurrency());
    pool = std::min<unsigned>(pool, static_cast<unsigned>(rows.size()));

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t r = next.fetch_add(1);
            if (r >= rows.size()) {
                return;
            }
            evaluate_row(config, rows[r].index, rows[r].alpha, rows[r].lambda,
                         results.data() + rows[r].index * cells_per_row);
        }
    };
    if (pool <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(pool);
        for (unsigned t = 0; t < pool; ++t) {
            threads.emplace_back(worker);
        }
        for (auto& t : threads) {
            t.join();
        }
    }
    return results;
}

void write_sweep_csv(std::ostream& out, const std::vector<CellResult>& cells,
                     bool include_timings) {
    out << "alpha,lambda,policy,tcl,acl,var_gross,var_mitigated,var_capped,es_mitigated,mcr,scr,"
           "pct_var,pct_var_mit,pct_mcr,seed,years,runtime_ms\n";
    for (const auto& c : cells) {
        out << format_double(c.alpha) << ',' << format_double(c.lambda) << ',' << c.policy << ','
            << format_double(c.tcl) << ',' << format_double(c.acl) << ','
            << format_double(c.var_gross) << ',' << format_double(c.var_mitigated) << ','
            << format_double(c.var_capped) << ',' << format_double(c.es_mitigated) << ','
            << format_double(c.mcr) << ',' << format_double(c.scr) << ','
            << format_double(c.pct_var) << ',' << format_double(c.pct_var_mit) << ','
            << format_double(c.pct_mcr) << ',' << c.seed << ',' << c.years << ','
            << format_double(include_timings ? c.runtime_ms : 0.0) << '\n';
    }
}

std::vector<CellResult> read_sweep_csv(std::istream& in) {
    std::vector<CellResult> cells;
    std::string line;
    if (!std::getline(in, line)) {
        throw std::invalid_argument("sweep csv: empty input");
    }
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::istringstream row(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(row, field, ',')) {
            fields.push_back(field);
        }
        if (fields.size() != 17) {
            throw std::invalid_argument("sweep csv: malformed row: " + line);
        }
        CellResult c;
        c.alpha = std::stod(fields[0]);
        c.lambda = std::stod(fields[1]);
        c.policy = fields[2];
        c.tcl = std::stod(fields[3]);
        c.acl = std::stod(fields[4]);
        c.var_gross = std::stod(fields[5]);
        c.var_mitigated = std::stod(fields[6]);
        c.var_capped = std::stod(fields[7]);
        c.es_mitigated = std::stod(fields[8]);
        c.mcr = std::stod(fields[9]);
        c.scr = std::stod(fields[10]);
        c.pct_var = std::stod(fields[11]);
        c.pct_var_mit = std::stod(fields[12]);
        c.pct_mcr = std::stod(fields[13]);
        c.seed = static_cast<std::uint64_t>(std::stoull(fields[14]));
        c.years = std::stol(fields[15]);
        c.runtime_ms = std::stod(fields[16]);
        cells.push_back(std::move(c));
    }
    return cells;
}

std::vector<std::vector<CellResult>> group_rows(const std::vector<CellResult>& cells) {
    std::map<std::tuple<double, double, std::string>, std::vector<CellResult>> groups;
    for (const auto& c : cells) {
        groups[{c.alpha, c.lambda, c.policy}].push_back(c);
    }
    std::vector<std::vector<CellResult>> rows;
    rows.reserve(groups.size());
    for (auto& [key, row] : groups) {
        std::sort(row.begin(), row.end(),
                  [](const CellResult& a, const CellResult& b) { return a.tcl < b.tcl; });
        rows.push_back(std::move(row));
    }
    return rows;
}

CrossingPoint risk_equality_point(const std::vector<CellResult>& row) {
    CrossingPoint point;
    for (std::size_t k = 0; k + 1 < row.size(); ++k) {
        const double d0 = row[k].pct_var - row[k].pct_mcr;
        const double d1 = row[k + 1].pct_var - row[k + 1].pct_mcr;
        if (d0 == 0.0) {
            point.status = CrossingPoint::Status::kFound;
            point.tcl = row[k].tcl;
            point.value = row[k].pct_var;
            return point;
        }
        if (d0 * d1 < 0.0) {
            const double t = d0 / (d0 - d1);
            point.status = CrossingPoint::Status::kFound;
            point.tcl = row[k].tcl + t * (row[k + 1].tcl - row[k].tcl);
            point.value = row[k].pct_var + t * (row[k + 1].pct_var - row[k].pct_var);
            return point;
        }
    }
    return point;
}

CrossingPoint optimum_insurance_point(const std::vector<CellResult>& row) {
    CrossingPoint point;
    double max_gap = 0.0;
    double max_mit = 0.0;
    for (const auto& c : row) {
        max_gap = std::max(max_gap, std::fabs(c.pct_var_mit - c.pct_mcr));
        max_mit = std::max(max_mit, c.pct_var_mit);
    }
    if (max_gap < 0.01) {
        // Curves coincide. A dead row (no transfer at all) has no point; a
        // moving pair is the complete-transfer degeneracy.
        point.status = max_mit < 0.01 ? CrossingPoint::Status::kNone
                                      : CrossingPoint::Status::kDegenerate;
        return point;
    }
    // Stratum 0 has both surfaces pinned at zero; scan from the first real one.
    for (std::size_t k = 1; k + 1 < row.size(); ++k) {
        const double e0 = row[k].pct_var_mit - row[k].pct_mcr;
        const double e1 = row[k + 1].pct_var_mit - row[k + 1].pct_mcr;
        if (e0 == 0.0) {
            point.status = CrossingPoint::Status::kFound;
            point.tcl = row[k].tcl;
            point.value = row[k].pct_var_mit;
            return point;
        }
        if (e0 * e1 < 0.0) {
            const double t = e0 / (e0 - e1);
            point.status = CrossingPoint::Status::kFound;
            point.tcl = row[k].tcl + t * (row[k + 1].tcl - row[k].tcl);
            point.value =
                row[k].pct_var_mit + t * (row[k + 1].pct_var_mit - row[k].pct_var_mit);
            return point;
        }
    }
    // Mitigation above the transfer from the first stratum onward: the
    // curves separate at the origin, so the profitable region starts at 0.
    if (row.size() > 1 && row[1].pct_var_mit > row[1].pct_mcr) {
        point.status = CrossingPoint::Status::kFound;
        point.tcl = 0.0;
        point.value = 0.0;
    }
    return point;
}

} // namespace oprisk
