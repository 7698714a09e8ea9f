#include <cstdint>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oprisk/config.hpp"
#include "oprisk/experiment.hpp"
#include "oprisk/lda.hpp"
#include "oprisk/mixture.hpp"
#include "oprisk/policies.hpp"
#include "oprisk/risk_measures.hpp"

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct SimulateOptions {
    double lambda = 1.0;
    double alpha = 0.5;
    double beta = 1.0;
    double gamma = 1.0;
    double delta = 0.0;
    bool truncated = true;
    std::string policy = "ilp";
    double tcl = kInf;
    double acl = kInf;
    int bands = 3;
    std::string band_scale = "linear";
    long years = 100000;
    std::uint64_t seed = 946684800;
    double q_bank = 0.95;
    double q_mcr = 0.95;
    double loading = 0.0;
};

int run_simulate(const SimulateOptions& opt) {
    using namespace oprisk;
    const StableParams severity(opt.alpha, opt.beta, opt.gamma, opt.delta, opt.truncated);
    const RiskModel model(opt.lambda, severity);
    const BandScale scale = opt.band_scale == "log" ? BandScale::kLog : BandScale::kLinear;

    const bool two_cells = opt.policy == "alp2";
    RngStream rng_a(opt.seed, 0);
    RngStream rng_b(opt.seed, 1);
    RngStream rng_policy(opt.seed, 2);

    const auto n = static_cast<std::size_t>(opt.years);
    std::vector<double> gross(n);
    std::vector<double> retained(n);
    std::vector<double> claimed(n);
    YearOutcome year;
    YearOutcome year_b;
    for (std::size_t y = 0; y < n; ++y) {
        simulate_year_into(model, rng_a, year);
        double g = annual_loss(year, LossSeries::kGross);
        if (two_cells) {
            simulate_year_into(model, rng_b, year_b);
            g += annual_loss(year_b, LossSeries::kGross);
            apply_alp2(year, year_b, opt.acl);
        } else if (opt.policy == "none") {
            apply_policy(year, NoInsurance{}, rng_policy);
        } else if (opt.policy == "ilp") {
            apply_ilp(year, opt.tcl);
        } else if (opt.policy == "alp") {
            apply_alp(year, opt.acl);
        } else if (opt.policy == "clp") {
            apply_clp(year, opt.tcl, opt.acl);
        } else if (opt.policy == "hlp") {
            apply_hlp(year, opt.tcl);
        } else if (opt.policy == "blp") {
            apply_blp(year, Blp{opt.tcl, opt.bands, scale}, rng_policy);
        } else {
            throw std::invalid_argument("unknown policy: " + opt.policy);
        }
        double r = annual_loss(year, LossSeries::kRetained);
        double c = annual_loss(year, LossSeries::kClaimed);
        if (two_cells) {
            r += annual_loss(year_b, LossSeries::kRetained);
            c += annual_loss(year_b, LossSeries::kClaimed);
        }
        gross[y] = g;
        retained[y] = r;
        claimed[y] = c;
    }

    const RiskReport report =
        build_risk_report(gross, retained, claimed, opt.q_bank, opt.q_mcr, opt.alpha <= 1.0);
    const double premium = fair_premium(claimed, opt.loading);

    std::cout << "var_gross,var_mitigated,es_mitigated,scr,mcr,pct_var,pct_var_mit,pct_mcr,"
                 "fair_premium,es_divergent_in_law\n";
    auto emit = [](double v) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        std::cout << buf;
    };
    emit(empirical_var(gross, opt.q_bank));
    std::cout << ',';
    emit(report.var_q);
    std::cout << ',';
    emit(report.es_q);
    std::cout << ',';
    emit(report.scr);
    std::cout << ',';
    emit(report.mcr);
    std::cout << ',';
    emit(report.pct_var);
    std::cout << ',';
    emit(report.pct_var_mit);
    std::cout << ',';
    emit(report.pct_mcr);
    std::cout << ',';
    emit(premium);
    std::cout << ',' << (report.es_divergent_in_law ? 1 : 0) << '\n';
    return 0;
}

struct AnalyticOptions {
    double lambda = 1.0;
    double gamma = 1.0;
    double delta = 0.0;
    double lambda2 = 0.0;
    double gamma2 = 0.0;
    double delta2 = 0.0;
    std::string op = "cdf";
    double z = 0.0;
    double q = 0.95;
    double tcl = 0.0;
    double var_q = -1.0;
    double loading = 0.0;
};

int run_analytic(const AnalyticOptions& opt) {
    using namespace oprisk;
    const bool two = opt.lambda2 > 0.0;
    const MixtureDist dist =
        two ? build_mixture_two_risks(opt.lambda, opt.gamma, opt.delta, opt.lambda2, opt.gamma2,
                                      opt.delta2)
            : build_mixture(opt.lambda, opt.gamma, opt.delta);

    auto emit = [](const char* name, double v) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        std::cout << name << " = " << buf << '\n';
    };

    if (opt.op == "pdf") {
        emit("pdf", mixture_pdf(dist, opt.z));
    } else if (opt.op == "cdf") {
        emit("cdf", mixture_cdf(dist, opt.z));
    } else if (opt.op == "quantile") {
        emit("quantile", mixture_quantile(dist, opt.q));
    } else if (opt.op == "atom") {
        emit("atom", dist.atom_at_zero);
    } else if (opt.op == "median-series") {
        const auto series = mixture_median_series(dist);
        emit("median_series", series.value);
        std::cout << "n_lower = " << series.n_lower << "\nn_upper = " << series.n_upper << '\n';
    } else if (opt.op == "expected-claim") {
        emit("expected_claim", analytic_expected_claim(dist, opt.tcl));
        emit("fair_premium", fair_premium_analytic(dist, opt.tcl, opt.loading));
    } else if (opt.op == "scr") {
        emit("scr", analytic_scr(dist, opt.tcl));
    } else if (opt.op == "es") {
        const double var_q = opt.var_q >= 0.0 ? opt.var_q : mixture_quantile(dist, opt.q);
        emit("var_q", var_q);
        emit("es_series_as_displayed", analytic_es_mcr(dist, opt.tcl, var_q));
        emit("es_tail_consistent", analytic_es_mcr_tail(dist, opt.tcl, var_q));
    } else {
        throw std::invalid_argument("unknown analytic op: " + opt.op);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Operational-risk LDA engine: stable severities, insurance policies, "
                 "closed-form mixtures and grid experiments"};
    app.require_subcommand(1);

    SimulateOptions sim;
    auto* simulate = app.add_subcommand("simulate", "Simulate one model + policy into a report");
    simulate->add_option("--lambda", sim.lambda, "Poisson intensity");
    simulate->add_option("--alpha", sim.alpha, "stable tail index");
    simulate->add_option("--beta", sim.beta, "stable skewness");
    simulate->add_option("--gamma", sim.gamma, "stable scale");
    simulate->add_option("--delta", sim.delta, "stable location");
    simulate->add_flag("--truncated,!--no-truncated", sim.truncated, "restrict severities to x >= 0");
    simulate->add_option("--policy", sim.policy, "none|ilp|alp|clp|alp2|hlp|blp");
    simulate->add_option("--tcl", sim.tcl, "per-event cover limit");
    simulate->add_option("--acl", sim.acl, "annual cover limit");
    simulate->add_option("--bands", sim.bands, "banded policy band count");
    simulate->add_option("--band-scale", sim.band_scale, "linear|log");
    simulate->add_option("--years", sim.years, "simulated years");
    simulate->add_option("--master-seed", sim.seed, "master seed");
    simulate->add_option("--q-bank", sim.q_bank, "bank VaR level");
    simulate->add_option("--q-mcr", sim.q_mcr, "insurer MCR level");
    simulate->add_option("--loading", sim.loading, "premium loading");

    AnalyticOptions ana;
    auto* analytic = app.add_subcommand("analytic", "Closed-form mixture values");
    analytic->add_option("--lambda", ana.lambda, "Poisson intensity");
    analytic->add_option("--gamma", ana.gamma, "severity scale");
    analytic->add_option("--delta", ana.delta, "severity support edge");
    analytic->add_option("--lambda2", ana.lambda2, "second-risk intensity (two-risk mixture)");
    analytic->add_option("--gamma2", ana.gamma2, "second-risk scale");
    analytic->add_option("--delta2", ana.delta2, "second-risk support edge");
    analytic->add_option("--op", ana.op,
                         "pdf|cdf|quantile|atom|median-series|expected-claim|scr|es");
    analytic->add_option("--z", ana.z, "evaluation point");
    analytic->add_option("--q", ana.q, "quantile level");
    analytic->add_option("--tcl", ana.tcl, "per-event cover limit");
    analytic->add_option("--var-q", ana.var_q, "VaR level for the ES series (default: quantile at --q)");
    analytic->add_option("--loading", ana.loading, "premium loading");

    std::string config_path;
    std::string out_path;
    std::string alphas_csv;
    std::string lambdas_csv;
    std::string policies_csv;
    long strata_override = -1;
    long years_override = -1;
    long seed_override = -1;
    long threads_override = -1;
    double gamma_override = -1.0;
    bool timings = false;
    auto* sweep = app.add_subcommand("sweep", "Run the (alpha, lambda, policy, TCL) grid to CSV");
    sweep->add_option("--config", config_path, "config file (key = value)");
    sweep->add_option("--out", out_path, "output CSV path (default stdout)");
    sweep->add_option("--alphas", alphas_csv, "comma list overriding alphas");
    sweep->add_option("--lambdas", lambdas_csv, "comma list overriding lambdas");
    sweep->add_option("--policies", policies_csv, "comma list overriding policies");
    sweep->add_option("--strata", strata_override, "TCL strata count");
    sweep->add_option("--years", years_override, "years per cell");
    sweep->add_option("--master-seed", seed_override, "master seed");
    sweep->add_option("--threads", threads_override, "worker pool size (0 = hardware)");
    sweep->add_option("--gamma", gamma_override, "severity scale");
    sweep->add_flag("--timings", timings, "emit real per-cell timings (breaks byte determinism)");

    std::string points_in;
    std::string points_out;
    auto* points = app.add_subcommand("points", "Extract equality/optimum points from a sweep CSV");
    points->add_option("--in", points_in, "sweep CSV path")->required();
    points->add_option("--out", points_out, "output CSV path (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) {
            return run_simulate(sim);
        }
        if (analytic->parsed()) {
            return run_analytic(ana);
        }
        if (sweep->parsed()) {
            oprisk::SweepConfig cfg;
            if (!config_path.empty()) {
                cfg = oprisk::sweep_config_from(oprisk::ConfigFile::parse_file(config_path));
            }
            auto split_doubles = [](const std::string& csv) {
                std::vector<double> out;
                std::istringstream in(csv);
                std::string item;
                while (std::getline(in, item, ',')) {
                    if (!item.empty()) out.push_back(std::stod(item));
                }
                return out;
            };
            if (!alphas_csv.empty()) cfg.alphas = split_doubles(alphas_csv);
            if (!lambdas_csv.empty()) cfg.lambdas = split_doubles(lambdas_csv);
            if (!policies_csv.empty()) {
                cfg.policies.clear();
                std::istringstream in(policies_csv);
                std::string item;
                while (std::getline(in, item, ',')) {
                    if (!item.empty()) cfg.policies.push_back(item);
                }
            }
            if (strata_override > 0) cfg.tcl_strata = static_cast<int>(strata_override);
            if (years_override > 0) cfg.years_per_cell = years_override;
            if (seed_override >= 0) cfg.master_seed = static_cast<std::uint64_t>(seed_override);
            if (threads_override >= 0) cfg.threads = static_cast<int>(threads_override);
            if (gamma_override > 0.0) cfg.gamma = gamma_override;
            cfg.timings = cfg.timings || timings;

            const auto cells = oprisk::run_sweep(cfg);
            if (out_path.empty()) {
                oprisk::write_sweep_csv(std::cout, cells, cfg.timings);
            } else {
                std::ofstream out(out_path, std::ios::binary);
                if (!out) {
                    throw std::invalid_argument("cannot open output file: " + out_path);
                }
                oprisk::write_sweep_csv(out, cells, cfg.timings);
            }
            int failures = 0;
            for (const auto& c : cells) {
                if (!c.error.empty()) {
                    ++failures;
                    std::cerr << "cell failed: alpha=" << c.alpha << " lambda=" << c.lambda
                              << " policy=" << c.policy << " tcl=" << c.tcl << ": " << c.error
                              << '\n';
                }
            }
            return failures == 0 ? 0 : 2;
        }
        if (points->parsed()) {
            std::ifstream in(points_in);
            if (!in) {
                throw std::invalid_argument("cannot open sweep CSV: " + points_in);
            }
            const auto cells = oprisk::read_sweep_csv(in);
            std::ostream* out = &std::cout;
            std::ofstream file;
            if (!points_out.empty()) {
                file.open(points_out, std::ios::binary);
                if (!file) {
                    throw std::invalid_argument("cannot open output file: " + points_out);
                }
                out = &file;
            }
            auto emit = [&](double v) {
                char buf[40];
                std::snprintf(buf, sizeof(buf), "%.17g", v);
                (*out) << buf;
            };
            (*out) << "alpha,lambda,policy,equality_status,equality_tcl,optimum_status,"
                      "optimum_tcl,optimum_pct_var_mit\n";
            for (const auto& row : oprisk::group_rows(cells)) {
                const auto eq = oprisk::risk_equality_point(row);
                const auto op = oprisk::optimum_insurance_point(row);
                auto status = [](oprisk::CrossingPoint::Status s) {
                    switch (s) {
                        case oprisk::CrossingPoint::Status::kFound: return "found";
                        case oprisk::CrossingPoint::Status::kDegenerate: return "degenerate";
                        default: return "none";
                    }
                };
                emit(row.front().alpha);
                (*out) << ',';
                emit(row.front().lambda);
                (*out) << ',' << row.front().policy << ',' << status(eq.status) << ',';
                emit(eq.status == oprisk::CrossingPoint::Status::kFound ? eq.tcl : 0.0);
                (*out) << ',' << status(op.status) << ',';
                emit(op.status == oprisk::CrossingPoint::Status::kFound ? op.tcl : 0.0);
                (*out) << ',';
                emit(op.status == oprisk::CrossingPoint::Status::kFound ? op.value : 0.0);
                (*out) << '\n';
            }
            return 0;
        }
    } catch (const std::invalid_argument& ex) {
        std::cerr << "config error: " << ex.what() << '\n';
        return 1;
    } catch (const std::exception& ex) {
        std::cerr << "numeric failure: " << ex.what() << '\n';
        return 2;
    }
    return 0;
}
