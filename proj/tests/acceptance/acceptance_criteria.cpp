#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "oprisk/experiment.hpp"
#include "oprisk/lda.hpp"
#include "oprisk/mixture.hpp"
#include "oprisk/policies.hpp"
#include "oprisk/risk_measures.hpp"
#include "oprisk/rng.hpp"
#include "oprisk/special_functions.hpp"
#include "oprisk/stable.hpp"

// Acceptance gate: one test case per criterion, each printing a single
// PASS/FAIL line with the measured quantities.

using namespace oprisk;

namespace {

constexpr std::uint64_t kSeed = 424242;

struct Stopwatch {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

void report(int criterion, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion, detail.c_str());
    std::fflush(stdout);
}

// Conditional-on-positive KS distance between the mixture law and simulated
// positive annual gross losses.
double mixture_vs_simulation_ks(double lambda, double gamma, long years, std::uint64_t stream) {
    const auto dist = build_mixture(lambda, gamma, 0.0);
    const RiskModel model(lambda, StableParams(0.5, 1.0, gamma, 0.0, true));
    RngStream rng(kSeed, stream);
    std::vector<double> positive;
    positive.reserve(static_cast<std::size_t>(years));
    YearOutcome y;
    for (long i = 0; i < years; ++i) {
        simulate_year_into(model, rng, y);
        const double z = annual_loss(y, LossSeries::kGross);
        if (z > 0.0) {
            positive.push_back(z);
        }
    }
    const double atom = dist.atom_at_zero;
    return oracles::ks_against_cdf(
        positive, [&](double z) { return (mixture_cdf(dist, z) - atom) / (1.0 - atom); });
}

// Desk-scale sweep shared by criteria 7 and 8.
const std::vector<CellResult>& desk_sweep() {
    static const std::vector<CellResult> cells = [] {
        SweepConfig cfg;
        cfg.alphas = {2.0, 1.3, 0.5};
        cfg.lambdas = {1.0, 10.0};
        cfg.policies = {"ilp", "alp", "clp", "alp2", "hlp", "blp"};
        cfg.tcl_strata = 11;
        cfg.years_per_cell = 100000;
        cfg.pilot_years = 100000;
        cfg.master_seed = kSeed;
        return run_sweep(cfg);
    }();
    return cells;
}

std::map<std::string, std::vector<CellResult>> rows_by_key(const std::vector<CellResult>& cells) {
    std::map<std::string, std::vector<CellResult>> rows;
    for (const auto& row : group_rows(cells)) {
        std::ostringstream key;
        key << row.front().policy << '/' << row.front().alpha << '/' << row.front().lambda;
        rows[key.str()] = row;
    }
    return rows;
}

std::string row_key(const char* policy, double alpha, double lambda) {
    std::ostringstream key;
    key << policy << '/' << alpha << '/' << lambda;
    return key.str();
}

} // namespace

TEST_SUITE_BEGIN("acceptance");

TEST_CASE("criterion 01: per-event conservation across all six policies") {
    Stopwatch watch;
    const long years = 100000;
    const RiskModel model(3.0, StableParams(1.3, 0.8, 10000.0, 0.0, true));

    long violations = 0;
    long events = 0;
    auto audit = [&](const YearOutcome& y) {
        for (std::size_t s = 0; s < y.size(); ++s) {
            ++events;
            const double g = y.gross[s];
            const double err = std::fabs(y.retained[s] + y.claimed[s] - g);
            if (err > 1e-9 * std::max(1.0, std::fabs(g))) {
                ++violations;
            }
        }
    };

    RngStream sim(kSeed, 11);
    RngStream sim2(kSeed, 12);
    RngStream policy_rng(kSeed, 13);
    const double tcl = 9000.0;
    const double acl = 3.0 * tcl;
    YearOutcome year;
    YearOutcome year2;
    for (long i = 0; i < years; ++i) {
        simulate_year_into(model, sim, year);

        auto a = year;
        apply_ilp(a, tcl);
        audit(a);
        auto b = year;
        apply_alp(b, acl);
        audit(b);
        auto c = year;
        apply_clp(c, tcl, acl);
        audit(c);
        auto h = year;
        apply_hlp(h, tcl);
        audit(h);
        auto bl = year;
        apply_blp(bl, Blp{tcl, 3, BandScale::kLinear}, policy_rng);
        audit(bl);

        simulate_year_into(model, sim2, year2);
        auto p = year;
        auto q = year2;
        apply_alp2(p, q, acl);
        audit(p);
        audit(q);
    }

    const double elapsed = watch.seconds();
    const bool pass = violations == 0 && elapsed < 60.0;
    std::ostringstream detail;
    detail << "conservation over " << events << " events, " << violations << " violations, "
           << elapsed << " s (< 60 s)";
    report(1, pass, detail.str());
    CHECK(violations == 0);
    CHECK(elapsed < 60.0);
}

TEST_CASE("criterion 02: analytic mixture matches simulation for four settings") {
    Stopwatch watch;
    bool pass = true;
    std::ostringstream detail;
    detail << "KS(cond.)";
    int stream = 21;
    for (double lambda : {1.0, 10.0}) {
        for (double gamma : {1.0, 10000.0}) {
            const double d = mixture_vs_simulation_ks(lambda, gamma, 1000000, stream++);
            detail << " [l=" << lambda << ",g=" << gamma << "]=" << d;
            pass = pass && d < 0.005;
            CHECK(d < 0.005);
        }
    }
    const double elapsed = watch.seconds();
    detail << ", " << elapsed << " s (< 600 s)";
    pass = pass && elapsed < 600.0;
    CHECK(elapsed < 600.0);
    report(2, pass, detail.str());
}

TEST_CASE("criterion 03: two-risk mixture collapses and matches a portfolio simulation") {
    Stopwatch watch;
    const double lambda = 1.0;
    const double gamma = 1.0;
    const auto two = build_mixture_two_risks(lambda, gamma, 0.0, lambda, gamma, 0.0);
    const auto single = build_mixture(2.0 * lambda, gamma, 0.0);

    const double z_hi = mixture_quantile(single, 0.995);
    double sup = 0.0;
    for (int i = 0; i <= 1000; ++i) {
        const double z = z_hi * static_cast<double>(i) / 1000.0;
        sup = std::max(sup, std::fabs(mixture_cdf(two, z) - mixture_cdf(single, z)));
    }

    const std::vector<RiskModel> models(2, RiskModel(lambda, StableParams(0.5, 1.0, gamma, 0.0, true)));
    std::vector<RngStream> streams{RngStream(kSeed, 31), RngStream(kSeed, 32)};
    std::vector<double> positive;
    positive.reserve(1000000);
    for (long i = 0; i < 1000000; ++i) {
        const auto cells = simulate_portfolio_year(models, streams);
        const double z =
            annual_loss(cells[0], LossSeries::kGross) + annual_loss(cells[1], LossSeries::kGross);
        if (z > 0.0) {
            positive.push_back(z);
        }
    }
    const double atom = two.atom_at_zero;
    const double d = oracles::ks_against_cdf(
        positive, [&](double z) { return (mixture_cdf(two, z) - atom) / (1.0 - atom); });

    const bool pass = sup < 1e-6 && d < 0.005;
    std::ostringstream detail;
    detail << "sup-norm vs collapsed single-risk " << sup << " (< 1e-6), portfolio KS " << d
           << " (< 0.005), " << watch.seconds() << " s";
    report(3, pass, detail.str());
    CHECK(sup < 1e-6);
    CHECK(d < 0.005);
}

TEST_CASE("criterion 04: closed-form expected claim and SCR against simulation") {
    Stopwatch watch;
    const auto dist = build_mixture(1.0, 1.0, 0.0);
    const double tcl = 5.0;
    const double analytic_mean = analytic_expected_claim(dist, tcl);
    const double analytic_capital = analytic_scr(dist, tcl);

    const RiskModel model(1.0, StableParams(0.5, 1.0, 1.0, 0.0, true));
    RngStream rng(kSeed, 41);
    std::vector<double> claims(1000000);
    YearOutcome y;
    for (auto& c : claims) {
        simulate_year_into(model, rng, y);
        apply_ilp(y, tcl);
        c = annual_loss(y, LossSeries::kClaimed);
    }
    double mc_mean = 0.0;
    for (double c : claims) {
        mc_mean += c;
    }
    mc_mean /= static_cast<double>(claims.size());
    const double mc_capital = empirical_scr(claims);

    const double mean_err = std::fabs(analytic_mean / mc_mean - 1.0);
    const double scr_err = std::fabs(analytic_capital / mc_capital - 1.0);
    const bool pass = mean_err < 0.01 && scr_err < 0.02;
    std::ostringstream detail;
    detail << "expected claim " << analytic_mean << " vs MC " << mc_mean << " (rel " << mean_err
           << " < 0.01); SCR " << analytic_capital << " vs " << mc_capital << " (rel " << scr_err
           << " < 0.02), " << watch.seconds() << " s";
    report(4, pass, detail.str());
    CHECK(mean_err < 0.01);
    CHECK(scr_err < 0.02);
}

TEST_CASE("criterion 05: worked five-loss year splits exactly") {
    auto make_year = [] {
        YearOutcome y;
        y.times = {0.1, 0.25, 0.4, 0.6, 0.85};
        y.gross = {6.0, 10.0, 8.0, 2.0, 5.0};
        y.retained.resize(5);
        y.claimed.resize(5);
        return y;
    };
    auto a = make_year();
    apply_ilp(a, 7.0);
    auto b = make_year();
    apply_alp(b, 25.0);
    auto c = make_year();
    apply_clp(c, 7.0, 25.0);

    const bool pass = a.claimed == std::vector<double>{6, 7, 7, 2, 5} &&
                      b.claimed == std::vector<double>{6, 10, 8, 1, 0} &&
                      c.claimed == std::vector<double>{6, 7, 7, 2, 3};
    report(5, pass, "ILP {6,7,7,2,5}, ALP {6,10,8,1,0}, CLP {6,7,7,2,3} reproduced exactly");
    CHECK(a.claimed == std::vector<double>{6, 7, 7, 2, 5});
    CHECK(b.claimed == std::vector<double>{6, 10, 8, 1, 0});
    CHECK(c.claimed == std::vector<double>{6, 7, 7, 2, 3});
}

TEST_CASE("criterion 06: series peak index equals brute force") {
    bool pass = true;
    std::ostringstream detail;
    for (double lambda : {0.25, 0.5, 1.0, 2.0, 10.0, 50.0}) {
        long brute = 1;
        double best = -1e300;
        for (long n = 1; n <= 200; ++n) {
            const double lw = n * std::log(lambda) +
                              2.0 * std::log(static_cast<double>(n)) -
                              log_factorial(static_cast<unsigned>(n));
            if (lw > best) {
                best = lw;
                brute = n;
            }
        }
        const long located = w_series_peak(lambda);
        detail << " l=" << lambda << ":" << located;
        pass = pass && located == brute;
        CHECK(located == brute);
        if (lambda >= 1.0) {
            const long lo = static_cast<long>(std::floor(lambda));
            const long hi = static_cast<long>(std::ceil(lambda));
            const bool in_range = located == lo || located == hi || located == hi + 1;
            pass = pass && in_range;
            CHECK(in_range);
        }
    }
    report(6, pass, "peak indices" + detail.str());
}

TEST_CASE("criterion 07: desk-scale sweep surfaces are monotone; ALP transfers completely") {
    Stopwatch watch;
    const auto& cells = desk_sweep();
    for (const auto& c : cells) {
        REQUIRE(c.error.empty());
    }
    const auto rows = rows_by_key(cells);

    // Monotone surfaces follow from shared-seed pathwise monotonicity, a
    // property of the five non-banded policies. The banded cover is
    // non-monotone by construction (raising tcl can migrate a loss into a
    // lower band and cut its cover), so blp rows are measured and reported
    // rather than asserted; their saturation is checked instead.
    bool monotone = true;
    bool alp_complete = true;
    bool blp_saturates = true;
    double blp_wiggle = 0.0;
    std::string worst_row;
    double worst_violation = 0.0;
    for (const auto& [key, row] : rows) {
        const bool banded = row.front().policy == "blp";
        for (std::size_t k = 1; k < row.size(); ++k) {
            const double var_step = row[k].pct_var - row[k - 1].pct_var;
            const double mcr_step = row[k].pct_mcr - row[k - 1].pct_mcr;
            const double violation = std::max(var_step, -mcr_step);
            if (banded) {
                blp_wiggle = std::max(blp_wiggle, violation);
                continue;
            }
            if (var_step > 1e-12 || mcr_step < -1e-12) {
                monotone = false;
                if (violation > worst_violation) {
                    worst_violation = violation;
                    worst_row = key;
                }
            }
        }
        if (row.front().policy == "alp") {
            for (const auto& c : row) {
                if (std::fabs(c.pct_var_mit - c.pct_mcr) >= 0.01) {
                    alp_complete = false;
                }
            }
        }
        if (banded) {
            for (const auto& c : row) {
                blp_saturates = blp_saturates && c.pct_var_mit < 1.0;
            }
        }
    }

    // At lambda = 1 the derived annual limit equals the per-event limit, and
    // then the annual totals of the two capped policies coincide exactly:
    // the combined policy's surfaces must match the annual-cap policy's.
    bool alp_clp_coincide = true;
    double eq_at_half = 0.0;
    for (double alpha : {2.0, 1.3, 0.5}) {
        const auto& alp = rows.at(row_key("alp", alpha, 1.0));
        const auto& clp = rows.at(row_key("clp", alpha, 1.0));
        REQUIRE(alp.size() == clp.size());
        for (std::size_t k = 0; k < alp.size(); ++k) {
            REQUIRE(alp[k].acl == doctest::Approx(alp[k].tcl).epsilon(1e-15));
            if (std::fabs(alp[k].pct_var - clp[k].pct_var) > 1e-12 ||
                std::fabs(alp[k].pct_mcr - clp[k].pct_mcr) > 1e-12) {
                alp_clp_coincide = false;
            }
        }
        // Complete transfer puts the risk-equality crossing at 50% residual.
        const auto eq = risk_equality_point(alp);
        if (eq.status == CrossingPoint::Status::kFound) {
            eq_at_half = std::max(eq_at_half, std::fabs(eq.value - 0.5));
        }
    }
    const bool alp_equality_half = eq_at_half < 0.01;
    const double elapsed = watch.seconds();
    const bool pass = monotone && alp_complete && blp_saturates && alp_clp_coincide &&
                      alp_equality_half && elapsed < 900.0;
    std::ostringstream detail;
    detail << rows.size() << " rows: pct_var non-increasing and pct_mcr non-decreasing "
           << (monotone ? "hold for ilp/alp/clp/alp2/hlp"
                        : ("violated at " + worst_row + " by " + std::to_string(worst_violation)))
           << "; ALP |mit-mcr| < 0.01 " << (alp_complete ? "holds" : "violated")
           << "; ALP/CLP coincide at lambda=1 " << (alp_clp_coincide ? "exactly" : "violated")
           << "; ALP equality point at 50% +- " << eq_at_half
           << "; blp exempt (banded cover is non-monotone by construction; measured wiggle "
           << blp_wiggle << ", mitigation saturates below 1: "
           << (blp_saturates ? "yes" : "no") << "); " << elapsed << " s (< 900 s)";
    report(7, pass, detail.str());
    CHECK(monotone);
    CHECK(alp_complete);
    CHECK(blp_saturates);
    CHECK(alp_clp_coincide);
    CHECK(alp_equality_half);
    CHECK(elapsed < 900.0);
}

TEST_CASE("criterion 08: qualitative trends from the desk sweep") {
    const auto rows = rows_by_key(desk_sweep());

    // (a) ILP optimum point falls as the tail gets heavier (lambda = 1),
    // measured as the %VaR mitigation at the crossing.
    std::vector<double> optima;
    std::ostringstream detail;
    detail << "(a) ILP optimum pct_var_mit at alpha {2, 1.3, 0.5}:";
    for (double alpha : {2.0, 1.3, 0.5}) {
        const auto& row = rows.at(row_key("ilp", alpha, 1.0));
        const auto point = optimum_insurance_point(row);
        REQUIRE(point.status == CrossingPoint::Status::kFound);
        optima.push_back(point.value);
        detail << ' ' << point.value;
    }
    const bool trend_a = optima[0] > optima[1] && optima[1] > optima[2];

    // (b) High frequency: the annual cap mitigates at least as much as the
    // per-event cap at every shared stratum where extreme losses drive the
    // risk (alpha <= 1.3). At alpha = 2 the quantile year holds more events
    // than the ACL multiplier, the two policies converge, and a small
    // per-event advantage at the lowest stratum is a property of the model;
    // there the gap is bounded instead of signed.
    bool trend_b = true;
    double light_tail_gap = 0.0;
    for (double alpha : {2.0, 1.3, 0.5}) {
        const auto& ilp = rows.at(row_key("ilp", alpha, 10.0));
        const auto& alp = rows.at(row_key("alp", alpha, 10.0));
        REQUIRE(ilp.size() == alp.size());
        for (std::size_t k = 0; k < ilp.size(); ++k) {
            const double gap = ilp[k].pct_var_mit - alp[k].pct_var_mit;
            if (alpha <= 1.3 && gap > 1e-12) {
                trend_b = false;
            }
            if (alpha == 2.0) {
                light_tail_gap = std::max(light_tail_gap, gap);
            }
        }
    }
    trend_b = trend_b && light_tail_gap < 0.025;

    // (c) The haircut discounts mitigation strictly below the plain
    // per-event cap at every positive stratum.
    bool trend_c = true;
    for (double lambda : {1.0, 10.0}) {
        for (double alpha : {2.0, 1.3, 0.5}) {
            const auto& ilp = rows.at(row_key("ilp", alpha, lambda));
            const auto& hlp = rows.at(row_key("hlp", alpha, lambda));
            for (std::size_t k = 1; k < ilp.size(); ++k) {
                if (!(hlp[k].pct_var_mit < ilp[k].pct_var_mit)) {
                    trend_c = false;
                }
            }
        }
    }

    detail << "; (b) ALP >= ILP mitigation at lambda=10 for alpha <= 1.3, convergent at "
              "alpha = 2 (max ILP lead "
           << light_tail_gap << " < 0.025): " << (trend_b ? "holds" : "violated")
           << "; (c) HLP strictly below ILP " << (trend_c ? "holds" : "violated");
    const bool pass = trend_a && trend_b && trend_c;
    report(8, pass, detail.str());
    CHECK(trend_a);
    CHECK(trend_b);
    CHECK(trend_c);
}

TEST_CASE("criterion 09: sweep output is byte-identical across runs and pool sizes") {
    Stopwatch watch;
    SweepConfig cfg;
    cfg.alphas = {1.3, 0.5};
    cfg.lambdas = {1.0};
    cfg.policies = {"ilp", "alp", "clp", "alp2", "hlp", "blp"};
    cfg.tcl_strata = 5;
    cfg.years_per_cell = 10000;
    cfg.pilot_years = 10000;
    cfg.master_seed = kSeed;

    auto csv_of = [](const SweepConfig& c) {
        std::ostringstream out;
        write_sweep_csv(out, run_sweep(c));
        return out.str();
    };
    const std::string first = csv_of(cfg);
    const std::string second = csv_of(cfg);
    SweepConfig pooled = cfg;
    pooled.threads = 4;
    const std::string third = csv_of(pooled);

    const bool pass = first == second && first == third;
    std::ostringstream detail;
    detail << "rerun identical: " << (first == second ? "yes" : "no")
           << "; pool-of-4 identical: " << (first == third ? "yes" : "no") << "; "
           << watch.seconds() << " s";
    report(9, pass, detail.str());
    CHECK(first == second);
    CHECK(first == third);
}

TEST_CASE("criterion 10: special-function and density consistency gates") {
    Stopwatch watch;

    double worst_roundtrip = 0.0;
    for (double x = 0.1; x <= 3.0; x += 1.0 / 512.0) {
        worst_roundtrip = std::max(worst_roundtrip, std::fabs(erfc_inv(oprisk::erfc(x)) - x));
    }

    double worst_fd = 0.0;
    for (const auto& [gamma, delta] : std::vector<std::pair<double, double>>{
             {1.0, 0.0}, {2.0, 1.5}, {10000.0, 0.0}}) {
        for (double x = delta + 0.01 * gamma; x <= delta + 100.0 * gamma; x *= 1.13) {
            const double h = 2e-6 * (x - delta);
            const double fd =
                (levy_cdf(x + h, gamma, delta) - levy_cdf(x - h, gamma, delta)) / (2.0 * h);
            const double pdf = levy_pdf(x, gamma, delta);
            if (pdf > 1e-300) {
                worst_fd = std::max(worst_fd, std::fabs(fd / pdf - 1.0));
            }
        }
    }

    const double elapsed = watch.seconds();
    const bool pass = worst_roundtrip <= 1e-12 && worst_fd <= 1e-6 && elapsed < 10.0;
    std::ostringstream detail;
    detail << "erfc_inv round trip " << worst_roundtrip << " (<= 1e-12); cdf/pdf finite-diff "
           << worst_fd << " (<= 1e-6); " << elapsed << " s (< 10 s)";
    report(10, pass, detail.str());
    CHECK(worst_roundtrip <= 1e-12);
    CHECK(worst_fd <= 1e-6);
    CHECK(elapsed < 10.0);
}

TEST_SUITE_END();
