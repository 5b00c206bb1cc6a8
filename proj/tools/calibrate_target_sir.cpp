// Calibrates the common target SIR (dB) for the uplink outage experiment.
//
// Two searches, both by bisection:
//   band: plain-TPC LPUE outage at the calibration point lands in [lo, hi];
//   edge: highest target at which prioritized TPC leaves every HPUE supported
//         at every sweep point (the HPUE tier is co-channel, so above some
//         target it is infeasible on its own and no LPUE cap can help).
// The recommended value is the lower of the band value and the edge less a
// margin, rounded down to the step.
//
//   calibrate-target-sir [--config f.ini] [--set key=value]... [--n 3] [--seeds 20]

#include "hetnet/config.hpp"
#include "hetnet/errors.hpp"
#include "hetnet/harness.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

hetnet::MetricsReport run(hetnet::SimConfig cfg, double target_db, hetnet::Algorithm alg, std::vector<int> sweep,
                          int seeds, int jobs)
{
    cfg.target_sir_db = target_db;
    hetnet::RunPlan plan;
    plan.experiment = "calibrate";
    plan.cases = {{alg, cfg.assoc_uplink}};
    plan.sweep = std::move(sweep);
    plan.snapshots = seeds;
    plan.base_seed = cfg.base_seed;
    return hetnet::run_monte_carlo(cfg, plan, jobs);
}

std::optional<double> band_search(const hetnet::SimConfig& cfg, int n, int seeds, int jobs, double lo, double hi,
                                  double a, double b)
{
    for (int step = 0; step < 40; ++step)
    {
        const double mid = 0.5 * (a + b);
        const auto report = run(cfg, mid, hetnet::Algorithm::tpc, {n}, seeds, jobs);
        const double out = report.rows.front().lpue_outage.value_or(0.0);
        std::cout << fmt::format("band  target_sir_db = {:8.4f}  tpc lpue_outage = {:.4f}\n", mid, out);
        if (out >= lo && out <= hi)
            return mid;
        (out < lo ? a : b) = mid;
    }
    return std::nullopt;
}

double worst_hpue_outage(const hetnet::SimConfig& cfg, double target_db, int jobs)
{
    const auto report = run(cfg, target_db, hetnet::Algorithm::ptpc, cfg.sweep_n_small, cfg.snapshots, jobs);
    double worst = 0.0;
    for (const auto& r : report.rows)
        worst = std::max(worst, r.hpue_outage.value_or(0.0));
    return worst;
}

double edge_search(const hetnet::SimConfig& cfg, int jobs, double a, double b, double resolution)
{
    // Invariant: HPUEs fully protected at a, not at b.
    while (b - a > resolution)
    {
        const double mid = 0.5 * (a + b);
        const double out = worst_hpue_outage(cfg, mid, jobs);
        std::cout << fmt::format("edge  target_sir_db = {:8.4f}  ptpc hpue_outage = {:.4f}\n", mid, out);
        (out == 0.0 ? a : b) = mid;
    }
    return a;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Calibrate the common target SIR of the uplink outage experiment"};
    std::string config;
    std::vector<std::string> overrides;
    int n = 3;
    int seeds = 20;
    int jobs = 1;
    double lo = 0.05;
    double hi = 0.3;
    double db_lo = -30.0;
    double db_hi = 30.0;
    double margin = 0.5;
    double step = 0.5;
    app.add_option("--config", config, "Config file (defaults to the built-in fig2 preset)");
    app.add_option("--set", overrides, "Override a config key (key=value), repeatable");
    app.add_option("--n", n, "Small cells per macro at the calibration point");
    app.add_option("--seeds", seeds, "Snapshots per band evaluation");
    app.add_option("--jobs", jobs, "Worker threads");
    app.add_option("--band-lo", lo, "Lower end of the outage band");
    app.add_option("--band-hi", hi, "Upper end of the outage band");
    app.add_option("--db-lo", db_lo, "Search range lower end (dB)");
    app.add_option("--db-hi", db_hi, "Search range upper end (dB)");
    app.add_option("--margin", margin, "Distance kept below the protection edge (dB)");
    app.add_option("--step", step, "Rounding step of the recommendation (dB)");
    CLI11_PARSE(app, argc, argv);

    try
    {
        const hetnet::SimConfig cfg = config.empty() ? hetnet::parse_config_text(hetnet::fig2_default_text(), overrides)
                                                     : hetnet::parse_config(config, overrides);
        const auto band = band_search(cfg, n, seeds, jobs, lo, hi, db_lo, db_hi);
        if (band)
            std::cout << fmt::format("band value: {:.2f} dB\n", *band);
        else
            std::cout << "band value: none in range\n";

        if (worst_hpue_outage(cfg, db_lo, jobs) != 0.0)
        {
            std::cerr << "HPUEs are not protected even at the bottom of the search range\n";
            return 1;
        }
        const double edge = edge_search(cfg, jobs, db_lo, db_hi, 0.05);
        std::cout << fmt::format("protection edge: {:.2f} dB\n", edge);

        double pick = edge - margin;
        if (band)
            pick = std::min(pick, *band);
        pick = step * std::floor(pick / step);
        std::cout << fmt::format("recommended target_sir_db = {}\n", pick);
        return 0;
    }
    catch (const hetnet::Error& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
