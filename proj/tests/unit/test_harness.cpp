#include "hetnet/config.hpp"
#include "hetnet/errors.hpp"
#include "hetnet/harness.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace hetnet;

namespace {

SimConfig grid_cfg(std::vector<std::string> overrides = {})
{
    return parse_config_text(fig2_default_text(), overrides);
}

SimConfig disc_cfg(std::vector<std::string> overrides = {})
{
    return parse_config_text(fig3_default_text(), overrides);
}

PowerState with_support(std::vector<bool> supported)
{
    PowerState st;
    st.supported = std::move(supported);
    return st;
}

}  // namespace

TEST_CASE("outage ratio counts the tier")
{
    const std::vector<Priority> high(5, Priority::high);
    CHECK(outage_ratio(with_support(std::vector<bool>(5, true)), high, Priority::high) == 0.0);

    const std::vector<Priority> low(4, Priority::low);
    CHECK(outage_ratio(with_support({true, false, true, true}), low, Priority::low) == 0.25);

    // Empty tier: absent, not zero.
    CHECK_FALSE(outage_ratio(with_support({true, true}), {Priority::low, Priority::low}, Priority::high).has_value());
    CHECK(outage_ratio(with_support({true, false}), {Priority::low, Priority::high}, std::nullopt) == 0.5);
}

TEST_CASE("outage on the infeasible toy is total")
{
    Eigen::MatrixXd g(2, 2);
    g << 1.0, 2.0, 2.0, 1.0;
    const LinkSystem sys = make_paired_system(g, Eigen::VectorXd::Constant(2, 0.1), Eigen::VectorXd::Ones(2),
                                              Eigen::VectorXd::Constant(2, 10.0), Eigen::VectorXd::Constant(2, 0.01));
    const PowerState st = run_power_control(Algorithm::tpc, sys);
    CHECK(outage_ratio(st, sys.priority, std::nullopt) == 1.0);
}

TEST_CASE("throughput metrics")
{
    CHECK(shannon_rate(1.0) == 1.0);
    CHECK(shannon_rate(0.0) == 0.0);

    Eigen::VectorXd sir(1);
    sir << 3.0;
    Eigen::VectorXd access(1);
    access << 0.25;
    const Throughput t = throughput_metrics(sir, access);
    CHECK(t.aggregate == doctest::Approx(2.0));
    CHECK(t.spectral_efficiency == doctest::Approx(0.5));

    Eigen::VectorXd two(2);
    two << 1.0, 3.0;
    const Throughput u = throughput_metrics(two, Eigen::VectorXd::Ones(2));
    CHECK(u.aggregate == doctest::Approx(3.0));
    CHECK(u.spectral_efficiency == doctest::Approx(1.5));

    CHECK_THROWS_AS(throughput_metrics(two, access), InvalidParameter);
}

TEST_CASE("run_snapshot is deterministic")
{
    const SimConfig cfg = grid_cfg();
    for (Algorithm a : {Algorithm::tpc, Algorithm::ptpc_gr, Algorithm::dtpc, Algorithm::popc})
    {
        const RunCase run{a, Scheme::home};
        CHECK(run_snapshot(cfg, 4, 12, run) == run_snapshot(cfg, 4, 12, run));
    }
    const SimConfig disc = disc_cfg();
    CHECK(run_snapshot(disc, 10, 3) == run_snapshot(disc, 10, 3));
}

TEST_CASE("prioritized grid snapshot keeps HPUEs supported")
{
    const SimConfig cfg = grid_cfg();
    for (std::uint64_t seed = 1; seed <= 10; ++seed)
    {
        const SnapshotResult r = run_snapshot(cfg, 3, seed, {Algorithm::ptpc, Scheme::home});
        CHECK(r.hpue_outage == 0.0);
        REQUIRE(r.protection_ratio.has_value());
        CHECK(*r.protection_ratio <= 1.0 + 1e-12);
        CHECK(r.converged);
    }
}

TEST_CASE("every prioritized algorithm and mode respects the threshold")
{
    for (const char* mode : {"static", "backoff"})
    {
        const SimConfig cfg = grid_cfg({std::string("pc.prioritized_mode=") + mode});
        for (Algorithm a : {Algorithm::ptpc, Algorithm::ptpc_gr, Algorithm::popc})
        {
            for (std::uint64_t seed = 1; seed <= 3; ++seed)
            {
                // run_snapshot throws NumericError on a violation.
                const SnapshotResult r = run_snapshot(cfg, 6, seed, {a, Scheme::home});
                if (r.converged)
                    CHECK(*r.protection_ratio <= 1.0 + 1e-12);
            }
        }
    }
}

TEST_CASE("downlink snapshots need the fixed-budget algorithm")
{
    const SimConfig cfg = disc_cfg();
    CHECK_THROWS_AS(run_snapshot(cfg, 5, 1, {Algorithm::tpc, Scheme::hybrid}), InvalidParameter);
}

TEST_CASE("snapshot errors carry the seed")
{
    const SimConfig cfg = grid_cfg({"sweep.n_small=64"});
    try
    {
        run_snapshot(cfg, 64, 77, {Algorithm::tpc, Scheme::home});
        FAIL("expected GenerationError");
    }
    catch (const GenerationError& e)
    {
        CHECK(std::string(e.what()).find("snapshot seed 77") != std::string::npos);
    }
    RunPlan plan;
    plan.cases = {{Algorithm::tpc, Scheme::home}};
    plan.sweep = {64};
    plan.snapshots = 2;
    plan.base_seed = 5;
    CHECK_THROWS_AS(run_monte_carlo(cfg, plan), GenerationError);
}

TEST_CASE("monte carlo rows, seeds and counts")
{
    const SimConfig cfg = grid_cfg({"mc.snapshots=4", "mc.base_seed=40"});
    const MetricsReport rep = experiment_fig2(cfg);
    CHECK(rep.experiment == "fig2");
    REQUIRE(rep.rows.size() == 16);
    for (const auto& row : rep.rows)
    {
        CHECK(row.seed_count == 4);
        CHECK(row.seeds == std::vector<std::uint64_t>{40, 41, 42, 43});
        CHECK(row.hpue_outage.has_value());
        CHECK(row.lpue_outage.has_value());
        CHECK(*row.hpue_outage >= 0.0);
        CHECK(*row.hpue_outage <= 1.0);
        CHECK(*row.lpue_outage >= 0.0);
        CHECK(*row.lpue_outage <= 1.0);
        CHECK(row.convergence_rate >= 0.0);
        CHECK(row.convergence_rate <= 1.0);
        CHECK(row.direction == Direction::uplink);
    }
    CHECK(rep.rows[0].sweep_value == 3);
    CHECK(rep.rows[0].run.algorithm == Algorithm::tpc);
    CHECK(rep.rows[3].run.algorithm == Algorithm::ptpc_gr);
    CHECK(rep.rows[15].sweep_value == 6);

    CHECK_THROWS_AS(experiment_fig3(cfg), ConfigError);
    CHECK_THROWS_AS(experiment_fig2(disc_cfg()), ConfigError);
}

TEST_CASE("report does not depend on the number of threads")
{
    const SimConfig cfg = grid_cfg({"mc.snapshots=6"});
    const MetricsReport one = experiment_fig2(cfg, 1);
    CHECK(experiment_fig2(cfg, 3) == one);
    CHECK(experiment_fig2(cfg, 8) == one);
}

TEST_CASE("aggregation is order-independent up to rounding")
{
    const SimConfig cfg = grid_cfg();
    const RunCase run{Algorithm::tpc, Scheme::home};
    std::vector<SnapshotResult> results;
    for (std::uint64_t s = 1; s <= 12; ++s)
        results.push_back(run_snapshot(cfg, 3, s, run));
    const MetricsRow a = aggregate("x", 3, run, Direction::uplink, results);
    std::mt19937 shuffle_rng(4);
    std::shuffle(results.begin(), results.end(), shuffle_rng);
    const MetricsRow b = aggregate("x", 3, run, Direction::uplink, results);
    CHECK(*b.lpue_outage == doctest::Approx(*a.lpue_outage).epsilon(1e-14));
    CHECK(*b.hpue_outage == doctest::Approx(*a.hpue_outage).epsilon(1e-14));
    CHECK(b.agg_power == doctest::Approx(a.agg_power).epsilon(1e-14));
    CHECK(b.agg_throughput == doctest::Approx(a.agg_throughput).epsilon(1e-14));
}

TEST_CASE("outage standard error shrinks as one over root n")
{
    // stderr(k n) / stderr(n) = 1 / sqrt(k); checked within 30%.
    const SimConfig cfg = grid_cfg({"target_sir_db=-6"});
    RunPlan plan;
    plan.cases = {{Algorithm::tpc, Scheme::home}};
    plan.sweep = {3};
    auto stderr_at = [&](int snapshots, std::uint64_t base) {
        plan.snapshots = snapshots;
        plan.base_seed = base;
        return *run_monte_carlo(cfg, plan).rows.front().lpue_outage_stderr;
    };
    const double s1 = stderr_at(25, 1000);
    const double s2 = stderr_at(50, 2000);
    const double s4 = stderr_at(100, 3000);
    CHECK(s2 / s1 == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(0.3));
    CHECK(s4 / s1 == doctest::Approx(0.5).epsilon(0.3));
}

TEST_CASE("TPC LPUE outage does not fall with densification beyond noise")
{
    const SimConfig cfg = grid_cfg();
    RunPlan plan;
    plan.cases = {{Algorithm::tpc, Scheme::home}};
    plan.sweep = {3, 4, 5, 6};
    plan.snapshots = cfg.snapshots;
    plan.base_seed = cfg.base_seed;
    const MetricsReport rep = run_monte_carlo(cfg, plan);
    for (std::size_t i = 1; i < rep.rows.size(); ++i)
    {
        const auto& prev = rep.rows[i - 1];
        const auto& cur = rep.rows[i];
        const double noise = std::hypot(*prev.lpue_outage_stderr, *cur.lpue_outage_stderr);
        CHECK(*cur.lpue_outage >= *prev.lpue_outage - 2.0 * noise);
    }
    const auto& first = rep.rows.front();
    const auto& last = rep.rows.back();
    CHECK(*last.lpue_outage >= *first.lpue_outage - 2.0 * std::hypot(*first.lpue_outage_stderr, *last.lpue_outage_stderr));
    // HPUEs see every added small cell, so their outage climbs clearly.
    CHECK(*last.hpue_outage > *first.hpue_outage);
}

TEST_CASE("fig3 schemes coincide without small cells")
{
    const SimConfig cfg = disc_cfg({"sweep.n_small=0", "mc.snapshots=20"});
    const MetricsReport rep = experiment_fig3(cfg);
    REQUIRE(rep.rows.size() == 3);
    CHECK(rep.rows[1].spectral_eff == rep.rows[0].spectral_eff);
    CHECK(rep.rows[2].spectral_eff == rep.rows[0].spectral_eff);
    CHECK_FALSE(rep.rows[0].hpue_outage.has_value());
}

TEST_CASE("fig3 hybrid is at least as good as resource per snapshot")
{
    const SimConfig cfg = disc_cfg();
    for (int n : {5, 10, 20, 40})
    {
        double hybrid = 0.0;
        double resource = 0.0;
        for (std::uint64_t s = 1; s <= 50; ++s)
        {
            hybrid += run_snapshot(cfg, n, s, {Algorithm::none, Scheme::hybrid}).spectral_eff;
            resource += run_snapshot(cfg, n, s, {Algorithm::none, Scheme::resource}).spectral_eff;
        }
        CHECK(hybrid >= resource);
    }
}

TEST_CASE("joint CAPC converges and stays stable")
{
    const SimConfig cfg = grid_cfg({"target_sir_db=-12"});
    for (std::uint64_t seed = 1; seed <= 5; ++seed)
    {
        const SnapshotResult r = run_snapshot(cfg, 3, seed, {Algorithm::tpc, Scheme::mei});
        CHECK(r.converged);
        const SnapshotResult m = run_snapshot(cfg, 3, seed, {Algorithm::tpc, Scheme::mei_multi});
        CHECK(m.converged);
        CHECK(m.split_throughput > 0.0);
    }
}
