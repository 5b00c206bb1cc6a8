#include "hetnet/harness.hpp"

#include "hetnet/errors.hpp"
#include "hetnet/net_model.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

namespace hetnet {

namespace {

// Relative slack of the prioritized safety assertion.
constexpr double kSafetySlack = 1e-12;

bool is_mei(Scheme s) { return s == Scheme::mei || s == Scheme::mei_multi; }

AssociationMetric metric_for(const SimConfig& cfg, Scheme scheme)
{
    return AssociationMetric{scheme, cfg.bias_db, cfg.epsilon, cfg.scheduler};
}

template <typename E>
[[noreturn]] void rethrow_with_seed(const E& e, std::uint64_t seed, int n_small)
{
    std::ostringstream os;
    os << "snapshot seed " << seed << " (n_small=" << n_small << "): " << e.what();
    throw E(os.str());
}

// Rate with each user's traffic split equally over its serving set, every
// member link evaluated against the same transmit powers.
double split_throughput(const ScoringContext& ctx, const std::vector<ServingSet>& serving)
{
    double total = 0.0;
    const bool up = ctx.gains.direction == Direction::uplink;
    for (std::size_t i = 0; i < serving.size(); ++i)
    {
        const auto& set = serving[i];
        double sum = 0.0;
        for (int b : set.members)
        {
            const double r = effective_interference_via(ctx, static_cast<int>(i), b);
            const double p = up ? ctx.reference_powers(static_cast<Index>(i)) : ctx.reference_powers(b);
            sum += shannon_rate(p / r);
        }
        total += sum / static_cast<double>(set.members.size());
    }
    return total;
}

SnapshotResult run_uplink(const SimConfig& cfg, const NetworkSnapshot& snap, const GainMatrix& gains,
                          const RunCase& run, SnapshotResult res)
{
    const AssociationMetric metric = metric_for(cfg, run.scheme);
    AssociationMap assoc;
    PowerState st;
    LinkSystem sys;
    if (is_mei(run.scheme) && run.algorithm != Algorithm::none)
    {
        CapcResult capc = run_joint_capc(run.algorithm, snap, gains, metric, cfg.ith_w, cfg.pc_options(),
                                         cfg.capc_reassoc_every);
        assoc = std::move(capc.assoc);
        st = std::move(capc.state);
        sys = std::move(capc.system);
    }
    else
    {
        assoc = associate(ScoringContext(snap, gains, {}, access_probabilities(snap, cfg.scheduler)), metric);
        sys = make_link_system(snap, gains, assoc, cfg.ith_w);
        st = run_power_control(run.algorithm, sys, cfg.pc_options());
    }

    res.hpue_outage = outage_ratio(st, sys.priority, Priority::high);
    res.lpue_outage = outage_ratio(st, sys.priority, Priority::low);
    res.agg_power = st.p.sum();
    const Throughput thr = throughput_metrics(st.sir, Eigen::VectorXd::Ones(st.sir.size()));
    res.agg_throughput = thr.aggregate;
    res.spectral_eff = thr.spectral_efficiency;
    res.split_throughput = split_throughput(ScoringContext(snap, gains, st.p), assoc.uplink);
    res.converged = st.converged;
    res.iterations = st.iterations;

    if (is_prioritized(run.algorithm))
    {
        const Eigen::VectorXd load = lpue_interference(st.p, sys);
        double worst = 0.0;
        for (Index m = 0; m < sys.receivers(); ++m)
        {
            const double th = sys.protection(m);
            if (th <= 0.0)
                continue;
            worst = std::max(worst, load(m) / th);
            const bool asserted = cfg.pc_mode == PrioritizedMode::static_cap || st.converged;
            if (asserted && load(m) > th * (1.0 + kSafetySlack))
            {
                std::ostringstream os;
                os << "prioritized safety violated at BS " << m << ": LPUE interference " << load(m)
                   << " W exceeds threshold " << th << " W";
                throw NumericError(os.str());
            }
        }
        res.protection_ratio = worst;
    }
    return res;
}

SnapshotResult run_downlink(const SimConfig& cfg, const NetworkSnapshot& snap, const GainMatrix& gains,
                            const RunCase& run, SnapshotResult res)
{
    if (run.algorithm != Algorithm::none)
        throw InvalidParameter("downlink runs keep BSs at their budget; use algorithm 'none'");

    const Eigen::VectorXd access = access_probabilities(snap, cfg.scheduler);
    const ScoringContext ctx(snap, gains, {}, access);
    const AssociationMap assoc = associate(ctx, metric_for(cfg, run.scheme));

    const auto n = static_cast<Index>(snap.users.size());
    Eigen::VectorXd sir(n);
    Eigen::VectorXd weight(n);
    for (Index u = 0; u < n; ++u)
    {
        sir(u) = compute_sir(static_cast<int>(u), ctx.reference_powers, gains, assoc);
        weight(u) = access(assoc.downlink[static_cast<std::size_t>(u)].primary);
    }
    const Throughput thr = throughput_metrics(sir, weight);
    res.agg_power = ctx.reference_powers.sum();
    res.agg_throughput = thr.aggregate;
    res.spectral_eff = thr.spectral_efficiency;
    res.split_throughput = split_throughput(ctx, assoc.downlink);
    return res;
}

}  // namespace

std::optional<double> outage_ratio(const PowerState& state, const std::vector<Priority>& priorities,
                                   std::optional<Priority> tier)
{
    int members = 0;
    int short_of_target = 0;
    for (std::size_t i = 0; i < state.supported.size(); ++i)
    {
        if (tier && priorities.at(i) != *tier)
            continue;
        ++members;
        if (!state.supported[i])
            ++short_of_target;
    }
    if (members == 0)
        return std::nullopt;
    return static_cast<double>(short_of_target) / members;
}

Throughput throughput_metrics(const Eigen::VectorXd& sir, const Eigen::VectorXd& access)
{
    if (sir.size() != access.size())
        throw InvalidParameter("throughput_metrics: one access weight per user is required");
    Throughput t;
    for (Index i = 0; i < sir.size(); ++i)
    {
        const double rate = shannon_rate(sir(i));
        t.aggregate += rate;
        t.spectral_efficiency += access(i) * rate;
    }
    if (sir.size() > 0)
        t.spectral_efficiency /= static_cast<double>(sir.size());
    return t;
}

CapcResult run_joint_capc(Algorithm alg, const NetworkSnapshot& snapshot, const GainMatrix& gains,
                          const AssociationMetric& metric, double ith_w, const PowerControlOptions& opts,
                          int reassoc_every)
{
    if (!is_mei(metric.scheme))
        throw InvalidParameter("joint association and power control needs an mei scheme");
    if (reassoc_every < 1)
        throw InvalidParameter("reassociation period must be at least 1");

    CapcResult out;
    Eigen::VectorXd p = opts.initial ? *opts.initial : Eigen::VectorXd::Zero(static_cast<Index>(snapshot.users.size()));
    int total = 0;
    bool first = true;
    while (total < opts.max_iters)
    {
        AssociationMap next = associate(ScoringContext(snapshot, gains, p), metric);
        out.system = make_link_system(snapshot, gains, next, ith_w);

        PowerControlOptions round = opts;
        round.max_iters = std::min(reassoc_every, opts.max_iters - total);
        if (!first)
            round.initial = p;
        out.state = run_power_control(alg, out.system, round);
        total += out.state.iterations;
        ++out.rounds;

        const bool stable = !first && next == out.assoc && out.state.converged;
        out.assoc = std::move(next);
        p = out.state.p;
        first = false;
        if (stable)
            break;
    }
    out.state.iterations = total;
    // Converged only if the last round left both the map and the powers unchanged.
    if (total >= opts.max_iters)
        out.state.converged = false;
    return out;
}

SnapshotResult run_snapshot(const SimConfig& cfg, int n_small, std::uint64_t seed, const RunCase& run)
{
    try
    {
        const NetworkSnapshot snap = cfg.geometry == Geometry::grid ? generate_fig2_snapshot(cfg, n_small, seed)
                                                                    : generate_fig3_snapshot(cfg, n_small, seed);
        const GainMatrix gains = build_gain_matrix(snap, cfg);
        SnapshotResult res;
        res.seed = seed;
        res.n_small = n_small;
        res.run = run;
        res.direction = snap.direction;
        return snap.direction == Direction::uplink ? run_uplink(cfg, snap, gains, run, res)
                                                   : run_downlink(cfg, snap, gains, run, res);
    }
    catch (const GenerationError& e)
    {
        rethrow_with_seed(e, seed, n_small);
    }
    catch (const NumericError& e)
    {
        rethrow_with_seed(e, seed, n_small);
    }
    catch (const InvalidParameter& e)
    {
        rethrow_with_seed(e, seed, n_small);
    }
}

SnapshotResult run_snapshot(const SimConfig& cfg, int n_small, std::uint64_t seed)
{
    return run_snapshot(cfg, n_small, seed, RunCase{cfg.pc_algorithm, cfg.scheme(cfg.direction())});
}

MetricsRow aggregate(const std::string& experiment, int sweep_value, const RunCase& run, Direction direction,
                     const std::vector<SnapshotResult>& results)
{
    MetricsRow row;
    row.experiment = experiment;
    row.sweep_param = "n_small";
    row.sweep_value = sweep_value;
    row.run = run;
    row.direction = direction;
    row.seed_count = static_cast<int>(results.size());
    if (results.empty())
        return row;

    const double n = static_cast<double>(results.size());
    auto mean_of = [&](auto field) -> std::optional<double> {
        double sum = 0.0;
        for (const auto& r : results)
        {
            const std::optional<double> v = field(r);
            if (!v)
                return std::nullopt;
            sum += *v;
        }
        return sum / n;
    };

    row.hpue_outage = mean_of([](const SnapshotResult& r) { return r.hpue_outage; });
    row.lpue_outage = mean_of([](const SnapshotResult& r) { return r.lpue_outage; });
    row.agg_power = *mean_of([](const SnapshotResult& r) { return std::optional(r.agg_power); });
    row.agg_throughput = *mean_of([](const SnapshotResult& r) { return std::optional(r.agg_throughput); });
    row.spectral_eff = *mean_of([](const SnapshotResult& r) { return std::optional(r.spectral_eff); });
    row.split_throughput = *mean_of([](const SnapshotResult& r) { return std::optional(r.split_throughput); });
    row.convergence_rate = *mean_of([](const SnapshotResult& r) { return std::optional(r.converged ? 1.0 : 0.0); });

    if (row.lpue_outage)
    {
        double ss = 0.0;
        for (const auto& r : results)
            ss += (*r.lpue_outage - *row.lpue_outage) * (*r.lpue_outage - *row.lpue_outage);
        row.lpue_outage_stderr = results.size() > 1 ? std::sqrt(ss / (n - 1.0)) / std::sqrt(n) : 0.0;
    }
    for (const auto& r : results)
    {
        if (r.protection_ratio)
            row.max_protection_ratio = std::max(row.max_protection_ratio.value_or(0.0), *r.protection_ratio);
        row.seeds.push_back(r.seed);
    }
    return row;
}

MetricsReport run_monte_carlo(const SimConfig& cfg, const RunPlan& plan, int jobs)
{
    validate(cfg);
    if (plan.snapshots < 1)
        throw InvalidParameter("snapshots must be at least 1");

    struct Task
    {
        int n_small;
        std::size_t case_index;
        std::uint64_t seed;
    };
    std::vector<Task> tasks;
    for (int n : plan.sweep)
        for (std::size_t c = 0; c < plan.cases.size(); ++c)
            for (int k = 0; k < plan.snapshots; ++k)
                tasks.push_back({n, c, plan.base_seed + static_cast<std::uint64_t>(k)});

    std::vector<SnapshotResult> results(tasks.size());
    std::vector<std::exception_ptr> errors(tasks.size());
    std::atomic<std::size_t> cursor{0};
    auto worker = [&] {
        for (std::size_t t = cursor++; t < tasks.size(); t = cursor++)
        {
            try
            {
                results[t] = run_snapshot(cfg, tasks[t].n_small, tasks[t].seed, plan.cases[tasks[t].case_index]);
            }
            catch (...)
            {
                errors[t] = std::current_exception();
            }
        }
    };

    const int threads = std::max(1, std::min<int>(jobs, static_cast<int>(tasks.size())));
    if (threads == 1)
    {
        worker();
    }
    else
    {
        std::vector<std::jthread> pool;
        for (int i = 0; i < threads; ++i)
            pool.emplace_back(worker);
    }

    for (const auto& e : errors)
        if (e)
            std::rethrow_exception(e);

    MetricsReport report;
    report.experiment = plan.experiment;
    report.config = cfg;
    std::size_t t = 0;
    for (int n : plan.sweep)
    {
        for (const auto& run : plan.cases)
        {
            std::vector<SnapshotResult> slice(results.begin() + static_cast<std::ptrdiff_t>(t),
                                              results.begin() + static_cast<std::ptrdiff_t>(t + plan.snapshots));
            t += static_cast<std::size_t>(plan.snapshots);
            report.rows.push_back(aggregate(plan.experiment, n, run, cfg.direction(), slice));
        }
    }
    return report;
}

MetricsReport run_monte_carlo(const SimConfig& cfg, int jobs)
{
    RunPlan plan;
    plan.experiment = "sweep";
    plan.cases = {RunCase{cfg.pc_algorithm, cfg.scheme(cfg.direction())}};
    plan.sweep = cfg.sweep_n_small;
    plan.snapshots = cfg.snapshots;
    plan.base_seed = cfg.base_seed;
    return run_monte_carlo(cfg, plan, jobs);
}

MetricsReport experiment_fig2(const SimConfig& cfg, int jobs)
{
    if (cfg.geometry != Geometry::grid)
        throw ConfigError("geometry", 0, "the fig2 experiment needs geometry = grid");
    RunPlan plan;
    plan.experiment = "fig2";
    for (Algorithm a : {Algorithm::tpc, Algorithm::tpc_gr, Algorithm::ptpc, Algorithm::ptpc_gr})
        plan.cases.push_back({a, cfg.assoc_uplink});
    plan.sweep = cfg.sweep_n_small;
    plan.snapshots = cfg.snapshots;
    plan.base_seed = cfg.base_seed;
    return run_monte_carlo(cfg, plan, jobs);
}

MetricsReport experiment_fig3(const SimConfig& cfg, int jobs)
{
    if (cfg.geometry != Geometry::disc)
        throw ConfigError("geometry", 0, "the fig3 experiment needs geometry = disc");
    RunPlan plan;
    plan.experiment = "fig3";
    for (Scheme s : {Scheme::distance, Scheme::resource, Scheme::hybrid})
        plan.cases.push_back({Algorithm::none, s});
    plan.sweep = cfg.sweep_n_small;
    plan.snapshots = cfg.snapshots;
    plan.base_seed = cfg.base_seed;
    return run_monte_carlo(cfg, plan, jobs);
}

}  // namespace hetnet
