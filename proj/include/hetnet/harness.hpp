#pragma once

#include "hetnet/association.hpp"
#include "hetnet/config.hpp"
#include "hetnet/power_control.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hetnet {

/// One (power control, association) combination evaluated at every sweep point.
struct RunCase
{
    Algorithm algorithm = Algorithm::tpc;
    Scheme scheme = Scheme::home;

    bool operator==(const RunCase&) const = default;
};

struct SnapshotResult
{
    std::uint64_t seed = 0;
    int n_small = 0;
    RunCase run;
    Direction direction = Direction::uplink;
    std::optional<double> hpue_outage;
    std::optional<double> lpue_outage;
    double agg_power = 0.0;
    double agg_throughput = 0.0;
    double spectral_eff = 0.0;
    /// Throughput with each user's traffic split equally over its serving set.
    double split_throughput = 0.0;
    bool converged = true;
    int iterations = 0;
    /// max over protected receivers of (LPUE interference / I_th); prioritized runs only.
    std::optional<double> protection_ratio;

    bool operator==(const SnapshotResult&) const = default;
};

struct MetricsRow
{
    std::string experiment;
    std::string sweep_param;
    double sweep_value = 0.0;
    RunCase run;
    Direction direction = Direction::uplink;
    int seed_count = 0;
    std::optional<double> hpue_outage;
    std::optional<double> lpue_outage;
    double agg_power = 0.0;
    double agg_throughput = 0.0;
    double spectral_eff = 0.0;
    double convergence_rate = 0.0;
    /// Standard error of the per-snapshot LPUE outage.
    std::optional<double> lpue_outage_stderr;
    double split_throughput = 0.0;
    std::optional<double> max_protection_ratio;
    std::vector<std::uint64_t> seeds;

    bool operator==(const MetricsRow&) const = default;
};

struct MetricsReport
{
    std::string experiment;
    SimConfig config;
    std::vector<MetricsRow> rows;

    bool operator==(const MetricsReport&) const = default;
};

struct RunPlan
{
    std::string experiment = "sweep";
    std::vector<RunCase> cases;
    std::vector<int> sweep;
    int snapshots = 1;
    std::uint64_t base_seed = 1;
};

/// Fraction of users of `tier` (all users when empty) whose SIR falls short
/// of target; empty when the tier has no users.
std::optional<double> outage_ratio(const PowerState& state, const std::vector<Priority>& priorities,
                                   std::optional<Priority> tier);

inline double shannon_rate(double sir) { return std::log2(1.0 + sir); }

struct Throughput
{
    double aggregate = 0.0;           ///< sum of log2(1 + sir)
    double spectral_efficiency = 0.0; ///< mean of access * log2(1 + sir)
};

Throughput throughput_metrics(const Eigen::VectorXd& sir, const Eigen::VectorXd& access);

/// Joint association and power control: re-associate with the current
/// powers every `reassoc_every` power iterations until both the map and the
/// power vector are stable.
struct CapcResult
{
    AssociationMap assoc;
    PowerState state;
    LinkSystem system;
    int rounds = 0;
};

CapcResult run_joint_capc(Algorithm alg, const NetworkSnapshot& snapshot, const GainMatrix& gains,
                          const AssociationMetric& metric, double ith_w, const PowerControlOptions& opts,
                          int reassoc_every);

/// generate -> gains -> associate -> power control -> metrics. Errors are
/// rethrown with the seed in the message.
SnapshotResult run_snapshot(const SimConfig& cfg, int n_small, std::uint64_t seed, const RunCase& run);
SnapshotResult run_snapshot(const SimConfig& cfg, int n_small, std::uint64_t seed);

/// Averages every case at every sweep point over seeds base_seed + k,
/// k < snapshots. Snapshots may run on `jobs` threads; results are merged by
/// seed index, so the report does not depend on `jobs`.
MetricsReport run_monte_carlo(const SimConfig& cfg, const RunPlan& plan, int jobs = 1);
/// Single-case sweep taken from cfg (pc.algorithm, scheme of cfg.direction()).
MetricsReport run_monte_carlo(const SimConfig& cfg, int jobs = 1);

/// Aggregates per-seed results (in seed-index order) into a row.
MetricsRow aggregate(const std::string& experiment, int sweep_value, const RunCase& run, Direction direction,
                     const std::vector<SnapshotResult>& results);

/// LPUE algorithms {tpc, tpc_gr, ptpc, ptpc_gr} over the grid sweep; HPUEs run TPC.
MetricsReport experiment_fig2(const SimConfig& cfg, int jobs = 1);
/// Association schemes {distance, resource, hybrid} over the disc sweep.
MetricsReport experiment_fig3(const SimConfig& cfg, int jobs = 1);

}  // namespace hetnet
