#pragma once

#include "hetnet/scheduling.hpp"
#include "hetnet/types.hpp"

#include <optional>

namespace hetnet {

struct AssociationMetric
{
    Scheme scheme = Scheme::rsrp;
    double bias_db = 0.0; ///< small-tier bias, cre only
    double epsilon = 0.0; ///< relative window, mei_multi only
    Scheduler scheduler = Scheduler::round_robin;
};

/// Everything a score needs besides the (user, BS) pair.
///
/// rsrq and mei need transmit powers before power control has settled:
/// `reference_powers` holds one entry per transmitter of `gains` (users on
/// the uplink, BSs on the downlink). When empty, uplink users are taken at
/// p_max and downlink BSs at their budget.
struct ScoringContext
{
    const NetworkSnapshot& snapshot;
    const GainMatrix& gains;
    Eigen::VectorXd reference_powers;
    Eigen::VectorXd access_probs; ///< per BS; filled from incumbents when empty

    ScoringContext(const NetworkSnapshot& s, const GainMatrix& g, Eigen::VectorXd ref = {},
                   Eigen::VectorXd access = {});
};

/// Access probability of every BS from its incumbent count.
Eigen::VectorXd access_probabilities(const NetworkSnapshot& snapshot, Scheduler scheduler);

/// Effective interference of user i if served by BS b (mei metric).
double effective_interference_via(const ScoringContext& ctx, int user, int bs);

/// Higher is better. Throws ConfigError for schemes without a per-BS score
/// (home, mei_multi).
double score(const ScoringContext& ctx, int user, int bs, const AssociationMetric& metric);

/// Argmax association in the gain matrix's direction, ties to the lowest BS
/// id. Resource-aware schemes (resource, hybrid) admit users one at a time
/// in id order and count each admission in the chosen cell's load.
/// mei_multi is dispatched to multi_associate.
AssociationMap associate(const ScoringContext& ctx, const AssociationMetric& metric);
AssociationMap associate(const NetworkSnapshot& snapshot, const GainMatrix& gains, Scheme scheme);

/// Serving set {b : R_{i,b} <= (1 + epsilon) min_b' R_{i,b'}}; primary is
/// the minimising BS.
AssociationMap multi_associate(const ScoringContext& ctx, double epsilon);

/// Fill the other direction of an existing map (uplink and downlink may use
/// different schemes in one run).
void merge_direction(AssociationMap& into, const AssociationMap& from, Direction direction);

}  // namespace hetnet
