#pragma once

#include "hetnet/types.hpp"

#include <cstdint>

namespace hetnet {

struct SimConfig;

/// k * max(distance, d_min)^(-exponent). Throws InvalidParameter on
/// non-finite or out-of-range inputs.
double path_gain(double distance, double exponent, double d_min, double k = 1.0);

/// Bounded rejection sampling budget when packing small cells.
inline constexpr int kPlacementRetries = 10'000;

/// Uplink grid scenario: rows x rows macro squares, `n_small` non-overlapping
/// small squares per macro, BSs at cell centres, users uniform in their
/// home cell. Throws GenerationError when the small cells cannot be packed.
NetworkSnapshot generate_fig2_snapshot(const SimConfig& cfg, int n_small, std::uint64_t seed);

/// Downlink disc scenario: one macro BS at the centre, one tagged user and
/// `n_small` small BSs uniform in the disc. Every BS gets a Poisson number
/// of incumbent users whose mean is itself uniform in [lambda_lo, lambda_hi].
NetworkSnapshot generate_fig3_snapshot(const SimConfig& cfg, int n_small, std::uint64_t seed);

/// Path gains for the snapshot's own direction.
GainMatrix build_gain_matrix(const NetworkSnapshot& snapshot, const SimConfig& cfg);

/// Path gains for an explicit direction (association may differ between
/// uplink and downlink in one run).
GainMatrix build_gain_matrix(const NetworkSnapshot& snapshot, const SimConfig& cfg, Direction direction);

/// SIR of `user` on its primary serving link.
///
/// Uplink: `powers` holds one entry per user; every other user interferes
/// at the serving BS. Downlink: `powers` holds one entry per BS; every other
/// BS interferes at the user.
double compute_sir(int user, const Eigen::VectorXd& powers, const GainMatrix& gains, const AssociationMap& assoc);

}  // namespace hetnet
