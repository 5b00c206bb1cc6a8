#pragma once

#include "hetnet/types.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace hetnet {

/// Power-control algorithms. `none` keeps every transmitter at its budget.
/// The `p*` variants clip the LPUE update by a cap that protects
/// high-priority receivers; HPUEs always track their target with TPC.
enum class Algorithm { none, tpc, tpc_gr, opc, dtpc, ptpc, ptpc_gr, popc };

std::string_view to_string(Algorithm a);
Algorithm parse_algorithm(std::string_view s);
bool is_prioritized(Algorithm a);
/// Unprioritized update underlying `a` (ptpc -> tpc, ...).
Algorithm base_algorithm(Algorithm a);

enum class PrioritizedMode {
    static_cap, ///< equal-share cap computed once from max-power interference
    backoff,    ///< closed loop: halve on violation, recover by 1.1 otherwise
};

std::string_view to_string(PrioritizedMode m);
PrioritizedMode parse_prioritized_mode(std::string_view s);

/// Uplink power-control view of a network: one link per transmitting user,
/// served by one receiver.
struct LinkSystem
{
    Eigen::MatrixXd gains;     ///< receivers x users
    Eigen::VectorXd noise;     ///< per receiver
    std::vector<Index> serving;///< per user, receiver row in `gains`
    Eigen::VectorXd p_max;
    Eigen::VectorXd target_sir;
    Eigen::VectorXd opc_target;
    std::vector<Priority> priority;
    Eigen::VectorXd protection; ///< interference threshold per receiver; 0 means unprotected

    Index users() const { return gains.cols(); }
    Index receivers() const { return gains.rows(); }
    /// Link gain of user i to its own receiver.
    double own_gain(Index i) const { return gains(serving[static_cast<std::size_t>(i)], i); }

    /// Throws InvalidParameter on shape mismatch, non-positive own gains or
    /// noise, negative or non-finite gains.
    void validate() const;
};

/// Builds the uplink link system. Receivers serving high-priority users
/// (high-priority BSs) are protected at `ith_w`.
LinkSystem make_link_system(const NetworkSnapshot& snapshot, const GainMatrix& gains, const AssociationMap& assoc,
                            double ith_w);

/// One receiver per user (user i served by receiver i), no priorities.
/// The form used for small analytic instances and oracle cross-checks.
LinkSystem make_paired_system(Eigen::MatrixXd gains, Eigen::VectorXd noise, Eigen::VectorXd target_sir,
                              Eigen::VectorXd p_max, Eigen::VectorXd opc_target);

/// Effective interference R_i = (sum_{j != i} g_{s(i),j} p_j + noise) / g_{s(i),i}.
double effective_interference(Index user, const Eigen::VectorXd& powers, const LinkSystem& sys);
Eigen::VectorXd effective_interference(const Eigen::VectorXd& powers, const LinkSystem& sys);
double effective_interference(int user, const Eigen::VectorXd& powers, const GainMatrix& gains,
                              const AssociationMap& assoc);

struct UserTargets
{
    double target_sir = 1.0;
    double opc_target = 0.0;
    double p_max = 1.0;
};

/// min(p_max, target * R).
double tpc_update(double r, const UserTargets& u);
/// Soft removal: target * R while that fits the budget, p_max^2 / (target * R) beyond.
double tpc_gr_update(double r, const UserTargets& u);
/// min(p_max, eta / R).
double opc_update(double r, const UserTargets& u);
/// min(p_max, max(target * R, eta / R)).
double dtpc_update(double r, const UserTargets& u);
double base_update(Algorithm base, double r, const UserTargets& u);

inline constexpr double kDefaultFloorFraction = 1e-3;

/// Static equal-share caps protecting every receiver with a positive
/// threshold from LPUE interference.
struct PrioritizedCapSet
{
    Eigen::VectorXd cap;        ///< per user; HPUEs and unconstrained LPUEs get p_max
    Eigen::VectorXd thresholds; ///< per receiver (copied from the protection vector)
    std::vector<int> shares;    ///< per receiver, count of non-negligible LPUEs
    Eigen::VectorXd residual;   ///< per receiver, max-power interference of negligible LPUEs
};

/// An LPUE is negligible at receiver m when its max-power interference there
/// is at most floor_fraction * I_th,m / (LPUE count). Negligible LPUEs are
/// left uncapped at m and their worst case is deducted from the budget, so
/// honoring the caps keeps the aggregate LPUE interference at m <= I_th,m.
PrioritizedCapSet prioritized_caps(const LinkSystem& sys, double floor_fraction = kDefaultFloorFraction);
PrioritizedCapSet prioritized_caps(const NetworkSnapshot& snapshot, const GainMatrix& gains,
                                   const Eigen::VectorXd& ith, double floor_fraction = kDefaultFloorFraction);

/// LPUE: min(base update, cap). HPUE: TPC.
double prioritized_update(Algorithm base, Priority priority, double r, const UserTargets& u, double cap);

struct PowerControlOptions
{
    int max_iters = 2000;
    double tol = 1e-9;
    double tol_support = 1e-6;
    PrioritizedMode mode = PrioritizedMode::static_cap;
    double floor_fraction = kDefaultFloorFraction;
    /// Starting vector; when empty, zeros (OPC variants start at eta / R
    /// evaluated with noise-only interference).
    std::optional<Eigen::VectorXd> initial;
};

struct PowerState
{
    Eigen::VectorXd p;
    Eigen::VectorXd target_sir;
    Eigen::VectorXd opc_target;
    Eigen::VectorXd sir;
    std::vector<bool> supported;
    int iterations = 0;
    bool converged = false;
    /// Caps in force at the end (prioritized algorithms only).
    std::optional<Eigen::VectorXd> caps;
};

/// Synchronous iteration of the chosen update until
/// ||p(t+1) - p(t)||_inf / max(||p(t)||_inf, eps) < tol or max_iters.
/// Non-convergence is reported through `converged`, not thrown.
PowerState run_power_control(Algorithm alg, const LinkSystem& sys, const PowerControlOptions& opts = {});
PowerState run_power_control(Algorithm alg, const NetworkSnapshot& snapshot, const GainMatrix& gains,
                             const AssociationMap& assoc, double ith_w, const PowerControlOptions& opts = {});

/// Fills sir and supported for the given powers.
void evaluate_support(PowerState& state, const LinkSystem& sys, double tol_support);

/// Aggregate LPUE interference at each receiver for powers `p`.
Eigen::VectorXd lpue_interference(const Eigen::VectorXd& p, const LinkSystem& sys);

/// F_ij = target_i g_{s(i),j} / g_{s(i),i} for j != i, zero diagonal.
Eigen::MatrixXd coupling_matrix(const LinkSystem& sys);
/// u_i = target_i * noise_{s(i)} / g_{s(i),i}.
Eigen::VectorXd noise_vector(const LinkSystem& sys);

/// Minimal power vector meeting every target, ignoring power budgets:
/// p* = (I - F)^-1 u by direct LU solve. Throws NumericError when the system
/// is infeasible or singular.
Eigen::VectorXd fixed_point_oracle(const LinkSystem& sys);

struct FeasibilityResult
{
    bool feasible = false;
    double spectral_radius = 0.0;
    int iterations = 0;
};

/// Perron root of a non-negative square matrix by power iteration on
/// A + cI with c set to the running upper bound, bracketed by the Collatz-Wielandt bounds. Throws NumericError
/// when the iteration stagnates.
double spectral_radius(const Eigen::MatrixXd& a, double tol = 1e-10, int max_iters = 10'000, int* iterations = nullptr);

/// rho(F) < 1.
FeasibilityResult feasibility_check(const LinkSystem& sys);

}  // namespace hetnet
