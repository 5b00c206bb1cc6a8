#pragma once

#include "hetnet/power_control.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace hetnet {

/// Random paired-link instance with 2-8 users. Direct gains are uniform in
/// [0.5, 1], cross gains uniform and then rescaled so that rho(F) equals
/// `target_rho` exactly; targets uniform in [0.5, 2], noise uniform in
/// [0.05, 0.15], OPC constant 0.01 and budget `p_max` for every user.
LinkSystem random_instance(std::uint64_t seed, double target_rho, double p_max);

struct OracleCheckSummary
{
    int instances = 0;
    int passed = 0;
    std::vector<std::string> failures; ///< one line per failure, with the instance seed

    double pass_rate() const { return instances == 0 ? 0.0 : static_cast<double>(passed) / instances; }
    bool ok() const { return instances > 0 && passed == instances; }
};

/// Relative tolerance of the fixed-point comparison.
inline constexpr double kOracleRelTol = 1e-8;
/// Iteration tolerance used for the comparison (tighter than the default so
/// the truncation error stays well below kOracleRelTol).
inline constexpr double kOracleIterTol = 1e-12;

/// Feasible instances (rho < 0.9): uncapped TPC iteration vs direct solve.
OracleCheckSummary check_fixed_point(int count, std::uint64_t seed);

/// Mixed instances (rho in [0.05, 0.95] or [1.05, 2]): rho < 1 iff TPC with
/// p_max = 1e6 W converges with every user supported.
OracleCheckSummary check_feasibility(int count, std::uint64_t seed);

/// Both checks, instance seeds derived from `seed`.
OracleCheckSummary oracle_check(int count, std::uint64_t seed);

}  // namespace hetnet
