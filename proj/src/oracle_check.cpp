#include "hetnet/oracle_check.hpp"

#include "hetnet/errors.hpp"
#include "hetnet/rng.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace hetnet {

namespace {

constexpr std::uint64_t kInstanceStream = 7;
constexpr std::uint64_t kDrawStream = 11;

// Budget large enough that no cap binds on the feasible instances.
constexpr double kUncapped = 1e12;
constexpr double kFeasibilityBudget = 1e6;

std::uint64_t instance_seed(std::uint64_t seed, int k, std::uint64_t salt)
{
    return mix_seed(seed ^ mix_seed(salt)) + static_cast<std::uint64_t>(k);
}

}  // namespace

LinkSystem random_instance(std::uint64_t seed, double target_rho, double p_max)
{
    if (!(target_rho > 0.0) || !std::isfinite(target_rho))
        throw InvalidParameter("target spectral radius must be positive");

    Rng rng(seed, kInstanceStream);
    const auto n = static_cast<Index>(2 + rng.next() % 7);
    Eigen::MatrixXd g(n, n);
    for (Index r = 0; r < n; ++r)
        for (Index c = 0; c < n; ++c)
            g(r, c) = r == c ? rng.uniform(0.5, 1.0) : rng.uniform(0.01, 1.0);
    Eigen::VectorXd target(n);
    Eigen::VectorXd noise(n);
    for (Index i = 0; i < n; ++i)
    {
        target(i) = rng.uniform(0.5, 2.0);
        noise(i) = rng.uniform(0.05, 0.15);
    }
    const Eigen::VectorXd budget = Eigen::VectorXd::Constant(n, p_max);
    const Eigen::VectorXd eta = Eigen::VectorXd::Constant(n, 0.01);

    // rho(F) is linear in the cross gains: rescale them to hit the target.
    const double raw = spectral_radius(coupling_matrix(make_paired_system(g, noise, target, budget, eta)));
    const Eigen::MatrixXd diag = g.diagonal().asDiagonal();
    const Eigen::MatrixXd scaled = (g - diag) * (target_rho / raw) + diag;
    return make_paired_system(scaled, noise, target, budget, eta);
}

OracleCheckSummary check_fixed_point(int count, std::uint64_t seed)
{
    OracleCheckSummary out;
    PowerControlOptions opts;
    opts.tol = kOracleIterTol;
    opts.max_iters = 20'000;
    for (int k = 0; k < count; ++k)
    {
        const std::uint64_t s = instance_seed(seed, k, 1);
        ++out.instances;
        try
        {
            Rng draw(s, kDrawStream);
            const double rho = draw.uniform(0.05, 0.9);
            const LinkSystem sys = random_instance(s, rho, kUncapped);
            const PowerState st = run_power_control(Algorithm::tpc, sys, opts);
            const Eigen::VectorXd exact = fixed_point_oracle(sys);
            double worst = 0.0;
            for (Index i = 0; i < sys.users(); ++i)
                worst = std::max(worst, std::abs(st.p(i) - exact(i)) / exact(i));
            if (st.converged && worst <= kOracleRelTol)
                ++out.passed;
            else
                out.failures.push_back(fmt::format("fixed-point seed {}: rho={:.4f} converged={} rel_err={:.3e}", s,
                                                   rho, st.converged, worst));
        }
        catch (const Error& e)
        {
            out.failures.push_back(fmt::format("fixed-point seed {}: {}", s, e.what()));
        }
    }
    return out;
}

OracleCheckSummary check_feasibility(int count, std::uint64_t seed)
{
    OracleCheckSummary out;
    PowerControlOptions opts;
    opts.max_iters = 20'000;
    for (int k = 0; k < count; ++k)
    {
        const std::uint64_t s = instance_seed(seed, k, 2);
        ++out.instances;
        try
        {
            Rng draw(s, kDrawStream);
            // Keep clear of rho = 1, where the iteration cannot settle within
            // any fixed budget.
            const double rho = draw.uniform() < 0.5 ? draw.uniform(0.05, 0.95) : draw.uniform(1.05, 2.0);
            const LinkSystem sys = random_instance(s, rho, kFeasibilityBudget);
            const FeasibilityResult feas = feasibility_check(sys);
            const PowerState st = run_power_control(Algorithm::tpc, sys, opts);
            const bool all_supported = std::all_of(st.supported.begin(), st.supported.end(), [](bool b) { return b; });
            const bool iterate_ok = st.converged && all_supported;
            if (feas.feasible == iterate_ok && std::abs(feas.spectral_radius - rho) <= 1e-8 * rho)
                ++out.passed;
            else
                out.failures.push_back(fmt::format(
                    "feasibility seed {}: rho={:.6f} estimated={:.6f} converged={} supported={}", s, rho,
                    feas.spectral_radius, st.converged, all_supported));
        }
        catch (const Error& e)
        {
            out.failures.push_back(fmt::format("feasibility seed {}: {}", s, e.what()));
        }
    }
    return out;
}

OracleCheckSummary oracle_check(int count, std::uint64_t seed)
{
    if (count < 1)
        throw InvalidParameter("oracle check needs at least one instance");
    OracleCheckSummary a = check_fixed_point(count, seed);
    OracleCheckSummary b = check_feasibility(count, seed);
    a.instances += b.instances;
    a.passed += b.passed;
    a.failures.insert(a.failures.end(), b.failures.begin(), b.failures.end());
    return a;
}

}  // namespace hetnet
