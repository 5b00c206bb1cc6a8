#include "hetnet/power_control.hpp"

#include "hetnet/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <utility>

namespace hetnet {

namespace {

constexpr std::array<std::pair<Algorithm, std::string_view>, 8> kAlgorithmNames{{
    {Algorithm::none, "none"},
    {Algorithm::tpc, "tpc"},
    {Algorithm::tpc_gr, "tpc_gr"},
    {Algorithm::opc, "opc"},
    {Algorithm::dtpc, "dtpc"},
    {Algorithm::ptpc, "ptpc"},
    {Algorithm::ptpc_gr, "ptpc_gr"},
    {Algorithm::popc, "popc"},
}};

// Guards the relative step when the previous iterate is all zeros.
constexpr double kStepFloor = 1e-300;

// Closed-loop back-off factors.
constexpr double kBackoffDown = 0.5;
constexpr double kBackoffUp = 1.1;

std::string describe(Index i) { return "user " + std::to_string(i); }

}  // namespace

std::string_view to_string(Algorithm a)
{
    for (const auto& [alg, name] : kAlgorithmNames)
        if (alg == a)
            return name;
    return "?";
}

Algorithm parse_algorithm(std::string_view s)
{
    for (const auto& [alg, name] : kAlgorithmNames)
        if (name == s)
            return alg;
    throw ConfigError("pc.algorithm", 0, "unknown power-control algorithm '" + std::string(s) + "'");
}

bool is_prioritized(Algorithm a) { return a == Algorithm::ptpc || a == Algorithm::ptpc_gr || a == Algorithm::popc; }

Algorithm base_algorithm(Algorithm a)
{
    switch (a)
    {
        case Algorithm::ptpc: return Algorithm::tpc;
        case Algorithm::ptpc_gr: return Algorithm::tpc_gr;
        case Algorithm::popc: return Algorithm::opc;
        default: return a;
    }
}

std::string_view to_string(PrioritizedMode m) { return m == PrioritizedMode::static_cap ? "static" : "backoff"; }

PrioritizedMode parse_prioritized_mode(std::string_view s)
{
    if (s == "static")
        return PrioritizedMode::static_cap;
    if (s == "backoff")
        return PrioritizedMode::backoff;
    throw ConfigError("pc.prioritized_mode", 0, "unknown prioritized mode '" + std::string(s) + "'");
}

void LinkSystem::validate() const
{
    const Index n = users();
    const Index m = receivers();
    const auto un = static_cast<std::size_t>(n);
    if (noise.size() != m || protection.size() != m)
        throw InvalidParameter("link system: per-receiver vectors do not match the gain matrix");
    if (serving.size() != un || priority.size() != un || p_max.size() != n || target_sir.size() != n
        || opc_target.size() != n)
        throw InvalidParameter("link system: per-user vectors do not match the gain matrix");
    if (!gains.allFinite() || (gains.array() < 0.0).any())
        throw InvalidParameter("link system: gains must be finite and non-negative");
    for (Index r = 0; r < m; ++r)
    {
        if (!(noise(r) > 0.0) || !std::isfinite(noise(r)))
            throw InvalidParameter("link system: noise must be positive at receiver " + std::to_string(r));
        if (!(protection(r) >= 0.0) || !std::isfinite(protection(r)))
            throw InvalidParameter("link system: invalid protection threshold at receiver " + std::to_string(r));
    }
    for (Index i = 0; i < n; ++i)
    {
        const Index s = serving[static_cast<std::size_t>(i)];
        if (s < 0 || s >= m)
            throw InvalidParameter("link system: " + describe(i) + " has no valid serving receiver");
        if (!(gains(s, i) > 0.0))
            throw InvalidParameter("link system: " + describe(i) + " has zero gain to its serving receiver");
        if (!(p_max(i) > 0.0) || !(target_sir(i) > 0.0) || !(opc_target(i) > 0.0))
            throw InvalidParameter("link system: " + describe(i) + " needs positive p_max, target and OPC constant");
    }
}

LinkSystem make_link_system(const NetworkSnapshot& snapshot, const GainMatrix& gains, const AssociationMap& assoc,
                            double ith_w)
{
    if (gains.direction != Direction::uplink)
        throw InvalidParameter("power control runs on uplink gains");
    if (assoc.uplink.size() != snapshot.users.size())
        throw InvalidParameter("uplink association does not cover every user");

    const auto n = static_cast<Index>(snapshot.users.size());
    LinkSystem sys;
    sys.gains = gains.gains;
    sys.noise = gains.noise;
    sys.p_max.resize(n);
    sys.target_sir.resize(n);
    sys.opc_target.resize(n);
    for (Index i = 0; i < n; ++i)
    {
        const auto& ue = snapshot.users[static_cast<std::size_t>(i)];
        sys.serving.push_back(assoc.uplink[static_cast<std::size_t>(i)].primary);
        sys.p_max(i) = ue.p_max;
        sys.target_sir(i) = ue.target_sir;
        sys.opc_target(i) = ue.opc_target;
        sys.priority.push_back(ue.priority);
    }
    sys.protection = Eigen::VectorXd::Zero(sys.receivers());
    for (const auto& bs : snapshot.base_stations)
        if (bs.priority == Priority::high)
            sys.protection(bs.id) = ith_w;
    sys.validate();
    return sys;
}

LinkSystem make_paired_system(Eigen::MatrixXd gains, Eigen::VectorXd noise, Eigen::VectorXd target_sir,
                              Eigen::VectorXd p_max, Eigen::VectorXd opc_target)
{
    if (gains.rows() != gains.cols())
        throw InvalidParameter("paired system needs a square gain matrix");
    LinkSystem sys;
    const Index n = gains.rows();
    sys.gains = std::move(gains);
    sys.noise = std::move(noise);
    sys.target_sir = std::move(target_sir);
    sys.p_max = std::move(p_max);
    sys.opc_target = std::move(opc_target);
    for (Index i = 0; i < n; ++i)
        sys.serving.push_back(i);
    sys.priority.assign(static_cast<std::size_t>(n), Priority::low);
    sys.protection = Eigen::VectorXd::Zero(n);
    sys.validate();
    return sys;
}

double effective_interference(Index user, const Eigen::VectorXd& powers, const LinkSystem& sys)
{
    const Index s = sys.serving[static_cast<std::size_t>(user)];
    double total = sys.noise(s);
    for (Index j = 0; j < sys.users(); ++j)
        if (j != user)
            total += sys.gains(s, j) * powers(j);
    return total / sys.gains(s, user);
}

Eigen::VectorXd effective_interference(const Eigen::VectorXd& powers, const LinkSystem& sys)
{
    // Received power at every receiver, then remove each user's own signal.
    const Eigen::VectorXd received = sys.gains * powers;
    Eigen::VectorXd r(sys.users());
    for (Index i = 0; i < sys.users(); ++i)
    {
        const Index s = sys.serving[static_cast<std::size_t>(i)];
        const double own = sys.gains(s, i) * powers(i);
        r(i) = (std::max(received(s) - own, 0.0) + sys.noise(s)) / sys.gains(s, i);
    }
    return r;
}

double effective_interference(int user, const Eigen::VectorXd& powers, const GainMatrix& gains,
                              const AssociationMap& assoc)
{
    if (gains.direction != Direction::uplink)
        throw InvalidParameter("effective interference is defined on uplink gains");
    const auto& serving = assoc.uplink;
    if (user < 0 || static_cast<std::size_t>(user) >= serving.size())
        throw InvalidParameter("effective_interference: user " + std::to_string(user) + " is not associated");
    const Index s = serving[static_cast<std::size_t>(user)].primary;
    double total = gains.noise(s);
    for (Index j = 0; j < gains.transmitters(); ++j)
        if (j != user)
            total += gains.gains(s, j) * powers(j);
    return total / gains.gains(s, user);
}

double tpc_update(double r, const UserTargets& u) { return std::min(u.p_max, u.target_sir * r); }

double tpc_gr_update(double r, const UserTargets& u)
{
    const double demand = u.target_sir * r;
    return demand <= u.p_max ? demand : u.p_max * u.p_max / demand;
}

double opc_update(double r, const UserTargets& u) { return std::min(u.p_max, u.opc_target / r); }

double dtpc_update(double r, const UserTargets& u)
{
    return std::min(u.p_max, std::max(u.target_sir * r, u.opc_target / r));
}

double base_update(Algorithm base, double r, const UserTargets& u)
{
    switch (base)
    {
        case Algorithm::tpc: return tpc_update(r, u);
        case Algorithm::tpc_gr: return tpc_gr_update(r, u);
        case Algorithm::opc: return opc_update(r, u);
        case Algorithm::dtpc: return dtpc_update(r, u);
        case Algorithm::none: return u.p_max;
        default: throw InvalidParameter("'" + std::string(to_string(base)) + "' is not a base update");
    }
}

double prioritized_update(Algorithm base, Priority priority, double r, const UserTargets& u, double cap)
{
    if (priority == Priority::high)
        return tpc_update(r, u);
    return std::min(base_update(base, r, u), cap);
}

namespace {

Index lpue_count(const LinkSystem& sys)
{
    return static_cast<Index>(std::count(sys.priority.begin(), sys.priority.end(), Priority::low));
}

// Significance of LPUE i at protected receiver m (max-power interference
// above the negligibility floor).
struct FloorRule
{
    double fraction;
    Index lpues;

    double floor(double threshold) const { return fraction * threshold / static_cast<double>(std::max<Index>(lpues, 1)); }
};

}  // namespace

PrioritizedCapSet prioritized_caps(const LinkSystem& sys, double floor_fraction)
{
    if (!(floor_fraction >= 0.0 && floor_fraction < 1.0))
        throw InvalidParameter("floor fraction must lie in [0, 1)");

    const Index n = sys.users();
    const Index m = sys.receivers();
    const FloorRule rule{floor_fraction, lpue_count(sys)};

    PrioritizedCapSet caps;
    caps.cap = sys.p_max;
    caps.thresholds = sys.protection;
    caps.shares.assign(static_cast<std::size_t>(m), 0);
    caps.residual = Eigen::VectorXd::Zero(m);

    for (Index r = 0; r < m; ++r)
    {
        const double th = sys.protection(r);
        if (th <= 0.0)
            continue;
        for (Index i = 0; i < n; ++i)
        {
            if (sys.priority[static_cast<std::size_t>(i)] != Priority::low)
                continue;
            const double worst = sys.gains(r, i) * sys.p_max(i);
            if (worst > rule.floor(th))
                ++caps.shares[static_cast<std::size_t>(r)];
            else
                caps.residual(r) += worst;
        }
    }

    for (Index r = 0; r < m; ++r)
    {
        const int share = caps.shares[static_cast<std::size_t>(r)];
        if (share == 0)
            continue;
        const double th = sys.protection(r);
        const double budget = (th - caps.residual(r)) / share;
        for (Index i = 0; i < n; ++i)
        {
            if (sys.priority[static_cast<std::size_t>(i)] != Priority::low)
                continue;
            const double g = sys.gains(r, i);
            if (g * sys.p_max(i) > rule.floor(th))
                caps.cap(i) = std::min(caps.cap(i), budget / g);
        }
    }
    return caps;
}

PrioritizedCapSet prioritized_caps(const NetworkSnapshot& snapshot, const GainMatrix& gains,
                                   const Eigen::VectorXd& ith, double floor_fraction)
{
    if (gains.direction != Direction::uplink)
        throw InvalidParameter("prioritized caps need uplink gains");
    if (ith.size() != gains.receivers())
        throw InvalidParameter("one interference threshold per receiver is required");

    AssociationMap home;
    for (const auto& ue : snapshot.users)
        home.uplink.push_back({ue.home_bs, {ue.home_bs}});
    LinkSystem sys = make_link_system(snapshot, gains, home, 0.0);
    sys.protection = ith;
    sys.validate();
    return prioritized_caps(sys, floor_fraction);
}

Eigen::VectorXd lpue_interference(const Eigen::VectorXd& p, const LinkSystem& sys)
{
    Eigen::VectorXd total = Eigen::VectorXd::Zero(sys.receivers());
    for (Index i = 0; i < sys.users(); ++i)
        if (sys.priority[static_cast<std::size_t>(i)] == Priority::low)
            total += sys.gains.col(i) * p(i);
    return total;
}

void evaluate_support(PowerState& state, const LinkSystem& sys, double tol_support)
{
    const Eigen::VectorXd r = effective_interference(state.p, sys);
    state.sir = state.p.cwiseQuotient(r);
    state.supported.assign(static_cast<std::size_t>(sys.users()), false);
    for (Index i = 0; i < sys.users(); ++i)
        state.supported[static_cast<std::size_t>(i)] = state.sir(i) >= sys.target_sir(i) * (1.0 - tol_support);
}

PowerState run_power_control(Algorithm alg, const LinkSystem& sys, const PowerControlOptions& opts)
{
    sys.validate();
    if (opts.max_iters < 1)
        throw InvalidParameter("max_iters must be at least 1");

    const Index n = sys.users();
    const bool prioritized = is_prioritized(alg);
    const Algorithm base = base_algorithm(alg);
    const bool backoff = prioritized && opts.mode == PrioritizedMode::backoff;

    auto targets = [&](Index i) {
        return UserTargets{sys.target_sir(i), sys.opc_target(i), sys.p_max(i)};
    };
    auto is_high = [&](Index i) { return sys.priority[static_cast<std::size_t>(i)] == Priority::high; };

    PowerState st;
    st.target_sir = sys.target_sir;
    st.opc_target = sys.opc_target;

    if (alg == Algorithm::none)
    {
        st.p = sys.p_max;
        st.converged = true;
        evaluate_support(st, sys, opts.tol_support);
        return st;
    }

    Eigen::VectorXd p;
    if (opts.initial)
    {
        if (opts.initial->size() != n)
            throw InvalidParameter("initial power vector has the wrong size");
        p = *opts.initial;
    }
    else
    {
        p = Eigen::VectorXd::Zero(n);
        if (base == Algorithm::opc)
        {
            for (Index i = 0; i < n; ++i)
            {
                if (is_high(i))
                    continue;
                const Index s = sys.serving[static_cast<std::size_t>(i)];
                p(i) = opc_update(sys.noise(s) / sys.gains(s, i), targets(i));
            }
        }
    }

    Eigen::VectorXd cap = sys.p_max;
    std::vector<std::vector<Index>> significant; // backoff: protected receivers each LPUE answers to
    if (prioritized && !backoff)
    {
        cap = prioritized_caps(sys, opts.floor_fraction).cap;
    }
    else if (backoff)
    {
        const FloorRule rule{opts.floor_fraction, lpue_count(sys)};
        significant.resize(static_cast<std::size_t>(n));
        for (Index r = 0; r < sys.receivers(); ++r)
        {
            const double th = sys.protection(r);
            if (th <= 0.0)
                continue;
            for (Index i = 0; i < n; ++i)
                if (!is_high(i) && sys.gains(r, i) * sys.p_max(i) > rule.floor(th))
                    significant[static_cast<std::size_t>(i)].push_back(r);
        }
    }

    Eigen::VectorXd next(n);
    for (int it = 1; it <= opts.max_iters; ++it)
    {
        const Eigen::VectorXd r = effective_interference(p, sys);
        for (Index i = 0; i < n; ++i)
        {
            if (is_high(i))
                next(i) = tpc_update(r(i), targets(i));
            else if (prioritized)
                next(i) = std::min(base_update(base, r(i), targets(i)), cap(i));
            else
                next(i) = base_update(base, r(i), targets(i));
        }

        bool caps_moved = false;
        if (backoff)
        {
            const Eigen::VectorXd load = lpue_interference(next, sys);
            for (Index i = 0; i < n; ++i)
            {
                const auto& mine = significant[static_cast<std::size_t>(i)];
                if (mine.empty())
                    continue;
                bool violated = false;
                bool slack = true;
                for (Index m : mine)
                {
                    violated = violated || load(m) > sys.protection(m);
                    slack = slack && kBackoffUp * load(m) <= sys.protection(m);
                }
                double updated = cap(i);
                if (violated)
                    updated = cap(i) * kBackoffDown;
                else if (slack)
                    updated = std::min(sys.p_max(i), cap(i) * kBackoffUp);
                if (updated != cap(i))
                {
                    cap(i) = updated;
                    caps_moved = true;
                }
            }
        }

        const double step = (next - p).lpNorm<Eigen::Infinity>();
        const double scale = std::max(p.lpNorm<Eigen::Infinity>(), kStepFloor);
        p = next;
        st.iterations = it;
        if (step / scale < opts.tol && !caps_moved)
        {
            st.converged = true;
            break;
        }
    }

    st.p = p;
    if (prioritized)
        st.caps = cap;
    evaluate_support(st, sys, opts.tol_support);
    return st;
}

PowerState run_power_control(Algorithm alg, const NetworkSnapshot& snapshot, const GainMatrix& gains,
                             const AssociationMap& assoc, double ith_w, const PowerControlOptions& opts)
{
    return run_power_control(alg, make_link_system(snapshot, gains, assoc, ith_w), opts);
}

Eigen::MatrixXd coupling_matrix(const LinkSystem& sys)
{
    const Index n = sys.users();
    Eigen::MatrixXd f(n, n);
    for (Index i = 0; i < n; ++i)
    {
        const Index s = sys.serving[static_cast<std::size_t>(i)];
        const double scale = sys.target_sir(i) / sys.gains(s, i);
        for (Index j = 0; j < n; ++j)
            f(i, j) = i == j ? 0.0 : scale * sys.gains(s, j);
    }
    return f;
}

Eigen::VectorXd noise_vector(const LinkSystem& sys)
{
    Eigen::VectorXd u(sys.users());
    for (Index i = 0; i < sys.users(); ++i)
    {
        const Index s = sys.serving[static_cast<std::size_t>(i)];
        u(i) = sys.target_sir(i) * sys.noise(s) / sys.gains(s, i);
    }
    return u;
}

Eigen::VectorXd fixed_point_oracle(const LinkSystem& sys)
{
    sys.validate();
    const FeasibilityResult feas = feasibility_check(sys);
    if (!feas.feasible)
    {
        std::ostringstream os;
        os << "targets are infeasible: spectral radius " << feas.spectral_radius << " >= 1";
        throw NumericError(os.str());
    }
    const Eigen::MatrixXd f = coupling_matrix(sys);
    const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(f.rows(), f.cols()) - f;
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (!lu.isInvertible())
        throw NumericError("fixed-point system I - F is singular");
    Eigen::VectorXd p = lu.solve(noise_vector(sys));
    if (!p.allFinite() || (p.array() <= 0.0).any())
        throw NumericError("fixed-point solve produced a non-positive power vector");
    return p;
}

double spectral_radius(const Eigen::MatrixXd& a, double tol, int max_iters, int* iterations)
{
    if (a.rows() != a.cols())
        throw InvalidParameter("spectral_radius needs a square matrix");
    if (!a.allFinite() || (a.array() < 0.0).any())
        throw InvalidParameter("spectral_radius needs a finite non-negative matrix");
    const Index n = a.rows();
    if (n == 0)
        return 0.0;
    const double scale = a.maxCoeff();
    if (scale == 0.0)
        return 0.0;

    // Iterate on a + c I with c tracking the current upper bound on rho. The
    // shift removes the other eigenvalues of modulus rho (periodic matrices
    // such as [[0, a], [a, 0]]) and, unlike a fixed shift, does not slow the
    // iteration down when rho is small next to the largest entry.
    const Eigen::MatrixXd b = a / scale;
    Eigen::VectorXd x = Eigen::VectorXd::Ones(n);
    double shift = 1.0;
    for (int it = 1; it <= max_iters; ++it)
    {
        const Eigen::VectorXd y = b * x;
        const Eigen::ArrayXd ratio = y.array() / x.array();
        const double lo = ratio.minCoeff();
        const double hi = ratio.maxCoeff();
        if (iterations)
            *iterations = it;
        if (hi - lo <= tol * hi)
            return scale * 0.5 * (lo + hi);

        const Eigen::VectorXd z = y + shift * x;
        const Eigen::VectorXd next = z / z.maxCoeff();
        if ((next - x).lpNorm<Eigen::Infinity>() <= tol)
        {
            // Reducible matrix: the bracket cannot close, but the iterate has
            // settled on the dominant eigenvector.
            Index k = 0;
            next.maxCoeff(&k);
            return scale * (b * next)(k) / next(k);
        }
        shift = std::max(hi, 1e-12);
        x = next;
    }
    std::ostringstream os;
    os << "power iteration stagnated after " << max_iters << " iterations (n=" << n << ", scale=" << scale << ")";
    throw NumericError(os.str());
}

FeasibilityResult feasibility_check(const LinkSystem& sys)
{
    sys.validate();
    FeasibilityResult res;
    res.spectral_radius = spectral_radius(coupling_matrix(sys), 1e-10, 10'000, &res.iterations);
    res.feasible = res.spectral_radius < 1.0;
    return res;
}

}  // namespace hetnet
