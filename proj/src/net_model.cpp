#include "hetnet/net_model.hpp"

#include "hetnet/config.hpp"
#include "hetnet/errors.hpp"
#include "hetnet/rng.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace hetnet {

namespace {

// Independent RNG streams per generator, so adding draws to one scenario
// never shifts the other.
constexpr std::uint64_t kGridStream = 2;
constexpr std::uint64_t kDiscStream = 3;

struct Square
{
    double cx;
    double cy;
};

bool overlaps(const Square& a, const Square& b, double side)
{
    return std::abs(a.cx - b.cx) < side && std::abs(a.cy - b.cy) < side;
}

Point uniform_in_square(Rng& rng, Point centre, double side)
{
    const double x = rng.uniform(centre.x - side / 2, centre.x + side / 2);
    const double y = rng.uniform(centre.y - side / 2, centre.y + side / 2);
    return {x, y};
}

Point uniform_in_disc(Rng& rng, double radius)
{
    const double r = radius * std::sqrt(rng.uniform());
    const double theta = 2.0 * std::numbers::pi * rng.uniform();
    return {r * std::cos(theta), r * std::sin(theta)};
}

}  // namespace

double path_gain(double distance, double exponent, double d_min, double k)
{
    if (!std::isfinite(distance) || !std::isfinite(exponent) || !std::isfinite(d_min) || !std::isfinite(k))
        throw InvalidParameter("path_gain: non-finite input");
    if (distance < 0.0)
        throw InvalidParameter("path_gain: negative distance");
    if (exponent <= 2.0)
        throw InvalidParameter("path_gain: exponent must exceed 2");
    if (d_min <= 0.0 || k <= 0.0)
        throw InvalidParameter("path_gain: d_min and k must be positive");
    return k * std::pow(std::max(distance, d_min), -exponent);
}

NetworkSnapshot generate_fig2_snapshot(const SimConfig& cfg, int n_small, std::uint64_t seed)
{
    if (n_small < 1 || n_small > 64)
        throw InvalidParameter("grid scenario needs 1..64 small cells per macro, got " + std::to_string(n_small));

    Rng rng(seed, kGridStream);
    NetworkSnapshot snap;
    snap.direction = Direction::uplink;
    snap.geometry = Geometry::grid;
    snap.seed = seed;

    const int rows = cfg.grid_rows;
    const double side = cfg.macro_side_m;
    const double small = cfg.small_side_m;
    const int n_macro = rows * rows;

    for (int m = 0; m < n_macro; ++m)
    {
        BaseStation bs;
        bs.id = m;
        bs.tier = Tier::macro;
        bs.priority = Priority::high;
        bs.position = {(m % rows + 0.5) * side, (m / rows + 0.5) * side};
        bs.tx_power = cfg.macro_w;
        bs.cell_extent = side;
        snap.base_stations.push_back(bs);
    }

    for (int m = 0; m < n_macro; ++m)
    {
        const double x0 = (m % rows) * side;
        const double y0 = (m / rows) * side;
        std::vector<Square> placed;
        for (int s = 0; s < n_small; ++s)
        {
            bool ok = false;
            for (int attempt = 0; attempt < kPlacementRetries && !ok; ++attempt)
            {
                const Square cand{rng.uniform(x0 + small / 2, x0 + side - small / 2),
                                  rng.uniform(y0 + small / 2, y0 + side - small / 2)};
                ok = true;
                for (const auto& other : placed)
                {
                    if (overlaps(cand, other, small))
                    {
                        ok = false;
                        break;
                    }
                }
                if (ok)
                    placed.push_back(cand);
            }
            if (!ok)
                throw GenerationError("cannot place " + std::to_string(n_small) + " non-overlapping small cells in macro "
                                      + std::to_string(m) + " after " + std::to_string(kPlacementRetries)
                                      + " retries (n_small=" + std::to_string(n_small)
                                      + ", seed=" + std::to_string(seed) + ")");
        }
        for (const auto& sq : placed)
        {
            BaseStation bs;
            bs.id = static_cast<int>(snap.base_stations.size());
            bs.tier = Tier::small;
            bs.priority = Priority::low;
            bs.position = {sq.cx, sq.cy};
            bs.tx_power = cfg.small_w;
            bs.cell_extent = small;
            snap.base_stations.push_back(bs);
        }
    }

    const double target = cfg.target_sir_linear();
    auto add_user = [&](const BaseStation& home) {
        UserTerminal ue;
        ue.id = static_cast<int>(snap.users.size());
        ue.home_bs = home.id;
        ue.priority = home.priority;
        ue.position = uniform_in_square(rng, home.position, home.cell_extent);
        ue.p_max = cfg.pmax_w;
        ue.target_sir = target;
        ue.opc_target = cfg.opc_eta;
        snap.users.push_back(ue);
    };

    for (int m = 0; m < n_macro; ++m)
        for (int k = 0; k < cfg.hpue_per_macro; ++k)
            add_user(snap.base_stations[static_cast<std::size_t>(m)]);
    for (std::size_t b = static_cast<std::size_t>(n_macro); b < snap.base_stations.size(); ++b)
        for (int k = 0; k < cfg.lpue_per_small; ++k)
            add_user(snap.base_stations[b]);

    return snap;
}

NetworkSnapshot generate_fig3_snapshot(const SimConfig& cfg, int n_small, std::uint64_t seed)
{
    if (n_small < 0)
        throw InvalidParameter("negative small-cell count");

    Rng rng(seed, kDiscStream);
    NetworkSnapshot snap;
    snap.direction = Direction::downlink;
    snap.geometry = Geometry::disc;
    snap.seed = seed;

    BaseStation macro;
    macro.id = 0;
    macro.tier = Tier::macro;
    macro.priority = Priority::high;
    macro.position = {0.0, 0.0};
    macro.tx_power = cfg.macro_w;
    macro.cell_extent = cfg.disc_radius_m;
    snap.base_stations.push_back(macro);

    UserTerminal tagged;
    tagged.id = 0;
    tagged.home_bs = 0;
    tagged.priority = Priority::high;
    tagged.position = uniform_in_disc(rng, cfg.disc_radius_m);
    tagged.p_max = cfg.pmax_w;
    tagged.target_sir = cfg.target_sir_linear();
    tagged.opc_target = cfg.opc_eta;
    snap.users.push_back(tagged);

    for (int s = 0; s < n_small; ++s)
    {
        BaseStation bs;
        bs.id = s + 1;
        bs.tier = Tier::small;
        bs.priority = Priority::low;
        bs.position = uniform_in_disc(rng, cfg.disc_radius_m);
        bs.tx_power = cfg.small_w;
        bs.cell_extent = cfg.small_side_m;
        snap.base_stations.push_back(bs);
    }

    // Non-uniform load: each cell's Poisson mean is itself random.
    for (auto& bs : snap.base_stations)
    {
        const double mean = rng.uniform(cfg.lambda_lo, cfg.lambda_hi);
        bs.incumbents = rng.poisson(mean);
    }
    return snap;
}

GainMatrix build_gain_matrix(const NetworkSnapshot& snapshot, const SimConfig& cfg)
{
    return build_gain_matrix(snapshot, cfg, snapshot.direction);
}

GainMatrix build_gain_matrix(const NetworkSnapshot& snapshot, const SimConfig& cfg, Direction direction)
{
    const auto n_bs = static_cast<Index>(snapshot.base_stations.size());
    const auto n_ue = static_cast<Index>(snapshot.users.size());
    const bool up = direction == Direction::uplink;

    GainMatrix gm;
    gm.direction = direction;
    gm.gains.resize(up ? n_bs : n_ue, up ? n_ue : n_bs);
    for (Index b = 0; b < n_bs; ++b)
    {
        for (Index u = 0; u < n_ue; ++u)
        {
            const double d = distance(snapshot.base_stations[static_cast<std::size_t>(b)].position,
                                      snapshot.users[static_cast<std::size_t>(u)].position);
            const double g = path_gain(d, cfg.pathloss_exponent, cfg.d_min_m);
            if (up)
                gm.gains(b, u) = g;
            else
                gm.gains(u, b) = g;
        }
    }
    gm.noise = Eigen::VectorXd::Constant(gm.gains.rows(), cfg.noise_w);
    return gm;
}

double compute_sir(int user, const Eigen::VectorXd& powers, const GainMatrix& gains, const AssociationMap& assoc)
{
    const auto& serving = assoc.serving(gains.direction);
    if (user < 0 || static_cast<std::size_t>(user) >= serving.size())
        throw InvalidParameter("compute_sir: user " + std::to_string(user) + " is not associated");
    if (powers.size() != gains.transmitters())
        throw InvalidParameter("compute_sir: power vector does not match transmitter count");

    const Index own = gains.direction == Direction::uplink ? user : serving[static_cast<std::size_t>(user)].primary;
    const Index rx = gains.direction == Direction::uplink ? serving[static_cast<std::size_t>(user)].primary : user;

    double interference = gains.noise(rx);
    for (Index t = 0; t < gains.transmitters(); ++t)
        if (t != own)
            interference += gains.gains(rx, t) * powers(t);
    return gains.gains(rx, own) * powers(own) / interference;
}

}  // namespace hetnet
