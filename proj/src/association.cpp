#include "hetnet/association.hpp"

#include "hetnet/errors.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace hetnet {

namespace {

bool uplink(const GainMatrix& g) { return g.direction == Direction::uplink; }

double link_gain(const GainMatrix& g, int user, int bs) { return uplink(g) ? g.gains(bs, user) : g.gains(user, bs); }

// Interference plus noise seen on the (user, bs) link with every other
// transmitter at its reference power.
double interference_on_link(const ScoringContext& ctx, int user, int bs)
{
    const auto& g = ctx.gains;
    const auto& p = ctx.reference_powers;
    if (uplink(g))
    {
        double total = g.noise(bs);
        for (Index j = 0; j < g.transmitters(); ++j)
            if (j != user)
                total += g.gains(bs, j) * p(j);
        return total;
    }
    double total = g.noise(user);
    for (Index b = 0; b < g.transmitters(); ++b)
        if (b != bs)
            total += g.gains(user, b) * p(b);
    return total;
}

double signal_on_link(const ScoringContext& ctx, int user, int bs)
{
    const double g = link_gain(ctx.gains, user, bs);
    return g * (uplink(ctx.gains) ? ctx.reference_powers(user) : ctx.reference_powers(bs));
}

}  // namespace

Eigen::VectorXd access_probabilities(const NetworkSnapshot& snapshot, Scheduler scheduler)
{
    Eigen::VectorXd p(static_cast<Index>(snapshot.base_stations.size()));
    for (const auto& bs : snapshot.base_stations)
        p(bs.id) = access_probability({bs.id, bs.incumbents, scheduler});
    return p;
}

ScoringContext::ScoringContext(const NetworkSnapshot& s, const GainMatrix& g, Eigen::VectorXd ref,
                               Eigen::VectorXd access)
    : snapshot(s), gains(g), reference_powers(std::move(ref)), access_probs(std::move(access))
{
    const auto n_bs = static_cast<Index>(s.base_stations.size());
    const auto n_ue = static_cast<Index>(s.users.size());
    if (uplink(g) ? (g.receivers() != n_bs || g.transmitters() != n_ue) : (g.receivers() != n_ue || g.transmitters() != n_bs))
        throw InvalidParameter("gain matrix does not match the snapshot");

    if (reference_powers.size() == 0)
    {
        reference_powers.resize(g.transmitters());
        if (uplink(g))
            for (const auto& ue : s.users)
                reference_powers(ue.id) = ue.p_max;
        else
            for (const auto& bs : s.base_stations)
                reference_powers(bs.id) = bs.tx_power;
    }
    if (reference_powers.size() != g.transmitters())
        throw InvalidParameter("reference powers must have one entry per transmitter");
    if (access_probs.size() == 0)
        access_probs = access_probabilities(s, Scheduler::round_robin);
    if (access_probs.size() != n_bs)
        throw InvalidParameter("access probabilities must have one entry per base station");
}

double effective_interference_via(const ScoringContext& ctx, int user, int bs)
{
    return interference_on_link(ctx, user, bs) / link_gain(ctx.gains, user, bs);
}

double score(const ScoringContext& ctx, int user, int bs, const AssociationMetric& metric)
{
    switch (metric.scheme)
    {
        case Scheme::rsrp: return signal_on_link(ctx, user, bs);
        case Scheme::cre:
        {
            const double rsrp = signal_on_link(ctx, user, bs);
            const bool biased = ctx.snapshot.base_stations[static_cast<std::size_t>(bs)].tier == Tier::small;
            return biased ? rsrp * std::pow(10.0, metric.bias_db / 10.0) : rsrp;
        }
        case Scheme::rsrq: return signal_on_link(ctx, user, bs) / interference_on_link(ctx, user, bs);
        case Scheme::mei: return -effective_interference_via(ctx, user, bs);
        case Scheme::distance: return link_gain(ctx.gains, user, bs);
        case Scheme::resource: return ctx.access_probs(bs);
        case Scheme::hybrid: return link_gain(ctx.gains, user, bs) * ctx.access_probs(bs);
        case Scheme::home:
        case Scheme::mei_multi: break;
    }
    throw ConfigError("scheme", 0, "scheme '" + std::string(to_string(metric.scheme)) + "' has no per-BS score");
}

AssociationMap associate(const ScoringContext& ctx, const AssociationMetric& metric)
{
    if (metric.scheme == Scheme::mei_multi)
        return multi_associate(ctx, metric.epsilon);
    if (metric.bias_db < 0.0)
        throw InvalidParameter("bias_db must be non-negative");

    const Direction dir = ctx.gains.direction;
    const auto n_bs = static_cast<int>(ctx.snapshot.base_stations.size());
    AssociationMap map;
    auto& serving = map.serving(dir);
    (dir == Direction::uplink ? map.uplink_scheme : map.downlink_scheme) = metric.scheme;

    if (metric.scheme == Scheme::home)
    {
        for (const auto& ue : ctx.snapshot.users)
            serving.push_back({ue.home_bs, {ue.home_bs}});
        return map;
    }

    const bool load_aware = metric.scheme == Scheme::resource || metric.scheme == Scheme::hybrid;
    ScoringContext local = ctx;
    std::vector<int> load;
    for (const auto& bs : ctx.snapshot.base_stations)
        load.push_back(bs.incumbents);

    for (const auto& ue : ctx.snapshot.users)
    {
        int best = 0;
        double best_score = -std::numeric_limits<double>::infinity();
        for (int b = 0; b < n_bs; ++b)
        {
            const double s = score(local, ue.id, b, metric);
            if (s > best_score)
            {
                best_score = s;
                best = b;
            }
        }
        serving.push_back({best, {best}});
        if (load_aware)
        {
            ++load[static_cast<std::size_t>(best)];
            local.access_probs(best) = access_probability({best, load[static_cast<std::size_t>(best)], metric.scheduler});
        }
    }
    return map;
}

AssociationMap associate(const NetworkSnapshot& snapshot, const GainMatrix& gains, Scheme scheme)
{
    return associate(ScoringContext(snapshot, gains), AssociationMetric{scheme});
}

AssociationMap multi_associate(const ScoringContext& ctx, double epsilon)
{
    if (!(epsilon >= 0.0))
        throw InvalidParameter("epsilon must be non-negative");

    const Direction dir = ctx.gains.direction;
    const auto n_bs = static_cast<int>(ctx.snapshot.base_stations.size());
    AssociationMap map;
    auto& serving = map.serving(dir);
    (dir == Direction::uplink ? map.uplink_scheme : map.downlink_scheme) = Scheme::mei_multi;

    std::vector<double> r(static_cast<std::size_t>(n_bs));
    for (const auto& ue : ctx.snapshot.users)
    {
        int best = 0;
        for (int b = 0; b < n_bs; ++b)
        {
            r[static_cast<std::size_t>(b)] = effective_interference_via(ctx, ue.id, b);
            if (r[static_cast<std::size_t>(b)] < r[static_cast<std::size_t>(best)])
                best = b;
        }
        const double window = (1.0 + epsilon) * r[static_cast<std::size_t>(best)];
        ServingSet set{best, {}};
        for (int b = 0; b < n_bs; ++b)
            if (r[static_cast<std::size_t>(b)] <= window)
                set.members.push_back(b);
        serving.push_back(std::move(set));
    }
    return map;
}

void merge_direction(AssociationMap& into, const AssociationMap& from, Direction direction)
{
    into.serving(direction) = from.serving(direction);
    if (direction == Direction::uplink)
        into.uplink_scheme = from.uplink_scheme;
    else
        into.downlink_scheme = from.downlink_scheme;
}

}  // namespace hetnet
