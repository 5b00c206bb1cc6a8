#include "hetnet/scheduling.hpp"

#include "hetnet/errors.hpp"
#include "hetnet/rng.hpp"

#include <string>

namespace hetnet {

std::string_view to_string(Scheduler s) { return s == Scheduler::round_robin ? "round_robin" : "greedy"; }

Scheduler parse_scheduler(std::string_view s)
{
    if (s == "round_robin")
        return Scheduler::round_robin;
    if (s == "greedy")
        return Scheduler::greedy;
    throw ConfigError("scheduler", 0, "unknown scheduler '" + std::string(s) + "'");
}

double access_probability(const CellLoad& load)
{
    if (load.n_users < 0)
        throw InvalidParameter("negative cell load for BS " + std::to_string(load.bs_id));
    // Both schedulers give 1/(n+1): round-robin by equal shares, greedy by
    // exchangeability of i.i.d. fading across the n+1 contenders.
    return 1.0 / (static_cast<double>(load.n_users) + 1.0);
}

double greedy_access_prob_mc(int n_users, std::int64_t trials, std::uint64_t seed)
{
    if (n_users < 0)
        throw InvalidParameter("negative cell load");
    if (trials < 1)
        throw InvalidParameter("greedy_access_prob_mc needs at least one trial");

    Rng rng(seed, 0x5C4ED);
    std::int64_t wins = 0;
    for (std::int64_t t = 0; t < trials; ++t)
    {
        const double joiner = rng.exponential();
        bool strict_max = true;
        for (int k = 0; k < n_users; ++k)
        {
            // Draw every incumbent so the stream layout does not depend on outcomes.
            if (rng.exponential() >= joiner)
                strict_max = false;
        }
        if (strict_max)
            ++wins;
    }
    return static_cast<double>(wins) / static_cast<double>(trials);
}

}  // namespace hetnet
