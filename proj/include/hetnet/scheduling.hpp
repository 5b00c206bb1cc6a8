#pragma once

#include <cstdint>
#include <string_view>

namespace hetnet {

enum class Scheduler { round_robin, greedy };

std::string_view to_string(Scheduler s);
Scheduler parse_scheduler(std::string_view s);

struct CellLoad
{
    int bs_id = 0;
    int n_users = 0; ///< incumbents, not counting the prospective joiner
    Scheduler scheduler = Scheduler::round_robin;
};

/// Probability that a prospective joiner of the cell gets the channel.
///
/// Round-robin: the joiner becomes one of n+1 equally served users.
/// Greedy with i.i.d. continuous fading: the joiner's gain is the largest
/// of n+1 exchangeable draws with probability 1/(n+1). An empty cell gives 1.
double access_probability(const CellLoad& load);

/// Monte Carlo estimate of the greedy access probability: fraction of
/// trials in which the joiner's unit-mean exponential gain strictly exceeds
/// all `n_users` incumbent gains.
double greedy_access_prob_mc(int n_users, std::int64_t trials, std::uint64_t seed);

}  // namespace hetnet
