#pragma once

#include "hetnet/power_control.hpp"
#include "hetnet/scheduling.hpp"
#include "hetnet/types.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace hetnet {

/// Fully resolved simulation parameters. Field comments give the config key.
struct SimConfig
{
    Geometry geometry = Geometry::grid;           // geometry

    int grid_rows = 3;                            // grid.rows
    double macro_side_m = 1000.0;                 // grid.macro_side_m
    int hpue_per_macro = 5;                       // grid.hpue_per_macro
    double small_side_m = 200.0;                  // small.side_m
    int small_per_macro = 3;                      // small.per_macro
    int lpue_per_small = 4;                       // small.lpue_per_cell

    double disc_radius_m = 500.0;                 // disc.radius_m
    double lambda_lo = 1.0;                       // disc.lambda_lo
    double lambda_hi = 10.0;                      // disc.lambda_hi

    double pathloss_exponent = 4.0;               // channel.pathloss_exponent
    double d_min_m = 1.0;                         // channel.d_min_m

    double macro_w = 10.0;                        // power.macro_w
    double small_w = 1.0;                         // power.small_w
    double pmax_w = 1.0;                          // power.pmax_w
    double noise_w = 1e-13;                       // noise_w
    double target_sir_db = 0.0;                   // target_sir_db
    double opc_eta = 1e-5;                        // opc_eta
    double ith_w = 1e-12;                         // ith_w (defaults to 10 * noise_w)
    double bias_db = 0.0;                         // bias_db
    double epsilon = 0.0;                         // epsilon

    Scheduler scheduler = Scheduler::round_robin; // scheduler
    Scheme assoc_uplink = Scheme::home;           // assoc.uplink
    Scheme assoc_downlink = Scheme::rsrp;         // assoc.downlink

    Algorithm pc_algorithm = Algorithm::tpc;      // pc.algorithm
    PrioritizedMode pc_mode = PrioritizedMode::static_cap; // pc.prioritized_mode
    int pc_max_iters = 2000;                      // pc.max_iters
    double pc_tol = 1e-9;                         // pc.tol
    double pc_tol_support = 1e-6;                 // pc.tol_support
    double pc_floor_fraction = 1e-3;              // pc.floor_fraction
    int capc_reassoc_every = 5;                   // pc.reassoc_every

    int snapshots = 100;                          // mc.snapshots
    std::uint64_t base_seed = 1;                  // mc.base_seed
    std::vector<int> sweep_n_small{3};            // sweep.n_small

    double target_sir_linear() const;
    Direction direction() const { return geometry == Geometry::grid ? Direction::uplink : Direction::downlink; }
    Scheme scheme(Direction d) const { return d == Direction::uplink ? assoc_uplink : assoc_downlink; }
    PowerControlOptions pc_options() const;

    bool operator==(const SimConfig&) const = default;
};

/// Every accepted key, in emission order.
const std::vector<std::string>& config_keys();

/// Parses sectioned key-value text:
///
///     # comment
///     geometry = grid
///     [grid]
///     rows = 3          # -> grid.rows
///
/// Top-level dotted keys (`grid.rows = 3`) are accepted too. `overrides` are
/// `key=value` strings applied after the text. Unknown keys, malformed lines
/// and out-of-range values throw ConfigError naming the key and line.
SimConfig parse_config_text(std::string_view text, const std::vector<std::string>& overrides = {});
SimConfig parse_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

/// Throws ConfigError on the first invalid field.
void validate(const SimConfig& cfg);

/// Canonical text form; parse_config_text(emit_config(c)) == c.
std::string emit_config(const SimConfig& cfg);

/// Shipped presets (identical to configs/*.ini).
std::string_view fig2_default_text();
std::string_view fig3_default_text();

}  // namespace hetnet
