#include "hetnet/config.hpp"

#include "hetnet/errors.hpp"

#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace hetnet {

namespace {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double to_double(std::string_view key, std::string_view v)
{
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(out))
        throw ConfigError(std::string(key), 0, "expected a finite number, got '" + std::string(v) + "'");
    return out;
}

template <typename Int>
Int to_int(std::string_view key, std::string_view v)
{
    Int out{};
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
        throw ConfigError(std::string(key), 0, "expected an integer, got '" + std::string(v) + "'");
    return out;
}

std::vector<int> to_int_list(std::string_view key, std::string_view v)
{
    std::vector<int> out;
    while (!v.empty())
    {
        const auto comma = v.find(',');
        const auto item = trim(v.substr(0, comma));
        if (item.empty())
            throw ConfigError(std::string(key), 0, "empty list element");
        out.push_back(to_int<int>(key, item));
        if (comma == std::string_view::npos)
            break;
        v.remove_prefix(comma + 1);
    }
    return out;
}

std::string fmt_double(double d) { return fmt::format("{}", d); }

std::string fmt_list(const std::vector<int>& v)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i)
        out += (i ? "," : "") + std::to_string(v[i]);
    return out;
}

Geometry parse_geometry(std::string_view s)
{
    if (s == "grid")
        return Geometry::grid;
    if (s == "disc")
        return Geometry::disc;
    throw ConfigError("geometry", 0, "expected 'grid' or 'disc', got '" + std::string(s) + "'");
}

struct KeySpec
{
    std::string key;
    std::function<void(SimConfig&, std::string_view)> set;
    std::function<std::string(const SimConfig&)> get;
};

#define HETNET_DOUBLE(name, field) \
    KeySpec{name, [](SimConfig& c, std::string_view v) { c.field = to_double(name, v); }, \
            [](const SimConfig& c) { return fmt_double(c.field); }}
#define HETNET_INT(name, field) \
    KeySpec{name, [](SimConfig& c, std::string_view v) { c.field = to_int<int>(name, v); }, \
            [](const SimConfig& c) { return std::to_string(c.field); }}

const std::vector<KeySpec>& key_table()
{
    static const std::vector<KeySpec> table{
        KeySpec{"geometry", [](SimConfig& c, std::string_view v) { c.geometry = parse_geometry(v); },
                [](const SimConfig& c) { return std::string(to_string(c.geometry)); }},
        HETNET_DOUBLE("noise_w", noise_w),
        HETNET_DOUBLE("target_sir_db", target_sir_db),
        HETNET_DOUBLE("opc_eta", opc_eta),
        HETNET_DOUBLE("ith_w", ith_w),
        HETNET_DOUBLE("bias_db", bias_db),
        HETNET_DOUBLE("epsilon", epsilon),
        KeySpec{"scheduler", [](SimConfig& c, std::string_view v) { c.scheduler = parse_scheduler(v); },
                [](const SimConfig& c) { return std::string(to_string(c.scheduler)); }},
        HETNET_INT("grid.rows", grid_rows),
        HETNET_DOUBLE("grid.macro_side_m", macro_side_m),
        HETNET_INT("grid.hpue_per_macro", hpue_per_macro),
        HETNET_DOUBLE("small.side_m", small_side_m),
        HETNET_INT("small.per_macro", small_per_macro),
        HETNET_INT("small.lpue_per_cell", lpue_per_small),
        HETNET_DOUBLE("disc.radius_m", disc_radius_m),
        HETNET_DOUBLE("disc.lambda_lo", lambda_lo),
        HETNET_DOUBLE("disc.lambda_hi", lambda_hi),
        HETNET_DOUBLE("channel.pathloss_exponent", pathloss_exponent),
        HETNET_DOUBLE("channel.d_min_m", d_min_m),
        HETNET_DOUBLE("power.macro_w", macro_w),
        HETNET_DOUBLE("power.small_w", small_w),
        HETNET_DOUBLE("power.pmax_w", pmax_w),
        KeySpec{"assoc.uplink", [](SimConfig& c, std::string_view v) { c.assoc_uplink = parse_scheme(v); },
                [](const SimConfig& c) { return std::string(to_string(c.assoc_uplink)); }},
        KeySpec{"assoc.downlink", [](SimConfig& c, std::string_view v) { c.assoc_downlink = parse_scheme(v); },
                [](const SimConfig& c) { return std::string(to_string(c.assoc_downlink)); }},
        KeySpec{"pc.algorithm", [](SimConfig& c, std::string_view v) { c.pc_algorithm = parse_algorithm(v); },
                [](const SimConfig& c) { return std::string(to_string(c.pc_algorithm)); }},
        KeySpec{"pc.prioritized_mode", [](SimConfig& c, std::string_view v) { c.pc_mode = parse_prioritized_mode(v); },
                [](const SimConfig& c) { return std::string(to_string(c.pc_mode)); }},
        HETNET_INT("pc.max_iters", pc_max_iters),
        HETNET_DOUBLE("pc.tol", pc_tol),
        HETNET_DOUBLE("pc.tol_support", pc_tol_support),
        HETNET_DOUBLE("pc.floor_fraction", pc_floor_fraction),
        HETNET_INT("pc.reassoc_every", capc_reassoc_every),
        HETNET_INT("mc.snapshots", snapshots),
        KeySpec{"mc.base_seed", [](SimConfig& c, std::string_view v) { c.base_seed = to_int<std::uint64_t>("mc.base_seed", v); },
                [](const SimConfig& c) { return std::to_string(c.base_seed); }},
        KeySpec{"sweep.n_small", [](SimConfig& c, std::string_view v) { c.sweep_n_small = to_int_list("sweep.n_small", v); },
                [](const SimConfig& c) { return fmt_list(c.sweep_n_small); }},
    };
    return table;
}

#undef HETNET_DOUBLE
#undef HETNET_INT

const KeySpec* find_key(std::string_view key)
{
    for (const auto& spec : key_table())
        if (spec.key == key)
            return &spec;
    return nullptr;
}

// Accumulates assignments with their source lines, then resolves defaults
// that depend on other keys.
class ConfigBuilder
{
public:
    void assign(std::string_view key, std::string_view value, int line)
    {
        const KeySpec* spec = find_key(key);
        if (!spec)
            throw ConfigError(std::string(key), line, "unknown key");
        if (value.empty())
            throw ConfigError(std::string(key), line, "missing value");
        try
        {
            spec->set(cfg_, value);
        }
        catch (const ConfigError& e)
        {
            throw ConfigError(std::string(key), line, strip_prefix(e.what()));
        }
        lines_[std::string(key)] = line;
    }

    SimConfig finish()
    {
        if (!lines_.count("ith_w"))
            cfg_.ith_w = 10.0 * cfg_.noise_w;
        if (!lines_.count("sweep.n_small"))
            cfg_.sweep_n_small = {cfg_.small_per_macro};
        try
        {
            validate(cfg_);
        }
        catch (const ConfigError& e)
        {
            const auto it = lines_.find(e.key());
            throw ConfigError(e.key(), it == lines_.end() ? 0 : it->second, strip_prefix(e.what()));
        }
        return cfg_;
    }

private:
    static std::string strip_prefix(const std::string& what)
    {
        const auto pos = what.find("': ");
        return pos == std::string::npos ? what : what.substr(pos + 3);
    }

    SimConfig cfg_;
    std::map<std::string, int> lines_;
};

void require(bool ok, const char* key, const std::string& what)
{
    if (!ok)
        throw ConfigError(key, 0, what);
}

}  // namespace

double SimConfig::target_sir_linear() const { return std::pow(10.0, target_sir_db / 10.0); }

PowerControlOptions SimConfig::pc_options() const
{
    PowerControlOptions o;
    o.max_iters = pc_max_iters;
    o.tol = pc_tol;
    o.tol_support = pc_tol_support;
    o.mode = pc_mode;
    o.floor_fraction = pc_floor_fraction;
    return o;
}

const std::vector<std::string>& config_keys()
{
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k;
        for (const auto& spec : key_table())
            k.push_back(spec.key);
        return k;
    }();
    return keys;
}

void validate(const SimConfig& c)
{
    require(c.grid_rows >= 1 && c.grid_rows <= 20, "grid.rows", "must be in [1, 20]");
    require(c.macro_side_m > 0.0, "grid.macro_side_m", "must be positive");
    require(c.hpue_per_macro >= 1, "grid.hpue_per_macro", "must be at least 1");
    require(c.small_side_m > 0.0 && c.small_side_m <= c.macro_side_m, "small.side_m",
            "must be positive and no larger than grid.macro_side_m");
    require(c.small_per_macro >= 0 && c.small_per_macro <= 64, "small.per_macro", "must be in [0, 64]");
    require(c.lpue_per_small >= 1, "small.lpue_per_cell", "must be at least 1");
    require(c.disc_radius_m > 0.0, "disc.radius_m", "must be positive");
    require(c.lambda_lo >= 0.0, "disc.lambda_lo", "must be non-negative");
    require(c.lambda_hi >= c.lambda_lo && c.lambda_hi <= 500.0, "disc.lambda_hi", "must be in [disc.lambda_lo, 500]");
    require(c.pathloss_exponent > 2.0, "channel.pathloss_exponent", "must exceed 2");
    require(c.d_min_m > 0.0, "channel.d_min_m", "must be positive");
    require(c.macro_w > 0.0, "power.macro_w", "must be positive");
    require(c.small_w > 0.0, "power.small_w", "must be positive");
    require(c.pmax_w > 0.0, "power.pmax_w", "must be positive");
    require(c.noise_w > 0.0, "noise_w", "must be positive");
    require(std::abs(c.target_sir_db) <= 100.0, "target_sir_db", "must be within +-100 dB");
    require(c.opc_eta > 0.0, "opc_eta", "must be positive");
    require(c.ith_w > 0.0, "ith_w", "must be positive");
    require(c.bias_db >= 0.0, "bias_db", "must be non-negative");
    require(c.epsilon >= 0.0, "epsilon", "must be non-negative");
    require(c.pc_max_iters >= 1, "pc.max_iters", "must be at least 1");
    require(c.pc_tol > 0.0, "pc.tol", "must be positive");
    require(c.pc_tol_support >= 0.0 && c.pc_tol_support < 1.0, "pc.tol_support", "must be in [0, 1)");
    require(c.pc_floor_fraction >= 0.0 && c.pc_floor_fraction < 1.0, "pc.floor_fraction", "must be in [0, 1)");
    require(c.capc_reassoc_every >= 1, "pc.reassoc_every", "must be at least 1");
    require(c.snapshots >= 1, "mc.snapshots", "must be at least 1");
    require(c.geometry == Geometry::grid || c.pc_algorithm == Algorithm::none, "pc.algorithm",
            "disc scenarios keep BSs at their budget; use 'none'");
    require(!c.sweep_n_small.empty(), "sweep.n_small", "must not be empty");
    for (int n : c.sweep_n_small)
    {
        if (c.geometry == Geometry::grid)
            require(n >= 1 && n <= 64, "sweep.n_small", "grid sweep values must be in [1, 64]");
        else
            require(n >= 0, "sweep.n_small", "disc sweep values must be non-negative");
    }
}

SimConfig parse_config_text(std::string_view text, const std::vector<std::string>& overrides)
{
    ConfigBuilder builder;
    std::string section;
    int line_no = 0;
    std::istringstream in{std::string(text)};
    for (std::string raw; std::getline(in, raw);)
    {
        ++line_no;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        if (line.front() == '[')
        {
            if (line.back() != ']' || line.size() < 3)
                throw ConfigError(std::string(line), line_no, "malformed section header");
            section = std::string(trim(line.substr(1, line.size() - 2)));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError(std::string(line), line_no, "expected 'key = value'");
        const auto name = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (name.empty())
            throw ConfigError("", line_no, "missing key");
        const std::string key = section.empty() ? std::string(name) : section + "." + std::string(name);
        builder.assign(key, value, line_no);
    }
    for (const auto& ov : overrides)
    {
        const auto eq = ov.find('=');
        if (eq == std::string::npos)
            throw ConfigError(ov, 0, "override must look like key=value");
        builder.assign(trim(std::string_view(ov).substr(0, eq)), trim(std::string_view(ov).substr(eq + 1)), 0);
    }
    return builder.finish();
}

SimConfig parse_config(const std::filesystem::path& path, const std::vector<std::string>& overrides)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("--config", 0, "cannot read config file '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), overrides);
}

std::string emit_config(const SimConfig& cfg)
{
    std::string out;
    std::string section;
    for (const auto& spec : key_table())
    {
        const auto dot = spec.key.find('.');
        const std::string sec = dot == std::string::npos ? "" : spec.key.substr(0, dot);
        const std::string name = dot == std::string::npos ? spec.key : spec.key.substr(dot + 1);
        if (sec != section)
        {
            out += "\n[" + sec + "]\n";
            section = sec;
        }
        out += name + " = " + spec.get(cfg) + "\n";
    }
    return out;
}

}  // namespace hetnet
