#include "hetnet/types.hpp"

#include "hetnet/errors.hpp"

#include <array>
#include <cmath>
#include <string>
#include <utility>

namespace hetnet {

std::string_view to_string(Tier t) { return t == Tier::macro ? "macro" : "small"; }
std::string_view to_string(Priority p) { return p == Priority::high ? "high" : "low"; }
std::string_view to_string(Direction d) { return d == Direction::uplink ? "uplink" : "downlink"; }
std::string_view to_string(Geometry g) { return g == Geometry::grid ? "grid" : "disc"; }

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

namespace {

constexpr std::array<std::pair<Scheme, std::string_view>, 9> kSchemeNames{{
    {Scheme::home, "home"},
    {Scheme::rsrp, "rsrp"},
    {Scheme::rsrq, "rsrq"},
    {Scheme::cre, "cre"},
    {Scheme::mei, "mei"},
    {Scheme::distance, "distance"},
    {Scheme::resource, "resource"},
    {Scheme::hybrid, "hybrid"},
    {Scheme::mei_multi, "mei_multi"},
}};

}  // namespace

std::string_view to_string(Scheme s)
{
    for (const auto& [scheme, name] : kSchemeNames)
        if (scheme == s)
            return name;
    return "?";
}

Scheme parse_scheme(std::string_view s)
{
    for (const auto& [scheme, name] : kSchemeNames)
        if (name == s)
            return scheme;
    throw ConfigError("scheme", 0, "unknown association scheme '" + std::string(s) + "'");
}

}  // namespace hetnet
