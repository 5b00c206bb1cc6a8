#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace hetnet {

using Index = Eigen::Index;

enum class Tier { macro, small };
enum class Priority { high, low };
enum class Direction { uplink, downlink };
enum class Geometry { grid, disc };

std::string_view to_string(Tier t);
std::string_view to_string(Priority p);
std::string_view to_string(Direction d);
std::string_view to_string(Geometry g);

struct Point
{
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Point&) const = default;
};

double distance(Point a, Point b);

struct BaseStation
{
    int id = 0;
    Tier tier = Tier::macro;
    Priority priority = Priority::high;
    Point position;
    double tx_power = 0.0;    ///< downlink budget, watts
    double cell_extent = 0.0; ///< square side (grid) or disc radius (disc), meters
    int incumbents = 0;       ///< users already served; drives access probability

    bool operator==(const BaseStation&) const = default;
};

struct UserTerminal
{
    int id = 0;
    int home_bs = 0;
    Priority priority = Priority::low;
    Point position;
    double p_max = 0.0;      ///< uplink budget, watts
    double target_sir = 0.0; ///< linear
    double opc_target = 0.0; ///< OPC constant, watts^2

    bool operator==(const UserTerminal&) const = default;
};

struct NetworkSnapshot
{
    std::vector<BaseStation> base_stations;
    std::vector<UserTerminal> users;
    Direction direction = Direction::uplink;
    std::uint64_t seed = 0;
    Geometry geometry = Geometry::grid;

    bool operator==(const NetworkSnapshot&) const = default;
};

/// Linear path gains, rows = receivers, columns = transmitters.
/// Uplink: receivers are base stations and transmitters are users.
/// Downlink: receivers are users and transmitters are base stations.
struct GainMatrix
{
    Eigen::MatrixXd gains;
    Eigen::VectorXd noise; ///< per receiver, watts
    Direction direction = Direction::uplink;

    Index receivers() const { return gains.rows(); }
    Index transmitters() const { return gains.cols(); }
};

/// Serving base stations of one user. `primary` is the member used for SIR
/// and power control; `members` is sorted ascending and contains `primary`.
struct ServingSet
{
    int primary = 0;
    std::vector<int> members;

    bool operator==(const ServingSet&) const = default;
};

enum class Scheme { home, rsrp, rsrq, cre, mei, distance, resource, hybrid, mei_multi };

std::string_view to_string(Scheme s);
Scheme parse_scheme(std::string_view s);

struct AssociationMap
{
    std::vector<ServingSet> uplink;
    std::vector<ServingSet> downlink;
    std::optional<Scheme> uplink_scheme;
    std::optional<Scheme> downlink_scheme;

    const std::vector<ServingSet>& serving(Direction d) const { return d == Direction::uplink ? uplink : downlink; }
    std::vector<ServingSet>& serving(Direction d) { return d == Direction::uplink ? uplink : downlink; }

    bool operator==(const AssociationMap&) const = default;
};

}  // namespace hetnet
