#include "shepherd/abstraction.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "shepherd/errors.hpp"
#include "shepherd/world.hpp"

namespace shepherd {

namespace {

constexpr std::array<std::string_view, kBehaviorCount> kBehaviorNames = {
    "SoloHerding", "GroupHerding", "SoloFollowing", "GroupFollowing", "SoloTransferring",
    "GroupTransferring",
};

// Slack for distances computed in floating point right at the diagonal.
constexpr double kEdgeSlack = 1e-9;

int clamp_bin(double ratio, int bins) {
    const double c = std::ceil(ratio);
    if (c <= 1.0) return 1;
    if (c >= bins) return bins;
    return static_cast<int>(c);
}

void check_distance(double distance, const AbstractionParams& params) {
    if (!(distance >= 0.0) || distance > params.diagonal() * (1.0 + kEdgeSlack)) {
        throw DomainError("distance " + std::to_string(distance) + " outside [0, R*sqrt(2)]");
    }
}

void check_angle(double degrees) {
    if (!(degrees >= 0.0) || degrees > 180.0 + kEdgeSlack) {
        throw DomainError("angle " + std::to_string(degrees) + " outside [0, 180]");
    }
}

}  // namespace

void AbstractionParams::validate() const {
    if (!(side > 0)) throw ConfigError("abstraction: R must be positive");
    if (!(distance_resolution > 1.0 && distance_resolution < diagonal())) {
        throw ConfigError("abstraction: d must satisfy 1 < d < R*sqrt(2)");
    }
    if (!(angle_resolution > 1.0 && angle_resolution < 180.0)) {
        throw ConfigError("abstraction: a must satisfy 1 < a < 180");
    }
}

double AbstractionParams::diagonal() const { return side * std::sqrt(2.0); }

int AbstractionParams::distance_bins() const {
    return std::max(1, static_cast<int>(std::floor(diagonal() / distance_resolution)));
}

int AbstractionParams::angle_bins() const {
    return std::max(1, static_cast<int>(std::floor(180.0 / angle_resolution)));
}

StateDelta operator-(const FractionalState& a, const FractionalState& b) {
    return {a.dist_target - b.dist_target, a.dist_herd - b.dist_herd, a.angle - b.angle};
}

std::string_view to_string(Behavior b) { return kBehaviorNames[index_of(b)]; }

std::optional<Behavior> parse_behavior(std::string_view name) {
    for (Behavior b : kAllBehaviors)
        if (kBehaviorNames[index_of(b)] == name) return b;
    return std::nullopt;
}

bool is_group(Behavior b) {
    return b == Behavior::GroupHerding || b == Behavior::GroupFollowing ||
           b == Behavior::GroupTransferring;
}
bool is_herding(Behavior b) { return b == Behavior::SoloHerding || b == Behavior::GroupHerding; }
bool is_following(Behavior b) {
    return b == Behavior::SoloFollowing || b == Behavior::GroupFollowing;
}
bool is_transferring(Behavior b) {
    return b == Behavior::SoloTransferring || b == Behavior::GroupTransferring;
}

int bin_distance(double distance, const AbstractionParams& params) {
    check_distance(distance, params);
    return clamp_bin(distance / params.distance_resolution, params.distance_bins());
}

int bin_angle(double degrees, const AbstractionParams& params) {
    check_angle(degrees);
    return clamp_bin(degrees / params.angle_resolution, params.angle_bins());
}

FractionalState solo_fractional(Vec2 agent, Vec2 target, Vec2 gcm, const AbstractionParams& params) {
    return {distance(agent, target) / params.distance_resolution,
            distance(agent, gcm) / params.distance_resolution,
            vertex_angle_deg(gcm, agent, target) / params.angle_resolution};
}

AbstractState solo_state(Vec2 agent, Vec2 target, Vec2 gcm, const AbstractionParams& params) {
    return {bin_distance(distance(agent, target), params), bin_distance(distance(agent, gcm), params),
            bin_angle(vertex_angle_deg(gcm, agent, target), params)};
}

FractionalState group_fractional(std::span<const Vec2> members, Vec2 target, Vec2 gcm,
                                 const AbstractionParams& params) {
    if (members.empty()) throw DomainError("group_fractional: no members");
    double to_target = 0.0;
    double to_herd = 0.0;
    double angle = 0.0;
    for (Vec2 m : members) {
        to_target += distance(m, target);
        to_herd += distance(m, gcm);
        angle += vertex_angle_deg(gcm, m, target);
    }
    const auto count = static_cast<double>(members.size());
    return {to_target / (count * params.distance_resolution),
            to_herd / (count * params.distance_resolution),
            angle / (count * params.angle_resolution)};
}

AbstractState group_state(std::span<const Vec2> members, Vec2 target, Vec2 gcm,
                          const AbstractionParams& params) {
    if (members.size() < 2) throw DomainError("group_state: needs at least two members");
    double to_target = 0.0;
    double to_herd = 0.0;
    double angle = 0.0;
    for (Vec2 m : members) {
        const double dt = distance(m, target);
        const double dc = distance(m, gcm);
        const double al = vertex_angle_deg(gcm, m, target);
        check_distance(dt, params);
        check_distance(dc, params);
        check_angle(al);
        to_target += dt;
        to_herd += dc;
        angle += al;
    }
    const auto count = static_cast<double>(members.size());
    return {clamp_bin(to_target / (count * params.distance_resolution), params.distance_bins()),
            clamp_bin(to_herd / (count * params.distance_resolution), params.distance_bins()),
            clamp_bin(angle / (count * params.angle_resolution), params.angle_bins())};
}

std::int64_t state_space_size(const AbstractionParams& params) {
    const auto dist = static_cast<std::int64_t>(params.distance_bins());
    return dist * dist * static_cast<std::int64_t>(params.angle_bins());
}

Zone zone_of(Vec2 query, const Rect& corral, Cell entrance) {
    const bool left = entrance.x == corral.x_min;
    const bool right = entrance.x == corral.x_max;
    const bool bottom = entrance.y == corral.y_min;
    const bool top = entrance.y == corral.y_max;
    const bool on_border = corral.contains(entrance) && (left || right || bottom || top);
    if (!on_border) throw DomainError("zone_of: entrance is not on the corral border");
    bool outward = false;
    if (left) {
        outward = query.x < corral.x_min;
    } else if (right) {
        outward = query.x > corral.x_max;
    } else if (bottom) {
        outward = query.y < corral.y_min;
    } else {
        outward = query.y > corral.y_max;
    }
    return outward ? Zone::A : Zone::B;
}

Zone zone_of(Vec2 query, const GridMap& map, Cell entrance) {
    return zone_of(query, map.corral(), entrance);
}

Behavior decompose_behavior(int group_size, Zone zone, double angle,
                            std::optional<Behavior> previous, const BehaviorThresholds& thresholds) {
    if (group_size < 1) throw DomainError("decompose_behavior: group size must be at least 1");
    check_angle(angle);
    const bool group = group_size > 1;
    if (zone == Zone::B) return group ? Behavior::GroupTransferring : Behavior::SoloTransferring;

    bool herding = false;
    if (previous && is_herding(*previous)) {
        herding = !(angle < thresholds.threshold - thresholds.hysteresis);
    } else if (previous && is_following(*previous)) {
        herding = angle > thresholds.threshold + thresholds.hysteresis;
    } else {
        herding = angle > thresholds.threshold;
    }
    if (herding) return group ? Behavior::GroupHerding : Behavior::SoloHerding;
    return group ? Behavior::GroupFollowing : Behavior::SoloFollowing;
}

MoveAction abstract_joint_action(std::span<const MoveAction> member_actions) {
    if (member_actions.empty()) throw DomainError("abstract_joint_action: empty action list");
    Cell sum{};
    for (MoveAction m : member_actions) sum = sum + displacement(m);
    return quantize_direction(Vec2{sum});
}

}  // namespace shepherd
