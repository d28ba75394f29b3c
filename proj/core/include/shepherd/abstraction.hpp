#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

#include "shepherd/geometry.hpp"

namespace shepherd {

class GridMap;

/// Resolution of the abstract state: distance resolution (cells), angle
/// resolution (degrees) and environment side length (cells).
struct AbstractionParams {
    double distance_resolution = 20.0;
    double angle_resolution = 10.0;
    double side = 100.0;

    void validate() const;
    /// Largest distance that can occur in the environment: side * sqrt(2).
    double diagonal() const;
    int distance_bins() const;
    int angle_bins() const;

    friend bool operator==(const AbstractionParams&, const AbstractionParams&) = default;
};

/// Discretized (distance-to-target, distance-to-herd, angle) triple; each
/// component is a 1-based bin.
struct AbstractState {
    int dist_target = 1;
    int dist_herd = 1;
    int angle = 1;

    friend constexpr auto operator<=>(const AbstractState&, const AbstractState&) = default;
};

/// The same triple before discretization, in bin units (D/d, D/d, alpha/a).
struct FractionalState {
    double dist_target = 0.0;
    double dist_herd = 0.0;
    double angle = 0.0;
};

using StateDelta = std::array<double, 3>;

StateDelta operator-(const FractionalState& a, const FractionalState& b);

enum class Behavior : std::uint8_t {
    SoloHerding = 0,
    GroupHerding,
    SoloFollowing,
    GroupFollowing,
    SoloTransferring,
    GroupTransferring,
};

inline constexpr int kBehaviorCount = 6;

inline constexpr std::array<Behavior, kBehaviorCount> kAllBehaviors = {
    Behavior::SoloHerding,      Behavior::GroupHerding,    Behavior::SoloFollowing,
    Behavior::GroupFollowing,   Behavior::SoloTransferring, Behavior::GroupTransferring,
};

constexpr std::size_t index_of(Behavior b) { return static_cast<std::size_t>(b); }
std::string_view to_string(Behavior b);
std::optional<Behavior> parse_behavior(std::string_view name);
bool is_group(Behavior b);
bool is_herding(Behavior b);
bool is_following(Behavior b);
bool is_transferring(Behavior b);

enum class Zone : std::uint8_t { A, B };

int bin_distance(double distance, const AbstractionParams& params);
int bin_angle(double degrees, const AbstractionParams& params);

/// Abstract state of a lone agent. The angle is measured at the herd centre
/// between the rays towards the agent and towards the target, so an agent
/// directly behind the herd reads 180 degrees.
AbstractState solo_state(Vec2 agent, Vec2 target, Vec2 gcm, const AbstractionParams& params);
FractionalState solo_fractional(Vec2 agent, Vec2 target, Vec2 gcm, const AbstractionParams& params);

/// Shared state of a cooperating group: each component is the member average
/// binned at the same resolution. Requires at least two members.
AbstractState group_state(std::span<const Vec2> members, Vec2 target, Vec2 gcm,
                          const AbstractionParams& params);
FractionalState group_fractional(std::span<const Vec2> members, Vec2 target, Vec2 gcm,
                                 const AbstractionParams& params);

/// floor(R*sqrt(2)/d)^2 * floor(180/a).
std::int64_t state_space_size(const AbstractionParams& params);

/// Splits the plane by the line through the corral side holding the entrance.
/// Zone A is the open half-plane outside that side; the line itself and
/// everything behind it is zone B. A corner entrance uses its vertical side.
Zone zone_of(Vec2 query, const Rect& corral, Cell entrance);
Zone zone_of(Vec2 query, const GridMap& map, Cell entrance);

struct BehaviorThresholds {
    double threshold = 120.0;
    /// Half-width of the hysteresis band; 0 gives a plain cut.
    double hysteresis = 10.0;
};

Behavior decompose_behavior(int group_size, Zone zone, double angle,
                            std::optional<Behavior> previous,
                            const BehaviorThresholds& thresholds = {});

/// Sum of member displacements quantized to the nearest compass direction
/// (zero sum gives Skip). Throws DomainError on an empty list.
MoveAction abstract_joint_action(std::span<const MoveAction> member_actions);

}  // namespace shepherd
