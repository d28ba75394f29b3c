#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "shepherd/abstraction.hpp"
#include "shepherd/learning.hpp"
#include "shepherd/message.hpp"
#include "shepherd/random.hpp"
#include "shepherd/world.hpp"

namespace shepherd {

/// A cluster of cows and its centre of mass.
struct Herd {
    std::vector<Cell> members;
    Vec2 gcm{};

    int size() const { return static_cast<int>(members.size()); }
    friend bool operator==(const Herd&, const Herd&) = default;
};

Vec2 centroid(std::span<const Cell> cells);

/// Single-linkage clusters (Euclidean distance <= threshold); returns the most
/// populous one, ties going to the cluster whose centre is nearest `agent`,
/// then to the one holding the lowest input index. nullopt when no cows.
std::optional<Herd> cluster_herd(std::span<const Cell> cows, double threshold, Vec2 agent);

/// Union of member cells (duplicates removed) with the centre recomputed.
/// nullopt when the union is empty.
std::optional<Herd> aggregate_herds(std::span<const Herd> herds);

/// Entrance nearest to the herd centre; ties go to the lower list index.
/// Throws ConfigError when the list is empty.
Cell select_target_entrance(std::span<const Cell> entrances, Vec2 gcm);

enum class RewardMode : std::uint8_t { Level, Delta };

/// Level mode: corral percentage after the step. Delta mode: its change.
double compute_reward(const WorldState& before, const WorldState& after, const GridMap& map,
                      RewardMode mode = RewardMode::Level);

/// Cells just outside the corral, clockwise from the top-left outer corner.
std::vector<Cell> corral_ring(const Rect& corral);
/// Corral border cells, clockwise from the top-left corner cell.
std::vector<Cell> corral_border(const Rect& corral);
/// Outside neighbours (4-connected) of a border cell.
std::vector<Cell> outward_neighbours(const Rect& corral, Cell border);

using MoveMask = std::array<bool, kMoveCount>;
inline constexpr MoveMask kAllLegal = {true, true, true, true, true, true, true, true, true};

/// Skip plus every move into a visible, passable and unoccupied cell.
MoveMask legal_moves(const Percept& percept);

/// Rotational-motion heuristic: circle the herd towards the post behind it
/// (opposite the target at the current radius). Minimizes arc length to the
/// post plus radial drift, never ending closer than radius - 1.
MoveAction heuristic_rotational(Cell agent, const Herd& herd, Vec2 target,
                                const MoveMask& legal = kAllLegal);

/// Middle-action heuristic: the legal compass move closest in direction to
/// the herd-centre-to-target line.
MoveAction heuristic_middle(Cell agent, const Herd& herd, Vec2 target,
                            const MoveMask& legal = kAllLegal);

/// Everything action mapping needs about the agent's situation.
struct ActionView {
    Cell self{};
    /// Other members of the agent's cooperating group.
    std::vector<Cell> teammates;
    /// Other agents in sight that are not group members; they affect cows.
    std::vector<Cell> bystanders;
    Herd herd;
    Vec2 target{};
    AbstractionParams abstraction;
    /// Cow model used for prediction (random weight is ignored).
    CowParams predictor;
    MoveMask legal = kAllLegal;
    std::int64_t step = 0;
};

/// Fractional abstract state of the view with the agent at `self` and the
/// herd centred at `gcm`.
FractionalState view_state(const ActionView& view, Vec2 self, Vec2 gcm);

/// Concrete move expressed in the herd frame: +x points from the herd centre
/// to the target and the agent's side of that axis is +y.
int canonical_action(MoveAction concrete, Vec2 agent, Vec2 gcm, Vec2 target);

/// State change produced by an abstract (herd-frame) action with the herd
/// held still.
StateDelta canonical_effect(int abstract_action, const ActionView& view);

/// Predicted fractional state change for each concrete move; illegal moves
/// are nullopt.
std::array<std::optional<StateDelta>, kMoveCount> predicted_deltas(const ActionView& view,
                                                                   const GridMap& map);

/// The legal concrete move whose predicted change is closest (L1) to the
/// intended change; ties go to the lowest action index.
MoveAction map_action(const StateDelta& intended, const ActionView& view, const GridMap& map);

/// Maps a herd-frame action: the intended change is its canonical effect.
MoveAction map_action(int abstract_action, const ActionView& view, const GridMap& map);

struct AgentConfig {
    int agent_count = 1;
    AbstractionParams abstraction;
    LearningParams learning;
    CowParams predictor;
    BehaviorThresholds thresholds;
    double proximity_threshold = 3.0;
    bool heuristics = false;
    RewardMode reward_mode = RewardMode::Level;
    /// Treat a greedy choice in a state with no recorded visits as exploration.
    bool explore_unseen = true;
    /// Consecutive out-of-sight steps after which a group member is dropped.
    int dissolve_after = 5;
};

struct Transition {
    Behavior behavior = Behavior::SoloHerding;
    AbstractState state;
    int action = 0;
};

struct PerimeterWalk {
    bool initialized = false;
    int start = 0;
    int pointer = 0;
    int advanced = 0;
    int stall = 0;
    double best = 0.0;
    /// Per border cell: -1 unknown, 0 blocked, 1 entrance.
    std::vector<int> status;
};

struct AgentState {
    int id = 0;
    bool detector = false;
    bool entrances_known = false;
    std::vector<Cell> entrances;
    std::array<QTable, kBehaviorCount> tables;
    /// The agent's own experience count per entry; the fusion weight.
    std::array<std::map<QKey, std::int64_t>, kBehaviorCount> own_visits;
    std::optional<Transition> last;
    std::optional<Behavior> behavior;
    /// Behavior whose table was updated in the current step, if any.
    std::optional<Behavior> updated_behavior;
    PerimeterWalk walk;
    RandomStream rng;
    /// invited[j]: a cooperation message to j has been sent (never resent).
    std::vector<bool> invited;
    std::vector<bool> cooperating;
    std::vector<int> unseen_steps;
    std::vector<Cell> last_seen;
};

AgentState make_agent(int id, const AgentConfig& config, std::uint64_t seed);

struct PerimeterStep {
    MoveAction action = MoveAction::Skip;
    bool done = false;
};

/// One step of the detector's clockwise walk around the corral. Entrances are
/// border cells with an obstacle-free outside neighbour; `done` is reported
/// once, when the walk is back at its start. Requires the detector flag.
PerimeterStep explore_corral_perimeter(AgentState& agent, const Percept& percept,
                                       const GridMap& map);

enum class ActionSource : std::uint8_t {
    Protocol,
    Perimeter,
    Random,
    Explore,
    Exploit,
    HeuristicRotational,
    HeuristicMiddle,
};

struct AgentStepResult {
    MoveAction action = MoveAction::Skip;
    std::vector<Message> outbox;
    ActionSource source = ActionSource::Protocol;
    std::optional<Behavior> behavior;
    int group_size = 1;
    bool updated = false;
};

/// One perception-action cycle of a player agent. `reward` is the reward of
/// the transition that led to this percept.
AgentStepResult agent_step(AgentState& agent, const Percept& percept, std::span<const Message> inbox,
                           double reward, const GridMap& map, const AgentConfig& config);

/// The agent's end-of-step table share: its own experience on the table it
/// updated this step (or its current behavior's table).
Message make_table_share(const AgentState& agent, std::int64_t step);

/// Adopts fused entries; keys absent from the broadcast are kept.
void assign_fused_tables(AgentState& agent, std::span<const QTable> fused);

}  // namespace shepherd
