#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "shepherd/abstraction.hpp"
#include "shepherd/geometry.hpp"
#include "shepherd/random.hpp"

namespace shepherd {

inline constexpr int kGoalAgents = 3;
inline constexpr int kGoalActions = 4;

/// Four-action moves: up, down, left, right.
enum class GoalAction : std::uint8_t { Up = 0, Down, Left, Right };
Cell displacement(GoalAction a);

/// Walled square with a goal region and one 10x10 start area per agent. The
/// three learning areas are the vertical thirds of the map.
class GoalWorld {
public:
    GoalWorld() = default;
    /// Validates: starts and goal in bounds, mutually disjoint, obstacle-free.
    GoalWorld(int side, std::vector<Cell> obstacles, Rect goal, std::array<Rect, kGoalAgents> starts);

    int side() const { return side_; }
    const Rect& goal() const { return goal_; }
    const std::array<Rect, kGoalAgents>& starts() const { return starts_; }
    /// Sorted by (x, y).
    const std::vector<Cell>& obstacles() const { return obstacles_; }

    bool passable(Cell c) const {
        return c.x >= 0 && c.y >= 0 && c.x < side_ && c.y < side_ &&
               blocked_[static_cast<std::size_t>(c.y) * static_cast<std::size_t>(side_) +
                        static_cast<std::size_t>(c.x)] == 0;
    }
    /// 0, 1 or 2: the vertical third holding the cell.
    int area_of(Cell c) const;

    friend bool operator==(const GoalWorld& a, const GoalWorld& b) {
        return a.side_ == b.side_ && a.goal_ == b.goal_ && a.starts_ == b.starts_ &&
               a.obstacles_ == b.obstacles_;
    }

private:
    int side_ = 0;
    Rect goal_{};
    std::array<Rect, kGoalAgents> starts_{};
    std::vector<Cell> obstacles_;
    std::vector<std::uint8_t> blocked_;
};

/// The bundled 300x300 layout: a barrier row below the goal with a central
/// gap; R2 sits in the gap's line of approach, R1 and R3 below the barrier.
GoalWorld canonical_goal_world();

/// `side obstacles` header, then `O x y`, `W x1 y1 x2 y2` (filled wall
/// rectangle), `G x1 y1 x2 y2` and `R1`/`R2`/`R3 x1 y1 x2 y2` records.
void write_goal_world(std::ostream& out, const GoalWorld& world);
GoalWorld read_goal_world(std::istream& in);

struct GoalState {
    int dist = 1;
    int angle = 1;
    friend constexpr bool operator==(const GoalState&, const GoalState&) = default;
};

/// Distance bin as in the herding abstraction; angle of the ray agent->goal
/// from the positive x-axis over [0, 360), floor(360/a) bins. An agent at the
/// goal centre reads angle 0.
GoalState gs_state(Vec2 agent, Vec2 goal, const AbstractionParams& params);
int gs_angle_bins(const AbstractionParams& params);

struct TrialConfig {
    int episodes = 500;
    int trials = 40;
    int step_cap = 2000;
    AbstractionParams abstraction{4.0, 10.0, 300.0};
    double learning_rate = 0.5;
    double discount = 0.95;
    double goal_reward = 100.0;
    /// Optional progress term: k * (distance decrease towards the goal centre)
    /// added to each step's reward. 0 gives the sparse goal-only reward.
    double progress_reward = 0.1;
    /// Initial value of every table entry.
    double initial_q = 0.0;
    /// Epsilon decays linearly per episode from eps_start to eps_end over
    /// eps_episodes episodes.
    double eps_start = 0.2;
    double eps_end = 0.02;
    int eps_episodes = 100;
    /// An exploratory action is repeated for a uniform 1..explore_hold steps.
    int explore_hold = 20;
    bool fusion = true;
    std::uint64_t seed = 1;

    void validate() const;
    double epsilon(int episode) const;
};

/// Dense per-area tables of one goal-search agent.
struct GoalAgent {
    Cell pos{};
    std::array<std::vector<double>, kGoalAgents> q;
    /// Own experience counts; the fusion weights.
    std::array<std::vector<std::int64_t>, kGoalAgents> own;
    RandomStream rng;
    int hold_action = 0;
    int hold_left = 0;
};

class GoalSearch {
public:
    GoalSearch(const GoalWorld& world, const TrialConfig& config, std::uint64_t trial_seed);

    /// One episode (1-based index) for all three agents in lock-step; returns
    /// the steps each agent took (0 when it starts in the goal, step_cap when
    /// it never arrives).
    std::array<int, kGoalAgents> run_episode(int episode);

    const std::vector<GoalAgent>& agents() const { return agents_; }
    std::size_t table_size() const { return table_size_; }
    std::size_t key(const GoalState& s, int action) const;

private:
    void fuse_dirty();

    const GoalWorld* world_;
    TrialConfig config_;
    int angle_bins_ = 0;
    std::size_t table_size_ = 0;
    std::vector<GoalAgent> agents_;
    RandomStream start_rng_;
    std::vector<std::pair<int, std::size_t>> dirty_;
    std::vector<std::uint8_t> dirty_flag_;
};

inline constexpr std::array<int, 6> kReportedEpisodes = {32, 94, 218, 280, 404, 466};

struct GoalSearchResult {
    int episodes = 0;
    int trials = 0;
    /// mean_steps[agent][episode - 1], averaged over trials.
    std::array<std::vector<double>, kGoalAgents> mean_steps;

    double at(int agent, int episode) const;
};

GoalSearchResult run_goalsearch_experiment(const GoalWorld& world, const TrialConfig& config);

/// `# shepherd goalsearch csv v1` then `episode,agent,meanSteps` rows for every
/// episode (agents 1-based).
void write_goalsearch_csv(std::ostream& out, const GoalSearchResult& result);

}  // namespace shepherd
