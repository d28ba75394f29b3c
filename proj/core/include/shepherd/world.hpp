#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "shepherd/geometry.hpp"

namespace shepherd {

/// Static terrain: a square grid with obstacles and a rectangular corral.
class GridMap {
public:
    GridMap() = default;
    /// Validates the invariants (corral strictly inside, no obstacle in the
    /// corral, obstacles in bounds and distinct).
    GridMap(int side, std::vector<Cell> obstacles, Rect corral);

    int side() const { return side_; }
    const Rect& corral() const { return corral_; }
    /// Obstacles sorted by (x, y).
    const std::vector<Cell>& obstacles() const { return obstacles_; }

    bool in_bounds(Cell c) const {
        return c.x >= 0 && c.y >= 0 && c.x < side_ && c.y < side_;
    }
    bool is_obstacle(Cell c) const { return in_bounds(c) && blocked_[index(c)] != 0; }
    bool in_corral(Cell c) const { return corral_.contains(c); }
    /// In bounds and not an obstacle.
    bool passable(Cell c) const { return in_bounds(c) && blocked_[index(c)] == 0; }
    std::size_t index(Cell c) const {
        return static_cast<std::size_t>(c.y) * static_cast<std::size_t>(side_) +
               static_cast<std::size_t>(c.x);
    }
    std::size_t cell_count() const {
        return static_cast<std::size_t>(side_) * static_cast<std::size_t>(side_);
    }

    friend bool operator==(const GridMap& a, const GridMap& b) {
        return a.side_ == b.side_ && a.corral_ == b.corral_ && a.obstacles_ == b.obstacles_;
    }

private:
    int side_ = 0;
    Rect corral_{};
    std::vector<Cell> obstacles_;
    std::vector<std::uint8_t> blocked_;
};

/// Dynamic state. Agent positions are indexed by agent id.
struct WorldState {
    std::int64_t step = 0;
    std::vector<Cell> cows;
    std::vector<Cell> agents;
    /// Seed of the counter-based cow random stream.
    std::uint64_t cow_seed = 0;

    friend bool operator==(const WorldState&, const WorldState&) = default;
};

/// Four-rule flocking model for cows: flee from shepherds, cohere to the
/// nearest neighbour, separate from crowding cows, random jitter.
struct CowParams {
    double flee_radius = 6.0;
    double cohesion_radius = 5.0;
    double separation_radius = 2.0;
    double flee_weight = 1.0;
    double cohesion_weight = 0.6;
    double separation_weight = 0.8;
    double random_weight = 0.55;

    void validate() const;
    friend bool operator==(const CowParams&, const CowParams&) = default;
};

enum class CellContent : std::uint8_t { Empty, Cow, Agent, Obstacle, Corral };

/// What an agent sees: the Chebyshev radius-8 square around it, clipped to
/// the grid.
struct Percept {
    static constexpr int kSightRadius = 8;

    int agent_id = 0;
    /// 1-based number of the step being decided.
    std::int64_t step = 0;
    Cell self{};
    Rect window{};
    std::vector<CellContent> cells;
    std::vector<Cell> cows;
    /// Other agents in sight, as (id, position), ascending id.
    std::vector<std::pair<int, Cell>> allies;
    std::vector<Cell> obstacles;

    bool visible(Cell c) const { return window.contains(c); }
    /// Content of a visible cell; throws DomainError outside the window.
    CellContent at(Cell c) const;
    /// Reachable in one move: visible, not an obstacle and not occupied.
    bool free(Cell c) const;
};

/// Places `obstacle_count` obstacles uniformly without replacement outside the
/// corral. `entity_count` reserves capacity for cows and agents placed later.
GridMap build_map(int side, int obstacle_count, Rect corral, std::uint64_t seed,
                  int entity_count = 0);

/// Places cows and agents on distinct free cells outside the corral.
WorldState place_entities(const GridMap& map, int cows, int agents, std::uint64_t seed,
                          std::uint64_t cow_seed);

/// Preferred cow displacements are computed from the current positions; moves
/// are then applied in ascending cow index, blocked moves becoming Skip. Cows
/// inside the corral never move.
std::vector<Cell> update_cows(const WorldState& world, const GridMap& map,
                              const CowParams& params);

/// Preferred (unquantized) rule-weighted displacement of one cow.
Vec2 cow_preference(const WorldState& world, const GridMap& map, const CowParams& params,
                    std::size_t cow);

/// Agents move in ascending id (blocked moves become Skip), then cows update
/// and the step counter increments.
WorldState step_world(const WorldState& world, const GridMap& map,
                      std::span<const MoveAction> actions, const CowParams& params = {});

Percept perceive(const WorldState& world, const GridMap& map, int agent_id);

/// Percentage of cows inside the corral rectangle.
double success_percent(const WorldState& world, const GridMap& map);

/// True when no two entities share a cell and none stands on an obstacle or
/// out of bounds.
bool occupancy_valid(const WorldState& world, const GridMap& map);

/// Line-oriented snapshot: `side obstacles corral x1 y1 x2 y2` header, then
/// `O x y`, `C x y` and `A id x y` records.
void write_snapshot(std::ostream& out, const GridMap& map, const WorldState& world);
std::pair<GridMap, WorldState> read_snapshot(std::istream& in);

}  // namespace shepherd
