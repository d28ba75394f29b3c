#include "shepherd/world.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include "shepherd/errors.hpp"
#include "shepherd/random.hpp"

namespace shepherd {

namespace {

constexpr int kNone = -1;

// Cell -> entity index lookup used by the movement rules.
class Occupancy {
public:
    Occupancy(const GridMap& map, const std::vector<Cell>& cows, const std::vector<Cell>& agents)
        : map_(map), cow_at_(map.cell_count(), kNone), agent_at_(map.cell_count(), kNone) {
        for (std::size_t i = 0; i < cows.size(); ++i) cow_at_[map.index(cows[i])] = static_cast<int>(i);
        for (std::size_t i = 0; i < agents.size(); ++i)
            agent_at_[map.index(agents[i])] = static_cast<int>(i);
    }

    int cow(Cell c) const { return map_.in_bounds(c) ? cow_at_[map_.index(c)] : kNone; }
    int agent(Cell c) const { return map_.in_bounds(c) ? agent_at_[map_.index(c)] : kNone; }
    bool enterable(Cell c) const {
        return map_.passable(c) && cow_at_[map_.index(c)] == kNone &&
               agent_at_[map_.index(c)] == kNone;
    }
    void move_cow(int i, Cell from, Cell to) {
        cow_at_[map_.index(from)] = kNone;
        cow_at_[map_.index(to)] = i;
    }
    void move_agent(int i, Cell from, Cell to) {
        agent_at_[map_.index(from)] = kNone;
        agent_at_[map_.index(to)] = i;
    }

private:
    const GridMap& map_;
    std::vector<int> cow_at_;
    std::vector<int> agent_at_;
};

struct Neighbour {
    int index = kNone;
    double dist = 0.0;
};

// Keeps the nearest candidate; equal distances resolve to the lower index.
void consider(Neighbour& best, int index, double dist) {
    if (best.index == kNone || dist < best.dist || (dist == best.dist && index < best.index)) {
        best = {index, dist};
    }
}

Vec2 combine(const CowParams& params, Vec2 self, const Neighbour& agent, Vec2 agent_pos,
             const Neighbour& cow, Vec2 cow_pos, Vec2 separation, Vec2 jitter) {
    Vec2 pref{};
    if (agent.index != kNone) {
        if (auto u = unit(self - agent_pos)) pref += params.flee_weight * *u;
    }
    if (cow.index != kNone) {
        if (auto u = unit(cow_pos - self)) pref += params.cohesion_weight * *u;
    }
    pref += params.separation_weight * separation;
    pref += params.random_weight * jitter;
    return pref;
}

Vec2 jitter_for(const WorldState& world, std::size_t cow) {
    const double theta = 2.0 * std::numbers::pi *
                         hash_uniform(world.cow_seed, static_cast<std::uint64_t>(world.step),
                                      static_cast<std::uint64_t>(cow));
    return {std::cos(theta), std::sin(theta)};
}

Vec2 preference_brute(const WorldState& world, const CowParams& params, std::size_t i) {
    const Vec2 self{world.cows[i]};
    Neighbour agent;
    for (std::size_t a = 0; a < world.agents.size(); ++a) {
        const double d = distance(self, Vec2{world.agents[a]});
        if (d <= params.flee_radius) consider(agent, static_cast<int>(a), d);
    }
    Neighbour cow;
    Vec2 separation{};
    for (std::size_t c = 0; c < world.cows.size(); ++c) {
        if (c == i) continue;
        const Vec2 other{world.cows[c]};
        const double d = distance(self, other);
        if (d <= params.cohesion_radius) consider(cow, static_cast<int>(c), d);
        if (d <= params.separation_radius) {
            if (auto u = unit(self - other)) separation += *u;
        }
    }
    const Vec2 agent_pos = agent.index == kNone ? Vec2{} : Vec2{world.agents[static_cast<std::size_t>(agent.index)]};
    const Vec2 cow_pos = cow.index == kNone ? Vec2{} : Vec2{world.cows[static_cast<std::size_t>(cow.index)]};
    return combine(params, self, agent, agent_pos, cow, cow_pos, separation, jitter_for(world, i));
}

Vec2 preference_indexed(const WorldState& world, const CowParams& params, const Occupancy& occ,
                        std::size_t i) {
    const Cell me = world.cows[i];
    const Vec2 self{me};
    const int reach = static_cast<int>(std::ceil(
        std::max({params.flee_radius, params.cohesion_radius, params.separation_radius})));
    Neighbour agent;
    Neighbour cow;
    std::vector<int> crowd;
    for (int dy = -reach; dy <= reach; ++dy) {
        for (int dx = -reach; dx <= reach; ++dx) {
            const Cell c{me.x + dx, me.y + dy};
            const double d = std::hypot(static_cast<double>(dx), static_cast<double>(dy));
            if (const int a = occ.agent(c); a != kNone && d <= params.flee_radius) consider(agent, a, d);
            const int o = occ.cow(c);
            if (o == kNone || o == static_cast<int>(i)) continue;
            if (d <= params.cohesion_radius) consider(cow, o, d);
            if (d <= params.separation_radius) crowd.push_back(o);
        }
    }
    // Sum in index order so both lookup strategies agree bit for bit.
    std::sort(crowd.begin(), crowd.end());
    Vec2 separation{};
    for (int o : crowd) {
        if (auto u = unit(self - Vec2{world.cows[static_cast<std::size_t>(o)]})) separation += *u;
    }
    const Vec2 agent_pos = agent.index == kNone ? Vec2{} : Vec2{world.agents[static_cast<std::size_t>(agent.index)]};
    const Vec2 cow_pos = cow.index == kNone ? Vec2{} : Vec2{world.cows[static_cast<std::size_t>(cow.index)]};
    return combine(params, self, agent, agent_pos, cow, cow_pos, separation, jitter_for(world, i));
}

constexpr std::size_t kBruteForceLimit = 48;

}  // namespace

GridMap::GridMap(int side, std::vector<Cell> obstacles, Rect corral)
    : side_(side), corral_(corral), obstacles_(std::move(obstacles)) {
    if (side_ <= 0) throw ConfigError("map side must be positive");
    if (!corral_.valid() || corral_.x_min < 1 || corral_.y_min < 1 || corral_.x_max > side_ - 2 ||
        corral_.y_max > side_ - 2) {
        throw ConfigError("corral must lie strictly inside the grid");
    }
    std::sort(obstacles_.begin(), obstacles_.end());
    if (std::adjacent_find(obstacles_.begin(), obstacles_.end()) != obstacles_.end()) {
        throw ConfigError("duplicate obstacle cell");
    }
    blocked_.assign(cell_count(), 0);
    for (Cell c : obstacles_) {
        if (!in_bounds(c)) throw ConfigError("obstacle out of bounds");
        if (corral_.contains(c)) throw ConfigError("obstacle inside the corral");
        blocked_[index(c)] = 1;
    }
}

void CowParams::validate() const {
    if (!(separation_radius < cohesion_radius)) {
        throw ConfigError("cow separation_radius must be below cohesion_radius");
    }
    if (flee_radius < 0 || separation_radius < 0) throw ConfigError("cow radii must be nonnegative");
    const double weights[] = {flee_weight, cohesion_weight, separation_weight, random_weight};
    bool any = false;
    for (double w : weights) {
        if (w < 0) throw ConfigError("cow weights must be nonnegative");
        any = any || w > 0;
    }
    if (!any) throw ConfigError("at least one cow weight must be positive");
}

CellContent Percept::at(Cell c) const {
    if (!visible(c)) throw DomainError("cell outside the percept window");
    const auto w = static_cast<std::size_t>(window.width());
    return cells[static_cast<std::size_t>(c.y - window.y_min) * w +
                 static_cast<std::size_t>(c.x - window.x_min)];
}

bool Percept::free(Cell c) const {
    if (!visible(c)) return false;
    const CellContent k = at(c);
    return k == CellContent::Empty || k == CellContent::Corral;
}

GridMap build_map(int side, int obstacle_count, Rect corral, std::uint64_t seed, int entity_count) {
    if (side <= 0) throw ConfigError("side must be positive");
    if (obstacle_count < 0 || entity_count < 0) throw ConfigError("counts must be nonnegative");
    const long long cells = static_cast<long long>(side) * side;
    if (!corral.valid() || corral.x_min < 1 || corral.y_min < 1 || corral.x_max > side - 2 ||
        corral.y_max > side - 2) {
        throw ConfigError("corral must lie strictly inside the grid");
    }
    if (obstacle_count + corral.area() + entity_count >= cells) {
        std::ostringstream msg;
        msg << "infeasible density: obstacles (" << obstacle_count << ") + corral area ("
            << corral.area() << ") + entities (" << entity_count << ") must be below side^2 ("
            << cells << ")";
        throw ConfigError(msg.str());
    }
    std::vector<Cell> candidates;
    candidates.reserve(static_cast<std::size_t>(cells));
    for (int y = 0; y < side; ++y)
        for (int x = 0; x < side; ++x)
            if (!corral.contains({x, y})) candidates.push_back({x, y});

    // Partial Fisher-Yates: the first obstacle_count slots are a uniform sample.
    RandomStream rng(seed);
    for (int i = 0; i < obstacle_count; ++i) {
        const int remaining = static_cast<int>(candidates.size()) - i;
        const int j = i + rng.uniform_index(remaining);
        std::swap(candidates[static_cast<std::size_t>(i)], candidates[static_cast<std::size_t>(j)]);
    }
    candidates.resize(static_cast<std::size_t>(obstacle_count));
    return GridMap(side, std::move(candidates), corral);
}

WorldState place_entities(const GridMap& map, int cows, int agents, std::uint64_t seed,
                          std::uint64_t cow_seed) {
    if (cows < 0 || agents < 0) throw ConfigError("entity counts must be nonnegative");
    std::vector<Cell> free;
    for (int y = 0; y < map.side(); ++y)
        for (int x = 0; x < map.side(); ++x)
            if (map.passable({x, y}) && !map.in_corral({x, y})) free.push_back({x, y});
    const auto needed = static_cast<std::size_t>(cows) + static_cast<std::size_t>(agents);
    if (needed > free.size()) {
        throw ConfigError("infeasible density: not enough free cells outside the corral for " +
                          std::to_string(needed) + " entities");
    }
    RandomStream rng(seed);
    for (std::size_t i = 0; i < needed; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.uniform_index(static_cast<int>(free.size() - i)));
        std::swap(free[i], free[j]);
    }
    WorldState world;
    world.cow_seed = cow_seed;
    world.agents.assign(free.begin(), free.begin() + agents);
    world.cows.assign(free.begin() + agents, free.begin() + static_cast<std::ptrdiff_t>(needed));
    return world;
}

Vec2 cow_preference(const WorldState& world, const GridMap& map, const CowParams& params,
                    std::size_t cow) {
    if (world.cows.size() <= kBruteForceLimit) return preference_brute(world, params, cow);
    const Occupancy occ(map, world.cows, world.agents);
    return preference_indexed(world, params, occ, cow);
}

std::vector<Cell> update_cows(const WorldState& world, const GridMap& map, const CowParams& params) {
    std::vector<MoveAction> moves(world.cows.size(), MoveAction::Skip);
    std::vector<Cell> cows = world.cows;
    if (world.cows.size() <= kBruteForceLimit) {
        // Small worlds (including the action-mapping predictor) skip the
        // full-grid lookup tables.
        for (std::size_t i = 0; i < world.cows.size(); ++i) {
            if (!map.in_corral(world.cows[i])) moves[i] = quantize_nearest(preference_brute(world, params, i));
        }
        auto taken = [&](Cell c) {
            return std::find(cows.begin(), cows.end(), c) != cows.end() ||
                   std::find(world.agents.begin(), world.agents.end(), c) != world.agents.end();
        };
        for (std::size_t i = 0; i < cows.size(); ++i) {
            if (moves[i] == MoveAction::Skip) continue;
            const Cell to = cows[i] + displacement(moves[i]);
            if (!map.passable(to) || taken(to)) continue;
            cows[i] = to;
        }
        return cows;
    }
    Occupancy occ(map, world.cows, world.agents);
    for (std::size_t i = 0; i < world.cows.size(); ++i) {
        if (map.in_corral(world.cows[i])) continue;
        moves[i] = quantize_nearest(preference_indexed(world, params, occ, i));
    }
    for (std::size_t i = 0; i < cows.size(); ++i) {
        if (moves[i] == MoveAction::Skip) continue;
        const Cell to = cows[i] + displacement(moves[i]);
        if (!occ.enterable(to)) continue;
        occ.move_cow(static_cast<int>(i), cows[i], to);
        cows[i] = to;
    }
    return cows;
}

WorldState step_world(const WorldState& world, const GridMap& map,
                      std::span<const MoveAction> actions, const CowParams& params) {
    if (actions.size() != world.agents.size()) {
        throw ProtocolError("step_world: expected " + std::to_string(world.agents.size()) +
                            " actions, got " + std::to_string(actions.size()));
    }
    WorldState next = world;
    Occupancy occ(map, next.cows, next.agents);
    for (std::size_t i = 0; i < next.agents.size(); ++i) {
        if (actions[i] == MoveAction::Skip) continue;
        const Cell to = next.agents[i] + displacement(actions[i]);
        if (!occ.enterable(to)) continue;
        occ.move_agent(static_cast<int>(i), next.agents[i], to);
        next.agents[i] = to;
    }
    next.cows = update_cows(next, map, params);
    next.step = world.step + 1;
    return next;
}

Percept perceive(const WorldState& world, const GridMap& map, int agent_id) {
    if (agent_id < 0 || static_cast<std::size_t>(agent_id) >= world.agents.size()) {
        throw ProtocolError("perceive: unknown agent id " + std::to_string(agent_id));
    }
    constexpr int r = Percept::kSightRadius;
    Percept p;
    p.agent_id = agent_id;
    p.step = world.step + 1;
    p.self = world.agents[static_cast<std::size_t>(agent_id)];
    p.window = {std::max(0, p.self.x - r), std::max(0, p.self.y - r),
                std::min(map.side() - 1, p.self.x + r), std::min(map.side() - 1, p.self.y + r)};
    const auto w = static_cast<std::size_t>(p.window.width());
    p.cells.assign(w * static_cast<std::size_t>(p.window.height()), CellContent::Empty);
    auto slot = [&](Cell c) -> CellContent& {
        return p.cells[static_cast<std::size_t>(c.y - p.window.y_min) * w +
                       static_cast<std::size_t>(c.x - p.window.x_min)];
    };
    for (int y = p.window.y_min; y <= p.window.y_max; ++y) {
        for (int x = p.window.x_min; x <= p.window.x_max; ++x) {
            const Cell c{x, y};
            if (map.is_obstacle(c)) {
                slot(c) = CellContent::Obstacle;
                p.obstacles.push_back(c);
            } else if (map.in_corral(c)) {
                slot(c) = CellContent::Corral;
            }
        }
    }
    for (Cell c : world.cows) {
        if (p.window.contains(c)) {
            slot(c) = CellContent::Cow;
            p.cows.push_back(c);
        }
    }
    for (std::size_t i = 0; i < world.agents.size(); ++i) {
        const Cell c = world.agents[i];
        if (!p.window.contains(c)) continue;
        slot(c) = CellContent::Agent;
        if (static_cast<int>(i) != agent_id) p.allies.emplace_back(static_cast<int>(i), c);
    }
    return p;
}

double success_percent(const WorldState& world, const GridMap& map) {
    if (world.cows.empty()) throw ConfigError("success_percent: world has no cows");
    const auto inside = std::count_if(world.cows.begin(), world.cows.end(),
                                      [&](Cell c) { return map.in_corral(c); });
    return 100.0 * static_cast<double>(inside) / static_cast<double>(world.cows.size());
}

bool occupancy_valid(const WorldState& world, const GridMap& map) {
    std::vector<std::uint8_t> seen(map.cell_count(), 0);
    auto claim = [&](Cell c) {
        if (!map.passable(c)) return false;
        auto& s = seen[map.index(c)];
        if (s) return false;
        s = 1;
        return true;
    };
    for (Cell c : world.cows)
        if (!claim(c)) return false;
    for (Cell c : world.agents)
        if (!claim(c)) return false;
    return true;
}

void write_snapshot(std::ostream& out, const GridMap& map, const WorldState& world) {
    const Rect& k = map.corral();
    out << map.side() << ' ' << map.obstacles().size() << " corral " << k.x_min << ' ' << k.y_min
        << ' ' << k.x_max << ' ' << k.y_max << '\n';
    for (Cell c : map.obstacles()) out << "O " << c.x << ' ' << c.y << '\n';
    for (Cell c : world.cows) out << "C " << c.x << ' ' << c.y << '\n';
    for (std::size_t i = 0; i < world.agents.size(); ++i)
        out << "A " << i << ' ' << world.agents[i].x << ' ' << world.agents[i].y << '\n';
}

std::pair<GridMap, WorldState> read_snapshot(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("snapshot: missing header");
    std::istringstream header(line);
    int side = 0;
    std::size_t declared = 0;
    std::string tag;
    Rect corral{};
    if (!(header >> side >> declared >> tag >> corral.x_min >> corral.y_min >> corral.x_max >>
          corral.y_max) ||
        tag != "corral") {
        throw ConfigError("snapshot: malformed header '" + line + "'");
    }
    std::vector<Cell> obstacles;
    std::vector<std::pair<int, Cell>> agents;
    WorldState world;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream rec(line);
        std::string kind;
        rec >> kind;
        Cell c{};
        if (kind == "O" && rec >> c.x >> c.y) {
            obstacles.push_back(c);
        } else if (kind == "C" && rec >> c.x >> c.y) {
            world.cows.push_back(c);
        } else if (int id = 0; kind == "A" && rec >> id >> c.x >> c.y) {
            agents.emplace_back(id, c);
        } else {
            throw ConfigError("snapshot: malformed record at line " + std::to_string(line_no));
        }
    }
    if (obstacles.size() != declared) {
        throw ConfigError("snapshot: header declares " + std::to_string(declared) +
                          " obstacles, found " + std::to_string(obstacles.size()));
    }
    std::sort(agents.begin(), agents.end());
    for (std::size_t i = 0; i < agents.size(); ++i) {
        if (agents[i].first != static_cast<int>(i)) throw ConfigError("snapshot: agent ids not contiguous");
        world.agents.push_back(agents[i].second);
    }
    GridMap map(side, std::move(obstacles), corral);
    if (!occupancy_valid(world, map)) throw ConfigError("snapshot: entities overlap or sit on obstacles");
    return {std::move(map), std::move(world)};
}

}  // namespace shepherd
