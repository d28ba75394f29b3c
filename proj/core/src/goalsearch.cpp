#include "shepherd/goalsearch.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include "shepherd/errors.hpp"

namespace shepherd {

namespace {

constexpr int kBarrierRow = 150;

void add_wall(std::set<Cell>& cells, Rect r) {
    for (int x = r.x_min; x <= r.x_max; ++x)
        for (int y = r.y_min; y <= r.y_max; ++y) cells.insert({x, y});
}

bool overlaps(const Rect& a, const Rect& b) {
    return a.x_min <= b.x_max && b.x_min <= a.x_max && a.y_min <= b.y_max && b.y_min <= a.y_max;
}

Rect read_rect(std::istream& in, const std::string& tag) {
    Rect r;
    if (!(in >> r.x_min >> r.y_min >> r.x_max >> r.y_max)) throw ConfigError("goal map: malformed " + tag + " record");
    return r;
}

}  // namespace

Cell displacement(GoalAction a) {
    switch (a) {
        case GoalAction::Up: return {0, 1};
        case GoalAction::Down: return {0, -1};
        case GoalAction::Left: return {-1, 0};
        case GoalAction::Right: return {1, 0};
    }
    throw DomainError("unknown goal action");
}

GoalWorld::GoalWorld(int side, std::vector<Cell> obstacles, Rect goal, std::array<Rect, kGoalAgents> starts)
    : side_(side), goal_(goal), starts_(starts), obstacles_(std::move(obstacles)) {
    if (side < 3) throw ConfigError("goal map: side must be >= 3");
    const Rect bounds{0, 0, side - 1, side - 1};
    auto inside = [&](const Rect& r) {
        return r.valid() && bounds.contains({r.x_min, r.y_min}) && bounds.contains({r.x_max, r.y_max});
    };
    if (!inside(goal_)) throw ConfigError("goal map: goal region out of bounds");
    for (std::size_t i = 0; i < starts_.size(); ++i) {
        if (!inside(starts_[i])) throw ConfigError("goal map: start area R" + std::to_string(i + 1) + " out of bounds");
        if (overlaps(starts_[i], goal_)) throw ConfigError("goal map: start area overlaps the goal");
        for (std::size_t j = 0; j < i; ++j)
            if (overlaps(starts_[i], starts_[j])) throw ConfigError("goal map: start areas overlap");
    }
    std::sort(obstacles_.begin(), obstacles_.end());
    if (std::adjacent_find(obstacles_.begin(), obstacles_.end()) != obstacles_.end())
        throw ConfigError("goal map: duplicate obstacle");
    blocked_.assign(static_cast<std::size_t>(side) * static_cast<std::size_t>(side), 0);
    for (Cell c : obstacles_) {
        if (!bounds.contains(c)) throw ConfigError("goal map: obstacle out of bounds");
        if (goal_.contains(c)) throw ConfigError("goal map: obstacle inside the goal");
        for (const Rect& s : starts_)
            if (s.contains(c)) throw ConfigError("goal map: obstacle inside a start area");
        blocked_[static_cast<std::size_t>(c.y) * static_cast<std::size_t>(side) + static_cast<std::size_t>(c.x)] = 1;
    }
}

int GoalWorld::area_of(Cell c) const { return std::clamp(c.x * kGoalAgents / side_, 0, kGoalAgents - 1); }

GoalWorld canonical_goal_world() {
    std::set<Cell> walls;
    add_wall(walls, {20, kBarrierRow, 130, kBarrierRow});
    add_wall(walls, {169, kBarrierRow, 279, kBarrierRow});
    const Rect goal{145, 200, 154, 209};
    const std::array<Rect, kGoalAgents> starts = {
        Rect{40, 100, 49, 109}, Rect{145, 130, 154, 139}, Rect{250, 100, 259, 109}};
    return GoalWorld(300, {walls.begin(), walls.end()}, goal, starts);
}

void write_goal_world(std::ostream& out, const GoalWorld& world) {
    out << world.side() << ' ' << world.obstacles().size() << '\n';
    for (Cell c : world.obstacles()) out << "O " << c.x << ' ' << c.y << '\n';
    auto rect = [&](std::string_view tag, const Rect& r) {
        out << tag << ' ' << r.x_min << ' ' << r.y_min << ' ' << r.x_max << ' ' << r.y_max << '\n';
    };
    rect("G", world.goal());
    for (int i = 0; i < kGoalAgents; ++i) rect("R" + std::to_string(i + 1), world.starts()[static_cast<std::size_t>(i)]);
}

GoalWorld read_goal_world(std::istream& in) {
    std::string line;
    int side = 0;
    long long declared = -1;
    std::set<Cell> obstacles;
    std::size_t singles = 0;
    std::optional<Rect> goal;
    std::array<std::optional<Rect>, kGoalAgents> starts;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line.front() == '#') continue;
        std::istringstream ss(line);
        if (declared < 0) {
            if (!(ss >> side >> declared) || declared < 0) throw ConfigError("goal map: malformed header");
            continue;
        }
        std::string tag;
        ss >> tag;
        if (tag == "O") {
            Cell c;
            if (!(ss >> c.x >> c.y)) throw ConfigError("goal map: malformed O record at line " + std::to_string(lineno));
            if (!obstacles.insert(c).second) throw ConfigError("goal map: duplicate obstacle");
            ++singles;
        } else if (tag == "W") {
            add_wall(obstacles, read_rect(ss, tag));
        } else if (tag == "G") {
            goal = read_rect(ss, tag);
        } else if (tag == "R1" || tag == "R2" || tag == "R3") {
            starts[static_cast<std::size_t>(tag[1] - '1')] = read_rect(ss, tag);
        } else {
            throw ConfigError("goal map: unknown record '" + tag + "' at line " + std::to_string(lineno));
        }
    }
    if (declared < 0) throw ConfigError("goal map: missing header");
    if (static_cast<long long>(singles) != declared && declared != static_cast<long long>(obstacles.size()))
        throw ConfigError("goal map: obstacle count does not match header");
    if (!goal) throw ConfigError("goal map: missing G record");
    std::array<Rect, kGoalAgents> s{};
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!starts[i]) throw ConfigError("goal map: missing R" + std::to_string(i + 1) + " record");
        s[i] = *starts[i];
    }
    return GoalWorld(side, {obstacles.begin(), obstacles.end()}, *goal, s);
}

int gs_angle_bins(const AbstractionParams& params) {
    return std::max(1, static_cast<int>(std::floor(360.0 / params.angle_resolution)));
}

GoalState gs_state(Vec2 agent, Vec2 goal, const AbstractionParams& params) {
    const Vec2 ray = goal - agent;
    const double dist = norm(ray);
    GoalState s;
    s.dist = bin_distance(dist, params);
    double angle = 0.0;
    if (dist > 1e-12) {
        angle = std::atan2(ray.y, ray.x) * 180.0 / std::numbers::pi;
        if (angle < 0.0) angle += 360.0;
        if (angle >= 360.0) angle = 0.0;
    }
    const int bins = gs_angle_bins(params);
    s.angle = std::clamp(static_cast<int>(std::ceil(angle / params.angle_resolution)), 1, bins);
    return s;
}

void TrialConfig::validate() const {
    if (episodes < 1) throw ConfigError("episodes must be positive");
    if (trials < 1) throw ConfigError("trials must be positive");
    if (step_cap < 1) throw ConfigError("step_cap must be positive");
    abstraction.validate();
    if (!(learning_rate > 0 && learning_rate <= 1)) throw ConfigError("learning_rate must be in (0, 1]");
    if (!(discount >= 0 && discount <= 1)) throw ConfigError("discount must be in [0, 1]");
    if (!(eps_start >= 0 && eps_start <= 1 && eps_end >= 0 && eps_end <= 1))
        throw ConfigError("epsilon bounds must be in [0, 1]");
    if (eps_episodes < 1) throw ConfigError("eps_episodes must be positive");
    if (explore_hold < 1) throw ConfigError("explore_hold must be positive");
}

double TrialConfig::epsilon(int episode) const {
    const double t = std::min(1.0, static_cast<double>(episode - 1) / eps_episodes);
    return eps_start + (eps_end - eps_start) * t;
}

GoalSearch::GoalSearch(const GoalWorld& world, const TrialConfig& config, std::uint64_t trial_seed)
    : world_(&world), config_(config), start_rng_(derive_seed(trial_seed, "starts")) {
    config_.validate();
    if (config_.abstraction.side != world.side())
        config_.abstraction.side = world.side();
    angle_bins_ = gs_angle_bins(config_.abstraction);
    table_size_ = static_cast<std::size_t>(config_.abstraction.distance_bins()) *
                  static_cast<std::size_t>(angle_bins_) * kGoalActions;
    agents_.resize(kGoalAgents);
    for (std::size_t i = 0; i < agents_.size(); ++i) {
        for (auto& t : agents_[i].q) t.assign(table_size_, config_.initial_q);
        for (auto& t : agents_[i].own) t.assign(table_size_, 0);
        agents_[i].rng = RandomStream(derive_seed(trial_seed, "explore", i));
    }
    dirty_flag_.assign(table_size_ * kGoalAgents, 0);
}

std::size_t GoalSearch::key(const GoalState& s, int action) const {
    return (static_cast<std::size_t>(s.dist - 1) * static_cast<std::size_t>(angle_bins_) +
            static_cast<std::size_t>(s.angle - 1)) * kGoalActions + static_cast<std::size_t>(action);
}

void GoalSearch::fuse_dirty() {
    for (const auto& [area, k] : dirty_) {
        const auto a = static_cast<std::size_t>(area);
        double weighted = 0.0;
        std::int64_t total = 0;
        for (const GoalAgent& ag : agents_) {
            weighted += ag.q[a][k] * static_cast<double>(ag.own[a][k]);
            total += ag.own[a][k];
        }
        if (total > 0) {
            const double fused = weighted / static_cast<double>(total);
            for (GoalAgent& ag : agents_) ag.q[a][k] = fused;
        }
        dirty_flag_[a * table_size_ + k] = 0;
    }
    dirty_.clear();
}

std::array<int, kGoalAgents> GoalSearch::run_episode(int episode) {
    const GoalWorld& w = *world_;
    const Vec2 goal = w.goal().center();
    std::array<int, kGoalAgents> steps{};
    std::array<bool, kGoalAgents> active{};
    for (std::size_t i = 0; i < agents_.size(); ++i) {
        const Rect& r = w.starts()[i];
        agents_[i].pos = {r.x_min + start_rng_.uniform_index(r.width()),
                          r.y_min + start_rng_.uniform_index(r.height())};
        active[i] = !w.goal().contains(agents_[i].pos);
        agents_[i].hold_left = 0;
    }
    const double eps = config_.epsilon(episode);

    for (int t = 0; t < config_.step_cap; ++t) {
        if (std::none_of(active.begin(), active.end(), [](bool b) { return b; })) break;
        for (std::size_t i = 0; i < agents_.size(); ++i) {
            if (!active[i]) continue;
            GoalAgent& ag = agents_[i];
            const int area = w.area_of(ag.pos);
            const auto& q = ag.q[static_cast<std::size_t>(area)];
            const GoalState s = gs_state(Vec2{ag.pos}, goal, config_.abstraction);
            const std::size_t base = key(s, 0);

            int action = 0;
            if (ag.hold_left > 0) {
                action = ag.hold_action;
                --ag.hold_left;
            } else if (ag.rng.uniform_real() < eps) {
                action = ag.rng.uniform_index(kGoalActions);
                ag.hold_action = action;
                ag.hold_left = ag.rng.uniform_index(config_.explore_hold);
            } else {
                // Greedy with uniformly random tie-breaking.
                double best = q[base];
                int ties = 1;
                for (int a = 1; a < kGoalActions; ++a) {
                    const double v = q[base + static_cast<std::size_t>(a)];
                    if (v > best) {
                        best = v;
                        action = a;
                        ties = 1;
                    } else if (v == best && ag.rng.uniform_index(++ties) == 0) {
                        action = a;
                    }
                }
            }

            const Cell target = ag.pos + displacement(static_cast<GoalAction>(action));
            const Cell next = w.passable(target) ? target : ag.pos;
            const bool arrived = w.goal().contains(next);
            double next_value = 0.0;
            if (!arrived) {
                const auto& nq = ag.q[static_cast<std::size_t>(w.area_of(next))];
                const std::size_t nb = key(gs_state(Vec2{next}, goal, config_.abstraction), 0);
                next_value = *std::max_element(nq.begin() + static_cast<std::ptrdiff_t>(nb),
                                               nq.begin() + static_cast<std::ptrdiff_t>(nb + kGoalActions));
            }
            double reward = arrived ? config_.goal_reward : 0.0;
            if (config_.progress_reward != 0.0)
                reward += config_.progress_reward * (distance(Vec2{ag.pos}, goal) - distance(Vec2{next}, goal));
            const std::size_t k = base + static_cast<std::size_t>(action);
            auto& qa = ag.q[static_cast<std::size_t>(area)];
            qa[k] += config_.learning_rate * (reward + config_.discount * next_value - qa[k]);
            ++ag.own[static_cast<std::size_t>(area)][k];
            if (config_.fusion) {
                auto& flag = dirty_flag_[static_cast<std::size_t>(area) * table_size_ + k];
                if (!flag) {
                    flag = 1;
                    dirty_.emplace_back(area, k);
                }
            }
            ag.pos = next;
            ++steps[i];
            if (arrived) active[i] = false;
        }
        if (config_.fusion) fuse_dirty();
    }
    return steps;
}

double GoalSearchResult::at(int agent, int episode) const {
    if (agent < 1 || agent > kGoalAgents || episode < 1 || episode > episodes)
        throw DomainError("goal search result: index out of range");
    return mean_steps[static_cast<std::size_t>(agent - 1)][static_cast<std::size_t>(episode - 1)];
}

GoalSearchResult run_goalsearch_experiment(const GoalWorld& world, const TrialConfig& config) {
    config.validate();
    GoalSearchResult result;
    result.episodes = config.episodes;
    result.trials = config.trials;
    for (auto& m : result.mean_steps) m.assign(static_cast<std::size_t>(config.episodes), 0.0);
    for (int trial = 0; trial < config.trials; ++trial) {
        GoalSearch search(world, config, derive_seed(config.seed, "trial", static_cast<std::uint64_t>(trial)));
        for (int e = 1; e <= config.episodes; ++e) {
            const auto steps = search.run_episode(e);
            for (std::size_t i = 0; i < steps.size(); ++i)
                result.mean_steps[i][static_cast<std::size_t>(e - 1)] += steps[i];
        }
    }
    for (auto& m : result.mean_steps)
        for (double& v : m) v /= config.trials;
    return result;
}

void write_goalsearch_csv(std::ostream& out, const GoalSearchResult& result) {
    out << "# shepherd goalsearch csv v1\n";
    out << "episode,agent,meanSteps\n";
    out.precision(17);
    for (int e = 1; e <= result.episodes; ++e)
        for (int a = 1; a <= kGoalAgents; ++a) out << e << ',' << a << ',' << result.at(a, e) << '\n';
}

}  // namespace shepherd
