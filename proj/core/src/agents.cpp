#include "shepherd/agents.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <set>

#include "shepherd/errors.hpp"

namespace shepherd {

namespace {

constexpr int kStallLimit = 8;

int find_root(std::vector<int>& parent, int i) {
    while (parent[static_cast<std::size_t>(i)] != i) {
        parent[static_cast<std::size_t>(i)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(i)])];
        i = parent[static_cast<std::size_t>(i)];
    }
    return i;
}

double heading_deg(Vec2 v) { return std::atan2(v.y, v.x) * 180.0 / std::numbers::pi; }

struct HerdFrame {
    Vec2 axis{1.0, 0.0};
    Vec2 normal{0.0, 1.0};
};

HerdFrame herd_frame(Vec2 agent, Vec2 gcm, Vec2 target) {
    HerdFrame f;
    if (auto u = unit(target - gcm)) f.axis = *u;
    f.normal = {-f.axis.y, f.axis.x};
    if (dot(agent - gcm, f.normal) < 0.0) f.normal = -1.0 * f.normal;
    return f;
}

std::vector<Vec2> member_points(Vec2 self, const std::vector<Cell>& teammates) {
    std::vector<Vec2> pts;
    pts.reserve(teammates.size() + 1);
    pts.push_back(self);
    for (Cell c : teammates) pts.emplace_back(c);
    return pts;
}

// True when the row ranks some action strictly above another.
bool state_seen(const QTable& table, const AbstractState& s) {
    const auto row = table.row(s);
    return std::any_of(row.begin(), row.end(), [&](double q) { return q != row[0]; });
}

MoveAction random_legal(AgentState& agent, const MoveMask& legal) {
    const auto m = move_from_index(agent.rng.uniform_index(kMoveCount));
    return legal[static_cast<std::size_t>(index_of(m))] ? m : MoveAction::Skip;
}

}  // namespace

Vec2 centroid(std::span<const Cell> cells) {
    Vec2 sum{};
    for (Cell c : cells) sum += Vec2{c};
    const auto n = static_cast<double>(cells.size());
    return n == 0 ? sum : Vec2{sum.x / n, sum.y / n};
}

std::optional<Herd> cluster_herd(std::span<const Cell> cows, double threshold, Vec2 agent) {
    if (!(threshold > 0)) throw DomainError("cluster_herd: threshold must be positive");
    if (cows.empty()) return std::nullopt;
    const int n = static_cast<int>(cows.size());
    std::vector<int> parent(static_cast<std::size_t>(n));
    std::iota(parent.begin(), parent.end(), 0);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (distance(Vec2{cows[static_cast<std::size_t>(i)]}, Vec2{cows[static_cast<std::size_t>(j)]}) <= threshold) {
                const int a = find_root(parent, i);
                const int b = find_root(parent, j);
                if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
            }
        }
    }
    // Roots are the lowest member index of each cluster.
    std::map<int, std::vector<Cell>> clusters;
    for (int i = 0; i < n; ++i) clusters[find_root(parent, i)].push_back(cows[static_cast<std::size_t>(i)]);

    const std::vector<Cell>* best = nullptr;
    double best_dist = 0.0;
    for (const auto& [root, members] : clusters) {
        const double d = distance(centroid(members), agent);
        if (!best || members.size() > best->size() || (members.size() == best->size() && d < best_dist)) {
            best = &members;
            best_dist = d;
        }
    }
    return Herd{*best, centroid(*best)};
}

std::optional<Herd> aggregate_herds(std::span<const Herd> herds) {
    std::set<Cell> all;
    for (const Herd& h : herds) all.insert(h.members.begin(), h.members.end());
    if (all.empty()) return std::nullopt;
    Herd out{{all.begin(), all.end()}, {}};
    out.gcm = centroid(out.members);
    return out;
}

Cell select_target_entrance(std::span<const Cell> entrances, Vec2 gcm) {
    if (entrances.empty()) throw ConfigError("no corral entrances known (detection incomplete)");
    std::size_t best = 0;
    double best_d = distance(Vec2{entrances[0]}, gcm);
    for (std::size_t i = 1; i < entrances.size(); ++i) {
        const double d = distance(Vec2{entrances[i]}, gcm);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return entrances[best];
}

double compute_reward(const WorldState& before, const WorldState& after, const GridMap& map,
                      RewardMode mode) {
    const double level = success_percent(after, map);
    if (mode == RewardMode::Level) return level;
    return level - success_percent(before, map);
}

std::vector<Cell> corral_ring(const Rect& k) {
    std::vector<Cell> ring;
    for (int x = k.x_min - 1; x <= k.x_max + 1; ++x) ring.push_back({x, k.y_max + 1});
    for (int y = k.y_max; y >= k.y_min - 1; --y) ring.push_back({k.x_max + 1, y});
    for (int x = k.x_max; x >= k.x_min - 1; --x) ring.push_back({x, k.y_min - 1});
    for (int y = k.y_min; y <= k.y_max; ++y) ring.push_back({k.x_min - 1, y});
    return ring;
}

std::vector<Cell> corral_border(const Rect& k) {
    std::vector<Cell> border;
    std::set<Cell> seen;
    auto add = [&](Cell c) {
        if (seen.insert(c).second) border.push_back(c);
    };
    for (int x = k.x_min; x <= k.x_max; ++x) add({x, k.y_max});
    for (int y = k.y_max; y >= k.y_min; --y) add({k.x_max, y});
    for (int x = k.x_max; x >= k.x_min; --x) add({x, k.y_min});
    for (int y = k.y_min; y <= k.y_max; ++y) add({k.x_min, y});
    return border;
}

std::vector<Cell> outward_neighbours(const Rect& k, Cell b) {
    std::vector<Cell> out;
    if (b.y == k.y_max) out.push_back({b.x, b.y + 1});
    if (b.x == k.x_max) out.push_back({b.x + 1, b.y});
    if (b.y == k.y_min) out.push_back({b.x, b.y - 1});
    if (b.x == k.x_min) out.push_back({b.x - 1, b.y});
    return out;
}

MoveMask legal_moves(const Percept& percept) {
    MoveMask mask{};
    mask[0] = true;
    for (int i = 1; i < kMoveCount; ++i) {
        mask[static_cast<std::size_t>(i)] = percept.free(percept.self + displacement(move_from_index(i)));
    }
    return mask;
}

MoveAction heuristic_rotational(Cell agent, const Herd& herd, Vec2 target, const MoveMask& legal) {
    if (herd.members.empty()) throw DomainError("heuristic_rotational: empty herd");
    const Vec2 gcm = herd.gcm;
    const auto toward_target = unit(target - gcm);
    const double radius = distance(Vec2{agent}, gcm);
    if (!toward_target || radius < 1e-9) return MoveAction::Skip;
    const double post_heading = heading_deg(-1.0 * *toward_target);

    MoveAction best = MoveAction::Skip;
    double best_cost = std::numeric_limits<double>::infinity();
    for (MoveAction m : kAllMoves) {
        if (!legal[static_cast<std::size_t>(index_of(m))]) continue;
        const Vec2 p = Vec2{agent + displacement(m)} - gcm;
        const double r = norm(p);
        if (r < radius - 1.0 || r < 1e-9) continue;
        const double arc = radius * angular_distance_deg(heading_deg(p), post_heading) *
                           std::numbers::pi / 180.0;
        const double cost = arc + std::abs(r - radius);
        if (cost < best_cost - 1e-12) {
            best_cost = cost;
            best = m;
        }
    }
    return best;
}

MoveAction heuristic_middle(Cell /*agent*/, const Herd& herd, Vec2 target, const MoveMask& legal) {
    if (herd.members.empty()) throw DomainError("heuristic_middle: empty herd");
    const auto dir = unit(target - herd.gcm);
    if (!dir) return MoveAction::Skip;
    const double want = heading_deg(*dir);
    MoveAction best = MoveAction::Skip;
    double best_diff = std::numeric_limits<double>::infinity();
    for (int i = 1; i < kMoveCount; ++i) {
        if (!legal[static_cast<std::size_t>(i)]) continue;
        const MoveAction m = move_from_index(i);
        const double diff = angular_distance_deg(heading_deg(Vec2{displacement(m)}), want);
        if (diff < best_diff - 1e-9) {
            best_diff = diff;
            best = m;
        }
    }
    return best;
}

FractionalState view_state(const ActionView& view, Vec2 self, Vec2 gcm) {
    if (view.teammates.empty()) return solo_fractional(self, view.target, gcm, view.abstraction);
    const auto pts = member_points(self, view.teammates);
    return group_fractional(pts, view.target, gcm, view.abstraction);
}

int canonical_action(MoveAction concrete, Vec2 agent, Vec2 gcm, Vec2 target) {
    if (concrete == MoveAction::Skip) return index_of(MoveAction::Skip);
    const HerdFrame f = herd_frame(agent, gcm, target);
    const Vec2 d{displacement(concrete)};
    return index_of(quantize_direction({dot(d, f.axis), dot(d, f.normal)}));
}

StateDelta canonical_effect(int abstract_action, const ActionView& view) {
    const Vec2 self{view.self};
    const HerdFrame f = herd_frame(self, view.herd.gcm, view.target);
    const Vec2 d{displacement(move_from_index(abstract_action))};
    const Vec2 moved = self + d.x * f.axis + d.y * f.normal;
    return view_state(view, moved, view.herd.gcm) - view_state(view, self, view.herd.gcm);
}

std::array<std::optional<StateDelta>, kMoveCount> predicted_deltas(const ActionView& view,
                                                                   const GridMap& map) {
    std::array<std::optional<StateDelta>, kMoveCount> out{};
    const FractionalState now = view_state(view, Vec2{view.self}, view.herd.gcm);
    CowParams predictor = view.predictor;
    predictor.random_weight = 0.0;
    WorldState sim;
    sim.step = view.step;
    sim.cows = view.herd.members;
    for (MoveAction m : kAllMoves) {
        if (!view.legal[static_cast<std::size_t>(index_of(m))]) continue;
        const Cell moved = view.self + displacement(m);
        if (m != MoveAction::Skip && !map.passable(moved)) continue;
        sim.agents.clear();
        sim.agents.push_back(moved);
        sim.agents.insert(sim.agents.end(), view.teammates.begin(), view.teammates.end());
        sim.agents.insert(sim.agents.end(), view.bystanders.begin(), view.bystanders.end());
        const auto cows = update_cows(sim, map, predictor);
        out[static_cast<std::size_t>(index_of(m))] = view_state(view, Vec2{moved}, centroid(cows)) - now;
    }
    return out;
}

MoveAction map_action(const StateDelta& intended, const ActionView& view, const GridMap& map) {
    const auto deltas = predicted_deltas(view, map);
    MoveAction best = MoveAction::Skip;
    double best_cost = std::numeric_limits<double>::infinity();
    for (MoveAction m : kAllMoves) {
        const auto& d = deltas[static_cast<std::size_t>(index_of(m))];
        if (!d) continue;
        const double cost = std::abs((*d)[0] - intended[0]) + std::abs((*d)[1] - intended[1]) +
                            std::abs((*d)[2] - intended[2]);
        if (cost < best_cost - 1e-12) {
            best_cost = cost;
            best = m;
        }
    }
    return best;
}

MoveAction map_action(int abstract_action, const ActionView& view, const GridMap& map) {
    return map_action(canonical_effect(abstract_action, view), view, map);
}

AgentState make_agent(int id, const AgentConfig& config, std::uint64_t seed) {
    AgentState a;
    a.id = id;
    for (Behavior b : kAllBehaviors) a.tables[index_of(b)] = QTable(b);
    a.rng = RandomStream(seed);
    const auto n = static_cast<std::size_t>(config.agent_count);
    a.invited.assign(n, false);
    a.cooperating.assign(n, false);
    a.unseen_steps.assign(n, 0);
    a.last_seen.assign(n, Cell{});
    return a;
}

PerimeterStep explore_corral_perimeter(AgentState& agent, const Percept& percept, const GridMap& map) {
    if (!agent.detector) throw ProtocolError("explore_corral_perimeter: agent is not the detector");
    const Rect& corral = map.corral();
    const auto ring = corral_ring(corral);
    const auto border = corral_border(corral);
    const int n = static_cast<int>(ring.size());
    PerimeterWalk& w = agent.walk;
    const Vec2 self{percept.self};

    if (!w.initialized) {
        w = PerimeterWalk{};
        w.initialized = true;
        double best = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) {
            const double d = distance(self, Vec2{ring[static_cast<std::size_t>(i)]});
            if (d < best) {
                best = d;
                w.start = i;
            }
        }
        w.pointer = w.start;
        w.best = std::numeric_limits<double>::infinity();
        w.status.assign(border.size(), -1);
    }

    for (std::size_t b = 0; b < border.size(); ++b) {
        if (w.status[b] != -1) continue;
        const auto outside = outward_neighbours(corral, border[b]);
        if (!std::all_of(outside.begin(), outside.end(), [&](Cell c) { return percept.visible(c); })) continue;
        const bool open = std::any_of(outside.begin(), outside.end(), [&](Cell c) {
            return percept.at(c) != CellContent::Obstacle;
        });
        w.status[b] = open ? 1 : 0;
    }

    auto advance = [&] {
        w.pointer = (w.pointer + 1) % n;
        ++w.advanced;
        w.stall = 0;
        w.best = std::numeric_limits<double>::infinity();
    };

    while (w.advanced < n) {
        const Cell target = ring[static_cast<std::size_t>(w.pointer)];
        const bool blocked = percept.visible(target) && percept.at(target) == CellContent::Obstacle;
        if (percept.self == target || blocked) {
            advance();
            continue;
        }
        break;
    }

    if (w.advanced >= n) {
        agent.entrances.clear();
        for (std::size_t b = 0; b < border.size(); ++b)
            if (w.status[b] == 1) agent.entrances.push_back(border[b]);
        w.initialized = false;
        return {MoveAction::Skip, true};
    }

    const Vec2 target{ring[static_cast<std::size_t>(w.pointer)]};
    const double now = distance(self, target);
    if (now < w.best - 1e-9) {
        w.best = now;
        w.stall = 0;
    } else if (++w.stall > kStallLimit) {
        advance();
    }

    const Vec2 goal{ring[static_cast<std::size_t>(w.pointer)]};
    const MoveMask legal = legal_moves(percept);
    MoveAction best = MoveAction::Skip;
    double best_d = std::numeric_limits<double>::infinity();
    for (int i = 1; i < kMoveCount; ++i) {
        if (!legal[static_cast<std::size_t>(i)]) continue;
        const MoveAction m = move_from_index(i);
        const double d = distance(Vec2{percept.self + displacement(m)}, goal);
        if (d < best_d - 1e-12) {
            best_d = d;
            best = m;
        }
    }
    return {best, false};
}

Message make_table_share(const AgentState& agent, std::int64_t step) {
    const Behavior b = agent.updated_behavior.value_or(agent.behavior.value_or(Behavior::SoloHerding));
    const QTable& local = agent.tables[index_of(b)];
    const auto& own = agent.own_visits[index_of(b)];
    QTable snapshot(b);
    for (const auto& [key, count] : own) {
        if (count <= 0) continue;
        QEntry e = *local.find(key.state, key.action);
        e.visits = count;
        snapshot.set(key, e);
    }
    return Message::table_share(agent.id, step, std::move(snapshot));
}

void assign_fused_tables(AgentState& agent, std::span<const QTable> fused) {
    for (const QTable& t : fused) {
        QTable& local = agent.tables[index_of(t.behavior())];
        for (const auto& [key, e] : t.entries()) local.set(key, e);
    }
}

AgentStepResult agent_step(AgentState& agent, const Percept& percept, std::span<const Message> inbox,
                           double reward, const GridMap& map, const AgentConfig& config) {
    AgentStepResult result;
    agent.updated_behavior.reset();
    std::vector<Herd> shared_herds;

    for (const Message& msg : inbox) {
        msg.validate();
        switch (msg.kind) {
            case MessageKind::CloserNotify:
                if (msg.as<CloserPayload>().agent == agent.id) {
                    agent.detector = true;
                    agent.walk = PerimeterWalk{};
                }
                break;
            case MessageKind::EntrancesBroadcast:
                agent.entrances = msg.as<EntrancesPayload>().entrances;
                agent.entrances_known = true;
                break;
            case MessageKind::FusedTablesBroadcast:
                assign_fused_tables(agent, msg.as<FusedTablesPayload>().tables);
                break;
            case MessageKind::Cooperation: {
                const auto sender = static_cast<std::size_t>(msg.sender);
                if (sender >= agent.cooperating.size()) throw ProtocolError("cooperation from unknown agent");
                agent.cooperating[sender] = true;
                agent.invited[sender] = true;
                const auto& herd = msg.as<CooperationPayload>().herd;
                if (!herd.empty()) shared_herds.push_back(Herd{herd, centroid(herd)});
                break;
            }
            default:
                throw ProtocolError("agent " + std::to_string(agent.id) + " cannot handle message kind " +
                                    std::string(to_string(msg.kind)));
        }
    }

    for (std::size_t j = 0; j < agent.unseen_steps.size(); ++j) ++agent.unseen_steps[j];
    for (const auto& [id, pos] : percept.allies) {
        agent.unseen_steps[static_cast<std::size_t>(id)] = 0;
        agent.last_seen[static_cast<std::size_t>(id)] = pos;
    }

    if (percept.step == 1) {
        result.outbox.push_back(Message::coordinate(agent.id, percept.step, percept.self));
        return result;
    }

    const MoveMask legal = legal_moves(percept);

    if (agent.detector) {
        const PerimeterStep walk = explore_corral_perimeter(agent, percept, map);
        result.action = walk.action;
        result.source = ActionSource::Perimeter;
        if (walk.done) {
            agent.detector = false;
            result.outbox.push_back(Message::entrances_report(agent.id, percept.step, agent.entrances));
        }
        return result;
    }

    if (!agent.entrances_known || agent.entrances.empty()) {
        result.action = random_legal(agent, legal);
        result.source = ActionSource::Random;
        return result;
    }

    // Herd detection and aggregation.
    const Vec2 self{percept.self};
    auto own = cluster_herd(percept.cows, config.proximity_threshold, self);
    std::optional<Herd> herd = own;
    if (!shared_herds.empty()) {
        if (own) shared_herds.push_back(*own);
        herd = aggregate_herds(shared_herds);
    }

    std::vector<Cell> teammates;
    for (std::size_t j = 0; j < agent.cooperating.size(); ++j) {
        if (static_cast<int>(j) == agent.id || !agent.cooperating[j]) continue;
        if (agent.unseen_steps[j] < config.dissolve_after) teammates.push_back(agent.last_seen[j]);
    }

    // Invite newly sighted allies, at most once each.
    for (const auto& [id, pos] : percept.allies) {
        const auto j = static_cast<std::size_t>(id);
        if (agent.invited[j]) continue;
        agent.invited[j] = true;
        agent.cooperating[j] = true;
        result.outbox.push_back(Message::cooperation(agent.id, id, percept.step,
                                                     own ? own->members : std::vector<Cell>{}));
    }

    if (!herd) {
        if (agent.last) {
            const Transition& t = *agent.last;
            q_update_with_value(agent.tables[index_of(t.behavior)], t.state, t.action, reward, 0.0,
                                config.learning);
            ++agent.own_visits[index_of(t.behavior)][QKey{t.state, t.action}];
            agent.updated_behavior = t.behavior;
            result.updated = true;
            agent.last.reset();
        }
        result.action = random_legal(agent, legal);
        result.source = ActionSource::Random;
        return result;
    }

    const Cell target_cell = select_target_entrance(agent.entrances, herd->gcm);
    const Vec2 target{target_cell};
    ActionView view;
    view.self = percept.self;
    view.teammates = teammates;
    for (const auto& [id, pos] : percept.allies) {
        if (std::find(teammates.begin(), teammates.end(), pos) == teammates.end()) view.bystanders.push_back(pos);
    }
    view.herd = *herd;
    view.target = target;
    view.abstraction = config.abstraction;
    view.predictor = config.predictor;
    view.legal = legal;
    view.step = percept.step;

    const FractionalState frac = view_state(view, self, herd->gcm);
    AbstractState state;
    double angle = 0.0;
    if (teammates.empty()) {
        state = solo_state(self, target, herd->gcm, config.abstraction);
        angle = vertex_angle_deg(herd->gcm, self, target);
    } else {
        const auto pts = member_points(self, teammates);
        state = group_state(pts, target, herd->gcm, config.abstraction);
        angle = std::min(180.0, frac.angle * config.abstraction.angle_resolution);
    }
    const int group_size = static_cast<int>(teammates.size()) + 1;
    const Zone zone = zone_of(herd->gcm, map, target_cell);
    const Behavior behavior = decompose_behavior(group_size, zone, angle, agent.behavior, config.thresholds);

    if (agent.last) {
        const Transition& t = *agent.last;
        QTable& table = agent.tables[index_of(t.behavior)];
        const double next_value = agent.tables[index_of(behavior)].max_q(state);
        q_update_with_value(table, t.state, t.action, reward, next_value, config.learning);
        ++agent.own_visits[index_of(t.behavior)][QKey{t.state, t.action}];
        agent.updated_behavior = t.behavior;
        result.updated = true;
    }

    const QTable& table = agent.tables[index_of(behavior)];
    MoveAction action = MoveAction::Skip;
    int key = 0;
    if (config.heuristics && is_following(behavior)) {
        action = heuristic_rotational(percept.self, *herd, target, legal);
        key = canonical_action(action, self, herd->gcm, target);
        result.source = ActionSource::HeuristicRotational;
    } else if (config.heuristics && is_herding(behavior)) {
        action = heuristic_middle(percept.self, *herd, target, legal);
        key = canonical_action(action, self, herd->gcm, target);
        result.source = ActionSource::HeuristicMiddle;
    } else {
        ActionChoice choice = select_action(table, state, percept.step, config.learning, agent.rng);
        if (!choice.exploratory && config.explore_unseen && !state_seen(table, state)) {
            choice = {agent.rng.uniform_index(kMoveCount), true};
        }
        if (choice.exploratory) {
            const MoveAction m = move_from_index(choice.action);
            action = legal[static_cast<std::size_t>(choice.action)] ? m : MoveAction::Skip;
            key = canonical_action(action, self, herd->gcm, target);
            result.source = ActionSource::Explore;
        } else {
            key = choice.action;
            action = map_action(key, view, map);
            result.source = ActionSource::Exploit;
        }
    }

    agent.last = Transition{behavior, state, key};
    agent.behavior = behavior;
    result.action = action;
    result.behavior = behavior;
    result.group_size = group_size;
    return result;
}

}  // namespace shepherd
