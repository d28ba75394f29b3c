#include "shepherd/validate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>
#include <set>

#include "shepherd/agents.hpp"
#include "shepherd/coordinator.hpp"
#include "shepherd/goalsearch.hpp"
#include "shepherd/metrics.hpp"
#include "shepherd/scenario.hpp"

namespace shepherd {

namespace {

struct Check {
    const char* name;
    std::function<std::string()> run;  // empty string means pass
};

std::string expect(bool ok, const std::string& why) { return ok ? std::string{} : why; }

std::string check_state_space() {
    const auto big = state_space_size({10, 5, 100});
    const auto small = state_space_size({20, 10, 100});
    return expect(big == 7056 && small == 882,
                  "got " + std::to_string(big) + " and " + std::to_string(small));
}

std::string check_fusion() {
    RandomStream rng(derive_seed(7, "validate-fusion"));
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<QTable> tables;
        const int n = 1 + rng.uniform_index(5);
        for (int t = 0; t < n; ++t) {
            QTable q(Behavior::GroupHerding);
            for (int k = 0; k < 20; ++k) {
                QEntry e;
                e.q = rng.uniform_real() * 100.0 - 50.0;
                e.visits = rng.uniform_index(10);
                q.set({{1 + rng.uniform_index(3), 1 + rng.uniform_index(3), 1}, rng.uniform_index(9)}, e);
            }
            tables.push_back(q);
        }
        const QTable fused = fuse_tables(tables);
        std::vector<QTable> reversed(tables.rbegin(), tables.rend());
        const QTable other = fuse_tables(reversed);
        for (const auto& [key, e] : fused.entries()) {
            if (std::abs(e.q - other.q(key.state, key.action)) > 1e-12) return "not permutation invariant";
        }
        const QTable single = fuse_tables(std::span<const QTable>(&fused, 1));
        for (const auto& [key, e] : fused.entries()) {
            if (std::abs(e.q - single.q(key.state, key.action)) > 1e-12) return "not idempotent";
        }
    }
    return {};
}

std::string check_behaviors() {
    RandomStream rng(derive_seed(7, "validate-behavior"));
    for (int i = 0; i < 10000; ++i) {
        const int group = 1 + rng.uniform_index(4);
        const Zone zone = rng.uniform_index(2) == 0 ? Zone::A : Zone::B;
        const double angle = rng.uniform_real() * 180.0;
        const int prev = rng.uniform_index(kBehaviorCount + 1);
        const std::optional<Behavior> previous =
            prev == kBehaviorCount ? std::nullopt : std::optional<Behavior>(kAllBehaviors[static_cast<std::size_t>(prev)]);
        const Behavior b = decompose_behavior(group, zone, angle, previous);
        if (group == 1 && is_group(b)) return "solo agent got a group behavior";
        if (group > 1 && !is_group(b)) return "group got a solo behavior";
    }
    return {};
}

std::string check_world() {
    ScenarioConfig c;
    c.side = 30;
    c.cows = 16;
    c.obstacles = 20;
    c.agents = 2;
    auto [map, world] = build_scenario(c);
    RandomStream rng(derive_seed(7, "validate-world"));
    int inside = 0;
    for (int t = 0; t < 300; ++t) {
        std::vector<MoveAction> actions;
        for (std::size_t i = 0; i < world.agents.size(); ++i) actions.push_back(move_from_index(rng.uniform_index(kMoveCount)));
        world = step_world(world, map, actions);
        if (!occupancy_valid(world, map)) return "occupancy violated at step " + std::to_string(t);
        const int now = static_cast<int>(std::count_if(world.cows.begin(), world.cows.end(),
                                                       [&](Cell cow) { return map.in_corral(cow); }));
        if (now < inside) return "a corralled cow left the corral";
        inside = now;
    }
    return {};
}

std::string check_messages() {
    QTable t(Behavior::SoloFollowing);
    t.set({{1, 2, 3}, 4}, {0.25, 3});
    const std::vector<Message> all = {
        Message::coordinate(0, 1, {3, 4}),
        Message::closer_notify(1, 2),
        Message::entrances_report(1, 9, {{1, 2}, {3, 4}}),
        Message::entrances_broadcast(9, {{1, 2}}),
        Message::table_share(2, 5, t),
        Message::fused_broadcast(5, {t}),
        Message::cooperation(0, 1, 3, {{5, 6}}),
    };
    for (const Message& m : all) {
        if (decode(encode(m)) != m) return "round trip failed for " + std::string(to_string(m.kind));
    }
    return {};
}

std::string check_coordinator() {
    CoordinatorState s(3, {10, 10});
    std::vector<Message> out;
    const std::vector<Cell> pos = {{0, 0}, {9, 9}, {20, 20}};
    for (int i = 0; i < 3; ++i) {
        auto emitted = handle_message(s, Message::coordinate(i, 1, pos[static_cast<std::size_t>(i)]));
        out.insert(out.end(), emitted.begin(), emitted.end());
    }
    if (out.size() != 1 || out[0].kind != MessageKind::CloserNotify) return "expected exactly one CloserNotify";
    return expect(out[0].as<CloserPayload>().agent == 1, "wrong closer elected");
}

std::string check_clustering() {
    RandomStream rng(derive_seed(7, "validate-cluster"));
    for (int scene = 0; scene < 50; ++scene) {
        std::set<Cell> unique;
        while (unique.size() < 15) unique.insert({rng.uniform_index(20), rng.uniform_index(20)});
        const std::vector<Cell> cows(unique.begin(), unique.end());
        const auto herd = cluster_herd(cows, 3.0, {10, 10});
        if (!herd) return "no herd found";
        // Every member must be linked to another member unless alone, and no
        // outside cow may be within the threshold of a member.
        for (Cell c : cows) {
            const bool member = std::find(herd->members.begin(), herd->members.end(), c) != herd->members.end();
            if (member) continue;
            for (Cell m : herd->members)
                if (distance(Vec2{c}, Vec2{m}) <= 3.0) return "cluster not closed under linkage";
        }
    }
    return {};
}

std::string check_metrics() {
    const LearningCurve c29 = {{0, 29}, {50, 29}, {100, 29}};
    const LearningCurve c58 = {{0, 58}, {50, 58}, {100, 58}};
    const auto same = transfer_rate(c29, c29);
    const auto twice = transfer_rate(c58, c29);
    if (!same || *same != 0.0) return "identical curves should give 0";
    if (!twice || *twice != 1.0) return "doubled curve should give 1";
    return expect(jumpstart(c29, 1.0) == 29.0, "constant jumpstart");
}

std::string check_goalsearch() {
    const AbstractionParams p{20, 10, 300};
    if (gs_state({0, 0}, {30, 40}, p).dist != 3) return "distance bin";
    if (gs_state({0, 0}, {10, 0}, p).angle != 1) return "east angle bin";
    if (gs_state({0, 0}, {0, 10}, p).angle != 9) return "north angle bin";
    const GoalWorld w = canonical_goal_world();
    for (const Rect& r : w.starts())
        for (int x = r.x_min; x <= r.x_max; ++x)
            for (int y = r.y_min; y <= r.y_max; ++y)
                if (!w.passable({x, y})) return "start area blocked";
    return {};
}

}  // namespace

int run_validation(std::ostream& out) {
    const std::vector<Check> checks = {
        {"abstraction.state_space", check_state_space},
        {"abstraction.behavior_totality", check_behaviors},
        {"learning.fusion_properties", check_fusion},
        {"world.occupancy_and_corral", check_world},
        {"agents.cluster_closure", check_clustering},
        {"coordinator.message_round_trip", check_messages},
        {"coordinator.election", check_coordinator},
        {"harness.metric_closed_forms", check_metrics},
        {"goalsearch.state_and_map", check_goalsearch},
    };
    int failed = 0;
    for (const Check& c : checks) {
        std::string why;
        try {
            why = c.run();
        } catch (const std::exception& e) {
            why = std::string("exception: ") + e.what();
        }
        if (why.empty()) {
            out << "PASS " << c.name << '\n';
        } else {
            ++failed;
            out << "FAIL " << c.name << ": " << why << '\n';
        }
    }
    return failed;
}

}  // namespace shepherd
