#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "shepherd/errors.hpp"
#include "shepherd/goalsearch.hpp"

using namespace shepherd;

TEST(GoalState, Examples) {
    const AbstractionParams p{20.0, 10.0, 300.0};
    EXPECT_EQ(gs_state({0, 0}, {30, 40}, p).dist, 3);
    EXPECT_EQ(gs_state({0, 0}, {30, 0}, p).angle, 1);
    EXPECT_EQ(gs_state({0, 0}, {0, 30}, p).angle, 9);
    EXPECT_EQ(gs_state({0, 0}, {-30, 0}, p).angle, 18);
    EXPECT_EQ(gs_state({0, 0}, {0, -30}, p).angle, 27);
    EXPECT_EQ(gs_state({5, 5}, {5, 5}, p), (GoalState{1, 1}));
    EXPECT_EQ(gs_angle_bins(p), 36);
}

TEST(GoalWorld, CanonicalLayout) {
    const GoalWorld w = canonical_goal_world();
    EXPECT_EQ(w.side(), 300);
    for (const Rect& r : w.starts()) {
        EXPECT_EQ(r.width(), 10);
        EXPECT_EQ(r.height(), 10);
    }
    EXPECT_EQ(w.area_of({45, 105}), 0);
    EXPECT_EQ(w.area_of({99, 0}), 0);
    EXPECT_EQ(w.area_of({100, 0}), 1);
    EXPECT_EQ(w.area_of({150, 135}), 1);
    EXPECT_EQ(w.area_of({255, 105}), 2);
    EXPECT_EQ(w.area_of({299, 299}), 2);
    EXPECT_FALSE(w.passable({20, 150}));
    EXPECT_TRUE(w.passable({150, 150}));
    EXPECT_FALSE(w.passable({-1, 0}));
}

TEST(GoalWorld, FileRoundTripAndBundledMap) {
    const GoalWorld w = canonical_goal_world();
    std::stringstream ss;
    write_goal_world(ss, w);
    EXPECT_EQ(read_goal_world(ss), w);
    std::ifstream bundled(SHEPHERD_DATA_DIR "/goalsearch_map.txt");
    ASSERT_TRUE(bundled.good());
    EXPECT_EQ(read_goal_world(bundled), w);
}

TEST(GoalWorld, Validation) {
    const std::array<Rect, 3> starts{Rect{0, 0, 9, 9}, Rect{20, 0, 29, 9}, Rect{40, 0, 49, 9}};
    EXPECT_THROW(GoalWorld(60, {}, Rect{5, 5, 14, 14}, starts), ConfigError);
    EXPECT_THROW(GoalWorld(60, {{3, 3}}, Rect{40, 40, 49, 49}, starts), ConfigError);
    std::istringstream bad("300 1\nQ 1 1\n");
    EXPECT_THROW(read_goal_world(bad), ConfigError);
}

TEST(Episode, UnreachableGoalHitsCap) {
    std::vector<Cell> walls;
    for (int x = 30; x <= 41; ++x) {
        walls.push_back({x, 30});
        walls.push_back({x, 41});
    }
    for (int y = 31; y <= 40; ++y) {
        walls.push_back({30, y});
        walls.push_back({41, y});
    }
    const GoalWorld w(60, walls, Rect{31, 31, 40, 40}, {Rect{0, 0, 9, 9}, Rect{20, 0, 29, 9}, Rect{45, 0, 54, 9}});
    TrialConfig c;
    c.step_cap = 300;
    c.abstraction.side = 60;
    GoalSearch gs(w, c, 5);
    const auto steps = gs.run_episode(1);
    for (int s : steps) EXPECT_EQ(s, 300);
}

TEST(Episode, FusionGatingAndSharing) {
    TrialConfig on;
    on.step_cap = 400;
    TrialConfig off = on;
    off.fusion = false;
    const GoalWorld w = canonical_goal_world();
    GoalSearch a(w, on, 3);
    GoalSearch b(w, off, 3);
    const auto sa = a.run_episode(1);
    const auto sb = b.run_episode(1);
    for (int s : sa) {
        EXPECT_GE(s, 0);
        EXPECT_LE(s, 400);
    }
    // With fusion every agent's table for an area equals its teammates'.
    const auto& ag = a.agents();
    for (int area = 0; area < 3; ++area) {
        EXPECT_EQ(ag[0].q[area], ag[1].q[area]);
        EXPECT_EQ(ag[1].q[area], ag[2].q[area]);
    }
    const auto& bg = b.agents();
    EXPECT_NE(bg[0].q[0], bg[1].q[0]);
    (void)sb;
}

TEST(Episode, TrialsAreReproducible) {
    TrialConfig c;
    c.trials = 2;
    c.episodes = 3;
    c.step_cap = 300;
    const GoalWorld w = canonical_goal_world();
    const auto r1 = run_goalsearch_experiment(w, c);
    const auto r2 = run_goalsearch_experiment(w, c);
    EXPECT_EQ(r1.mean_steps, r2.mean_steps);
    std::ostringstream csv;
    write_goalsearch_csv(csv, r1);
    EXPECT_EQ(csv.str().rfind("# shepherd goalsearch csv v1\nepisode,agent,meanSteps\n", 0), 0u);
}

TEST(TrialConfigTest, Validation) {
    TrialConfig c;
    EXPECT_NO_THROW(c.validate());
    c.trials = 0;
    EXPECT_THROW(c.validate(), ConfigError);
    c = TrialConfig{};
    EXPECT_DOUBLE_EQ(c.epsilon(1), c.eps_start);
    EXPECT_DOUBLE_EQ(c.epsilon(1000), c.eps_end);
}
