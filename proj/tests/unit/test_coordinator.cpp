#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "oracles.hpp"
#include "shepherd/coordinator.hpp"
#include "shepherd/errors.hpp"
#include "shepherd/simulation.hpp"

using namespace shepherd;

namespace {

QTable table_with(Behavior b, double q, std::int64_t m) {
    QTable t(b);
    t.set({{1, 2, 3}, 4}, {q, m});
    return t;
}

}  // namespace

TEST(Messages, EncodeDecodeRoundTrip) {
    QTable t = table_with(Behavior::GroupHerding, 1.0 / 3.0, 7);
    const std::vector<Message> all{
        Message::coordinate(2, 1, {4, 5}),
        Message::closer_notify(1, 2),
        Message::entrances_report(0, 40, {{1, 2}, {3, 4}}),
        Message::entrances_broadcast(40, {}),
        Message::table_share(1, 9, t),
        Message::fused_broadcast(9, {t, QTable(Behavior::SoloTransferring)}),
        Message::cooperation(0, 1, 12, {{7, 7}, {7, 8}}),
    };
    for (const Message& m : all) {
        const Message back = decode(encode(m));
        EXPECT_EQ(back, m) << encode(m);
    }
    EXPECT_THROW(decode("3 0 -1 Bogus"), ProtocolError);
    EXPECT_THROW(decode("3 0 -1 Coordinate 4"), ProtocolError);
}

TEST(Coordinator, CloserElection) {
    CoordinatorState s(3, {50, 50});
    EXPECT_TRUE(handle_message(s, Message::coordinate(0, 1, {10, 10})).empty());
    EXPECT_TRUE(handle_message(s, Message::coordinate(1, 1, {45, 50})).empty());
    const auto out = handle_message(s, Message::coordinate(2, 1, {55, 55}));
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].kind, MessageKind::CloserNotify);
    EXPECT_EQ(out[0].as<CloserPayload>().agent, 1);
    EXPECT_THROW(handle_message(s, Message::coordinate(0, 2, {1, 1})), ProtocolError);
}

TEST(Coordinator, TieKeepsIncumbent) {
    CoordinatorState s(2, {0, 0});
    handle_message(s, Message::coordinate(0, 1, {3, 4}));
    const auto out = handle_message(s, Message::coordinate(1, 1, {4, 3}));
    EXPECT_EQ(out.at(0).as<CloserPayload>().agent, 0);
    EXPECT_FALSE(is_closer({3, 4}, {4, 3}, {0, 0}));
}

TEST(Coordinator, EntrancesRelay) {
    CoordinatorState s(2, {0, 0});
    const auto out = handle_message(s, Message::entrances_report(1, 30, {{5, 5}}));
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].kind, MessageKind::EntrancesBroadcast);
    EXPECT_EQ(out[0].recipient, kAllAgents);
    EXPECT_EQ(out[0].as<EntrancesPayload>().entrances, (std::vector<Cell>{{5, 5}}));
}

TEST(Coordinator, FusesAfterEveryAgentShares) {
    CoordinatorState s(3, {0, 0});
    const std::vector<QTable> shares{table_with(Behavior::SoloHerding, 1.0, 1),
                                     table_with(Behavior::SoloHerding, 3.0, 3),
                                     table_with(Behavior::GroupFollowing, 8.0, 2)};
    EXPECT_TRUE(handle_message(s, Message::table_share(0, 4, shares[0])).empty());
    EXPECT_THROW(handle_message(s, Message::table_share(0, 4, shares[0])), ProtocolError);
    EXPECT_TRUE(handle_message(s, Message::table_share(1, 4, shares[1])).empty());
    const auto out = handle_message(s, Message::table_share(2, 4, shares[2]));
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(s.counter2, 0);
    const auto& fused = out[0].as<FusedTablesPayload>().tables;
    ASSERT_EQ(fused.size(), 2u);
    const std::vector<QTable> herding{shares[0], shares[1]};
    const auto ref = oracle::brute_fuse(herding);
    EXPECT_DOUBLE_EQ(fused[0].q({1, 2, 3}, 4), ref.at({1, 2, 3, 4}).q);
    EXPECT_EQ(fused[1].behavior(), Behavior::GroupFollowing);
    EXPECT_DOUBLE_EQ(fused[1].q({1, 2, 3}, 4), 8.0);
}

TEST(Coordinator, RejectsForeignKinds) {
    CoordinatorState s(2, {0, 0});
    EXPECT_THROW(handle_message(s, Message::closer_notify(1, 0)), ProtocolError);
    EXPECT_THROW(handle_message(s, Message::coordinate(5, 1, {0, 0})), ProtocolError);
}

TEST(Coordinator, DigestTracksState) {
    CoordinatorState a(2, {1, 1});
    CoordinatorState b(2, {1, 1});
    EXPECT_EQ(state_digest(a), state_digest(b));
    handle_message(a, Message::coordinate(0, 1, {0, 0}));
    EXPECT_NE(state_digest(a), state_digest(b));
}

class SimulationTrace : public ::testing::Test {
protected:
    void run(int steps, bool transfer) {
        const GridMap map = build_map(30, 20, {12, 12, 17, 17}, 4, 19);
        WorldState w = place_entities(map, 16, 3, 5, 6);
        SimulationConfig cfg;
        cfg.agent.agent_count = 3;
        cfg.agent.abstraction = {6.0, 10.0, 30.0};
        cfg.transfer = transfer;
        sim = std::make_unique<Simulation>(map, w, cfg, 77);
        sim->set_trace(&trace);
        for (int t = 0; t < steps; ++t) {
            sim->step();
            const auto& st = sim->stats();
            if (t == 0) {
                EXPECT_EQ(st.in_last_step(MessageKind::Coordinate), 3);
                EXPECT_EQ(st.in_last_step(MessageKind::CloserNotify), 1);
            }
            shares.push_back(st.in_last_step(MessageKind::QTableShare));
            broadcasts.push_back(st.in_last_step(MessageKind::FusedTablesBroadcast));
        }
        sim->set_trace(nullptr);
    }

    std::stringstream trace;
    std::unique_ptr<Simulation> sim;
    std::vector<std::int64_t> shares, broadcasts;
};

TEST_F(SimulationTrace, ProtocolCountsAndReplay) {
    run(200, true);
    EXPECT_EQ(sim->stats().total(MessageKind::Coordinate), 3);
    EXPECT_EQ(sim->stats().total(MessageKind::CloserNotify), 1);
    for (std::size_t t = 0; t < shares.size(); ++t) {
        EXPECT_EQ(shares[t], 3) << "step " << t + 1;
        EXPECT_EQ(broadcasts[t], 1) << "step " << t + 1;
    }
    const ReplayResult r = replay_trace(trace);
    EXPECT_EQ(r.checkpoints, 200);
    EXPECT_EQ(r.mismatches, 0);
    EXPECT_EQ(serialize_state(r.state), serialize_state(sim->coordinator()));
}

TEST_F(SimulationTrace, NoSharesWithoutTransfer) {
    run(50, false);
    EXPECT_EQ(sim->stats().total(MessageKind::QTableShare), 0);
    EXPECT_EQ(sim->stats().total(MessageKind::FusedTablesBroadcast), 0);
}

TEST(Replay, DetectsTampering) {
    std::stringstream t;
    t << "# trace agents 2 mid 5 5\n"
      << encode(Message::coordinate(0, 1, {1, 1})) << '\n'
      << "# coordinator-state 0000000000000000\n";
    const ReplayResult r = replay_trace(t);
    EXPECT_EQ(r.checkpoints, 1);
    EXPECT_EQ(r.mismatches, 1);
    std::stringstream headless;
    headless << encode(Message::coordinate(0, 1, {1, 1})) << '\n';
    EXPECT_THROW(replay_trace(headless), ProtocolError);
}
