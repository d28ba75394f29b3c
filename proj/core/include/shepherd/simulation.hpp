#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "shepherd/agents.hpp"
#include "shepherd/coordinator.hpp"
#include "shepherd/world.hpp"

namespace shepherd {

struct SimulationConfig {
    AgentConfig agent;
    CowParams cows;
    bool transfer = true;
    /// Tables are shared and fused every `fusion_period` steps.
    int fusion_period = 1;
};

inline constexpr int kMessageKinds = 7;

struct MessageStats {
    std::array<std::int64_t, kMessageKinds> totals{};
    /// Messages of the last completed step, by kind.
    std::array<std::int64_t, kMessageKinds> last_step{};

    std::int64_t total(MessageKind k) const { return totals[static_cast<std::size_t>(k)]; }
    std::int64_t in_last_step(MessageKind k) const { return last_step[static_cast<std::size_t>(k)]; }
};

/// The coordinator round loop over one world.
class Simulation {
public:
    Simulation(GridMap map, WorldState world, SimulationConfig config, std::uint64_t seed);

    /// One global step: deliver pending messages, run every agent, advance
    /// the world, collect table shares, then let the coordinator process the
    /// round's messages ordered by (sender, emission).
    void step();

    const GridMap& map() const { return map_; }
    const WorldState& world() const { return world_; }
    const std::vector<AgentState>& agents() const { return agents_; }
    const CoordinatorState& coordinator() const { return coordinator_; }
    const MessageStats& stats() const { return stats_; }
    const std::vector<AgentStepResult>& last_results() const { return results_; }
    double success() const { return success_percent(world_, map_); }

    /// Logs every message and a coordinator checkpoint per step. The stream
    /// must outlive the simulation or be reset with nullptr.
    void set_trace(std::ostream* trace);

private:
    void record(const Message& msg);

    GridMap map_;
    WorldState world_;
    SimulationConfig config_;
    std::vector<AgentState> agents_;
    CoordinatorState coordinator_;
    std::vector<Message> pending_;
    std::vector<double> rewards_;
    std::vector<AgentStepResult> results_;
    MessageStats stats_;
    std::ostream* trace_ = nullptr;
};

}  // namespace shepherd
