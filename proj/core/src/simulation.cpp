#include "shepherd/simulation.hpp"

#include <ostream>

#include "shepherd/errors.hpp"
#include "shepherd/random.hpp"

namespace shepherd {

Simulation::Simulation(GridMap map, WorldState world, SimulationConfig config, std::uint64_t seed)
    : map_(std::move(map)), world_(std::move(world)), config_(std::move(config)) {
    const int n = static_cast<int>(world_.agents.size());
    if (n < 1) throw ConfigError("simulation: at least one agent required");
    if (config_.agent.agent_count != n) {
        throw ConfigError("simulation: agent_count " + std::to_string(config_.agent.agent_count) +
                          " does not match " + std::to_string(n) + " placed agents");
    }
    if (config_.fusion_period < 1) throw ConfigError("fusion_period must be >= 1");
    config_.cows.validate();
    config_.agent.learning.validate();
    for (int i = 0; i < n; ++i) {
        agents_.push_back(make_agent(i, config_.agent, derive_seed(seed, "agent", static_cast<std::uint64_t>(i))));
    }
    coordinator_ = CoordinatorState(n, map_.corral().center());
    rewards_.assign(static_cast<std::size_t>(n), 0.0);
}

void Simulation::set_trace(std::ostream* trace) {
    trace_ = trace;
    if (trace_) {
        trace_->precision(17);
        *trace_ << "# trace agents " << agents_.size() << " mid " << coordinator_.corral_mid.x << ' '
                << coordinator_.corral_mid.y << '\n';
    }
}

void Simulation::record(const Message& msg) {
    ++stats_.totals[static_cast<std::size_t>(msg.kind)];
    ++stats_.last_step[static_cast<std::size_t>(msg.kind)];
    if (trace_) *trace_ << encode(msg) << '\n';
}

void Simulation::step() {
    stats_.last_step.fill(0);
    const std::size_t n = agents_.size();
    std::vector<Message> delivered;
    delivered.swap(pending_);

    std::vector<MoveAction> actions(n, MoveAction::Skip);
    std::vector<std::vector<Message>> outboxes(n);
    results_.assign(n, {});
    for (std::size_t i = 0; i < n; ++i) {
        const int id = static_cast<int>(i);
        std::vector<Message> inbox;
        for (const Message& m : delivered) {
            if (m.recipient == id || m.recipient == kAllAgents) inbox.push_back(m);
        }
        const Percept percept = perceive(world_, map_, id);
        results_[i] = agent_step(agents_[i], percept, inbox, rewards_[i], map_, config_.agent);
        actions[i] = results_[i].action;
        outboxes[i] = results_[i].outbox;
    }

    const WorldState before = world_;
    world_ = step_world(world_, map_, actions, config_.cows);
    const double reward = compute_reward(before, world_, map_, config_.agent.reward_mode);
    rewards_.assign(n, reward);

    if (config_.transfer && world_.step % config_.fusion_period == 0) {
        for (std::size_t i = 0; i < n; ++i) outboxes[i].push_back(make_table_share(agents_[i], world_.step));
    }

    // Outboxes are already in (sender, emission) order.
    for (std::size_t i = 0; i < n; ++i) {
        for (Message& m : outboxes[i]) {
            record(m);
            if (m.recipient == kCoordinatorId) {
                for (Message& reply : handle_message(coordinator_, m)) {
                    record(reply);
                    pending_.push_back(std::move(reply));
                }
            } else {
                pending_.push_back(std::move(m));
            }
        }
    }
    if (trace_) *trace_ << "# coordinator-state " << state_digest(coordinator_) << '\n';
}

}  // namespace shepherd
