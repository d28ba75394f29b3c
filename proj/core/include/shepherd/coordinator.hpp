#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "shepherd/learning.hpp"
#include "shepherd/message.hpp"

namespace shepherd {

/// True iff p1 is strictly closer to the corral centre than p2.
bool is_closer(Vec2 p1, Vec2 p2, Vec2 corral_mid);

/// The internal analyzer agent: elects the detector, relays entrances and
/// fuses the per-behavior tables shared each round.
struct CoordinatorState {
    int agent_count = 1;
    Vec2 corral_mid{};
    int counter1 = 0;
    int counter2 = 0;
    int closer = 0;
    std::optional<Cell> closer_position;
    bool closer_notified = false;
    std::vector<Cell> entrances;
    std::vector<bool> shared_this_round;
    std::array<std::vector<QTable>, kBehaviorCount> staged;
    std::int64_t broadcasts = 0;

    CoordinatorState() = default;
    CoordinatorState(int agent_count, Vec2 corral_mid);

    friend bool operator==(const CoordinatorState&, const CoordinatorState&) = default;
};

/// Processes one message addressed to the coordinator and returns the
/// messages it emits. Throws ProtocolError on kinds the coordinator does not
/// accept and on a second share from the same agent within a round.
std::vector<Message> handle_message(CoordinatorState& state, const Message& msg);

/// Canonical text form of the full state (tables at 17 digits).
std::string serialize_state(const CoordinatorState& state);
/// 64-bit FNV-1a digest of serialize_state, as 16 hex digits.
std::string state_digest(const CoordinatorState& state);

/// Trace format: a `# trace agents <N> mid <x> <y>` header, encoded messages
/// one per line and `# coordinator-state <digest>` checkpoints.
struct ReplayResult {
    CoordinatorState state;
    std::int64_t messages = 0;
    std::int64_t checkpoints = 0;
    std::int64_t mismatches = 0;
};

/// Feeds every coordinator-bound message of a trace through handle_message
/// and compares each checkpoint with the replayed state.
ReplayResult replay_trace(std::istream& in);

}  // namespace shepherd
