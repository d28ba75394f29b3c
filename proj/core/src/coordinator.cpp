#include "shepherd/coordinator.hpp"

#include <istream>
#include <sstream>

#include "shepherd/errors.hpp"
#include "shepherd/random.hpp"

namespace shepherd {

bool is_closer(Vec2 p1, Vec2 p2, Vec2 corral_mid) {
    return distance(p1, corral_mid) < distance(p2, corral_mid);
}

CoordinatorState::CoordinatorState(int agents, Vec2 mid)
    : agent_count(agents), corral_mid(mid), shared_this_round(static_cast<std::size_t>(agents), false) {
    if (agents < 1) throw ConfigError("coordinator: agent count must be positive");
}

std::vector<Message> handle_message(CoordinatorState& state, const Message& msg) {
    msg.validate();
    std::vector<Message> out;
    if (msg.sender < 0 || msg.sender >= state.agent_count) {
        throw ProtocolError("coordinator: message from unknown agent " + std::to_string(msg.sender));
    }
    switch (msg.kind) {
        case MessageKind::Coordinate: {
            if (state.counter1 >= state.agent_count) throw ProtocolError("coordinator: surplus coordinate message");
            const Cell pos = msg.as<CoordinatePayload>().position;
            ++state.counter1;
            if (!state.closer_position ||
                is_closer(Vec2{pos}, Vec2{*state.closer_position}, state.corral_mid)) {
                state.closer = msg.sender;
                state.closer_position = pos;
            }
            if (state.counter1 == state.agent_count && !state.closer_notified) {
                state.closer_notified = true;
                out.push_back(Message::closer_notify(msg.step, state.closer));
            }
            break;
        }
        case MessageKind::EntrancesReport:
            state.entrances = msg.as<EntrancesPayload>().entrances;
            out.push_back(Message::entrances_broadcast(msg.step, state.entrances));
            break;
        case MessageKind::QTableShare: {
            const auto sender = static_cast<std::size_t>(msg.sender);
            if (state.shared_this_round[sender]) {
                throw ProtocolError("coordinator: agent " + std::to_string(msg.sender) +
                                    " already shared this round");
            }
            state.shared_this_round[sender] = true;
            const QTable& table = msg.as<TableSharePayload>().table;
            state.staged[index_of(table.behavior())].push_back(table);
            if (++state.counter2 == state.agent_count) {
                std::vector<QTable> fused;
                for (auto& staged : state.staged) {
                    if (!staged.empty()) fused.push_back(fuse_tables(staged));
                    staged.clear();
                }
                state.counter2 = 0;
                state.shared_this_round.assign(state.shared_this_round.size(), false);
                ++state.broadcasts;
                out.push_back(Message::fused_broadcast(msg.step, std::move(fused)));
            }
            break;
        }
        default:
            throw ProtocolError("coordinator: cannot handle message kind " + std::string(to_string(msg.kind)));
    }
    return out;
}

std::string serialize_state(const CoordinatorState& s) {
    std::ostringstream out;
    out.precision(17);
    out << "agents " << s.agent_count << "\nmid " << s.corral_mid.x << ' ' << s.corral_mid.y
        << "\ncounters " << s.counter1 << ' ' << s.counter2 << "\ncloser " << s.closer;
    if (s.closer_position) out << ' ' << s.closer_position->x << ' ' << s.closer_position->y;
    out << "\nnotified " << s.closer_notified << "\nentrances " << s.entrances.size();
    for (Cell c : s.entrances) out << ' ' << c.x << ' ' << c.y;
    out << "\nshared";
    for (bool b : s.shared_this_round) out << ' ' << b;
    out << "\nbroadcasts " << s.broadcasts << '\n';
    for (const auto& staged : s.staged) {
        out << "staged " << staged.size() << '\n';
        write_qtables(out, staged);
    }
    return out.str();
}

std::string state_digest(const CoordinatorState& state) { return fnv_digest(serialize_state(state)); }

ReplayResult replay_trace(std::istream& in) {
    ReplayResult result;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line.front() == '#') {
            std::istringstream ss(line.substr(1));
            std::string tag;
            ss >> tag;
            if (tag == "trace") {
                std::string w1, w2;
                int n = 0;
                Vec2 mid;
                if (!(ss >> w1 >> n >> w2 >> mid.x >> mid.y) || w1 != "agents" || w2 != "mid") {
                    throw ProtocolError("replay: malformed trace header");
                }
                result.state = CoordinatorState(n, mid);
                have_header = true;
            } else if (tag == "coordinator-state") {
                std::string digest;
                ss >> digest;
                ++result.checkpoints;
                if (digest != state_digest(result.state)) ++result.mismatches;
            }
            continue;
        }
        if (!have_header) throw ProtocolError("replay: message before trace header");
        const Message msg = decode(line);
        if (msg.recipient != kCoordinatorId) continue;
        handle_message(result.state, msg);
        ++result.messages;
    }
    if (!have_header) throw ProtocolError("replay: missing trace header");
    return result;
}

}  // namespace shepherd
