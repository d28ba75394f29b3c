#include "shepherd/message.hpp"

#include <array>
#include <sstream>

#include "shepherd/errors.hpp"

namespace shepherd {

namespace {

constexpr std::array<std::string_view, 7> kKindNames = {
    "Coordinate",  "CloserNotify",         "EntrancesReport", "EntrancesBroadcast",
    "QTableShare", "FusedTablesBroadcast", "Cooperation",
};

void write_cells(std::ostream& out, const std::vector<Cell>& cells) {
    out << ' ' << cells.size();
    for (Cell c : cells) out << ' ' << c.x << ' ' << c.y;
}

std::vector<Cell> read_cells(std::istream& in) {
    std::size_t n = 0;
    if (!(in >> n)) throw ProtocolError("decode: missing cell count");
    std::vector<Cell> cells(n);
    for (Cell& c : cells)
        if (!(in >> c.x >> c.y)) throw ProtocolError("decode: truncated cell list");
    return cells;
}

void write_table(std::ostream& out, const QTable& table) {
    out << ' ' << to_string(table.behavior()) << ' ' << table.size();
    for (const auto& [key, e] : table.entries()) {
        out << ' ' << key.state.dist_target << ' ' << key.state.dist_herd << ' ' << key.state.angle
            << ' ' << key.action << ' ' << e.q << ' ' << e.visits;
    }
}

QTable read_table(std::istream& in) {
    std::string name;
    std::size_t n = 0;
    if (!(in >> name >> n)) throw ProtocolError("decode: malformed table header");
    const auto behavior = parse_behavior(name);
    if (!behavior) throw ProtocolError("decode: unknown behavior '" + name + "'");
    QTable table(*behavior);
    for (std::size_t i = 0; i < n; ++i) {
        QKey key;
        QEntry e;
        if (!(in >> key.state.dist_target >> key.state.dist_herd >> key.state.angle >> key.action >>
              e.q >> e.visits)) {
            throw ProtocolError("decode: truncated table entry");
        }
        table.set(key, e);
    }
    return table;
}

}  // namespace

std::string_view to_string(MessageKind kind) { return kKindNames[static_cast<std::size_t>(kind)]; }

Message Message::coordinate(int sender, std::int64_t step, Cell position) {
    return {MessageKind::Coordinate, sender, kCoordinatorId, step, CoordinatePayload{position}};
}

Message Message::closer_notify(std::int64_t step, int agent) {
    return {MessageKind::CloserNotify, kCoordinatorId, agent, step, CloserPayload{agent}};
}

Message Message::entrances_report(int sender, std::int64_t step, std::vector<Cell> entrances) {
    return {MessageKind::EntrancesReport, sender, kCoordinatorId, step,
            EntrancesPayload{std::move(entrances)}};
}

Message Message::entrances_broadcast(std::int64_t step, std::vector<Cell> entrances) {
    return {MessageKind::EntrancesBroadcast, kCoordinatorId, kAllAgents, step,
            EntrancesPayload{std::move(entrances)}};
}

Message Message::table_share(int sender, std::int64_t step, QTable table) {
    return {MessageKind::QTableShare, sender, kCoordinatorId, step, TableSharePayload{std::move(table)}};
}

Message Message::fused_broadcast(std::int64_t step, std::vector<QTable> tables) {
    return {MessageKind::FusedTablesBroadcast, kCoordinatorId, kAllAgents, step,
            FusedTablesPayload{std::move(tables)}};
}

Message Message::cooperation(int sender, int recipient, std::int64_t step, std::vector<Cell> herd) {
    return {MessageKind::Cooperation, sender, recipient, step,
            CooperationPayload{{recipient}, std::move(herd)}};
}

void Message::validate() const {
    bool ok = false;
    switch (kind) {
        case MessageKind::Coordinate: ok = std::holds_alternative<CoordinatePayload>(payload); break;
        case MessageKind::CloserNotify: ok = std::holds_alternative<CloserPayload>(payload); break;
        case MessageKind::EntrancesReport:
        case MessageKind::EntrancesBroadcast:
            ok = std::holds_alternative<EntrancesPayload>(payload);
            break;
        case MessageKind::QTableShare: ok = std::holds_alternative<TableSharePayload>(payload); break;
        case MessageKind::FusedTablesBroadcast:
            ok = std::holds_alternative<FusedTablesPayload>(payload);
            break;
        case MessageKind::Cooperation: ok = std::holds_alternative<CooperationPayload>(payload); break;
    }
    if (!ok) throw ProtocolError("message payload does not match kind " + std::string(to_string(kind)));
}

std::string encode(const Message& msg) {
    msg.validate();
    std::ostringstream out;
    out.precision(17);
    out << msg.step << ' ' << msg.sender << ' ' << msg.recipient << ' ' << to_string(msg.kind);
    switch (msg.kind) {
        case MessageKind::Coordinate: {
            const Cell p = msg.as<CoordinatePayload>().position;
            out << ' ' << p.x << ' ' << p.y;
            break;
        }
        case MessageKind::CloserNotify: out << ' ' << msg.as<CloserPayload>().agent; break;
        case MessageKind::EntrancesReport:
        case MessageKind::EntrancesBroadcast:
            write_cells(out, msg.as<EntrancesPayload>().entrances);
            break;
        case MessageKind::QTableShare: write_table(out, msg.as<TableSharePayload>().table); break;
        case MessageKind::FusedTablesBroadcast: {
            const auto& tables = msg.as<FusedTablesPayload>().tables;
            out << ' ' << tables.size();
            for (const QTable& t : tables) write_table(out, t);
            break;
        }
        case MessageKind::Cooperation: {
            const auto& c = msg.as<CooperationPayload>();
            out << ' ' << c.invited.size();
            for (int id : c.invited) out << ' ' << id;
            write_cells(out, c.herd);
            break;
        }
    }
    return out.str();
}

Message decode(std::string_view line) {
    std::istringstream in{std::string(line)};
    Message msg;
    std::string kind;
    if (!(in >> msg.step >> msg.sender >> msg.recipient >> kind)) {
        throw ProtocolError("decode: malformed message header");
    }
    std::size_t k = 0;
    while (k < kKindNames.size() && kKindNames[k] != kind) ++k;
    if (k == kKindNames.size()) throw ProtocolError("decode: unknown message kind '" + kind + "'");
    msg.kind = static_cast<MessageKind>(k);
    switch (msg.kind) {
        case MessageKind::Coordinate: {
            Cell p;
            if (!(in >> p.x >> p.y)) throw ProtocolError("decode: malformed coordinate");
            msg.payload = CoordinatePayload{p};
            break;
        }
        case MessageKind::CloserNotify: {
            int agent = 0;
            if (!(in >> agent)) throw ProtocolError("decode: malformed closer notice");
            msg.payload = CloserPayload{agent};
            break;
        }
        case MessageKind::EntrancesReport:
        case MessageKind::EntrancesBroadcast: msg.payload = EntrancesPayload{read_cells(in)}; break;
        case MessageKind::QTableShare: msg.payload = TableSharePayload{read_table(in)}; break;
        case MessageKind::FusedTablesBroadcast: {
            std::size_t n = 0;
            if (!(in >> n)) throw ProtocolError("decode: malformed table count");
            FusedTablesPayload p;
            for (std::size_t i = 0; i < n; ++i) p.tables.push_back(read_table(in));
            msg.payload = std::move(p);
            break;
        }
        case MessageKind::Cooperation: {
            std::size_t n = 0;
            if (!(in >> n)) throw ProtocolError("decode: malformed invitation");
            CooperationPayload p;
            p.invited.resize(n);
            for (int& id : p.invited)
                if (!(in >> id)) throw ProtocolError("decode: truncated invitation");
            p.herd = read_cells(in);
            msg.payload = std::move(p);
            break;
        }
    }
    std::string extra;
    if (in >> extra) throw ProtocolError("decode: trailing data '" + extra + "'");
    return msg;
}

}  // namespace shepherd
