#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "shepherd/geometry.hpp"
#include "shepherd/learning.hpp"

namespace shepherd {

enum class MessageKind : std::uint8_t {
    Coordinate,
    CloserNotify,
    EntrancesReport,
    EntrancesBroadcast,
    QTableShare,
    FusedTablesBroadcast,
    Cooperation,
};

std::string_view to_string(MessageKind kind);

inline constexpr int kCoordinatorId = -1;
inline constexpr int kAllAgents = -2;

struct CoordinatePayload {
    Cell position;
    friend bool operator==(const CoordinatePayload&, const CoordinatePayload&) = default;
};
struct CloserPayload {
    int agent = 0;
    friend bool operator==(const CloserPayload&, const CloserPayload&) = default;
};
struct EntrancesPayload {
    std::vector<Cell> entrances;
    friend bool operator==(const EntrancesPayload&, const EntrancesPayload&) = default;
};
struct TableSharePayload {
    QTable table;
    friend bool operator==(const TableSharePayload&, const TableSharePayload&) = default;
};
struct FusedTablesPayload {
    std::vector<QTable> tables;
    friend bool operator==(const FusedTablesPayload&, const FusedTablesPayload&) = default;
};
struct CooperationPayload {
    std::vector<int> invited;
    std::vector<Cell> herd;
    friend bool operator==(const CooperationPayload&, const CooperationPayload&) = default;
};

using Payload = std::variant<CoordinatePayload, CloserPayload, EntrancesPayload, TableSharePayload,
                             FusedTablesPayload, CooperationPayload>;

/// A coordinator/player protocol message. `recipient` is an agent id,
/// kCoordinatorId or kAllAgents.
struct Message {
    MessageKind kind = MessageKind::Coordinate;
    int sender = 0;
    int recipient = kCoordinatorId;
    std::int64_t step = 0;
    Payload payload;

    static Message coordinate(int sender, std::int64_t step, Cell position);
    static Message closer_notify(std::int64_t step, int agent);
    static Message entrances_report(int sender, std::int64_t step, std::vector<Cell> entrances);
    static Message entrances_broadcast(std::int64_t step, std::vector<Cell> entrances);
    static Message table_share(int sender, std::int64_t step, QTable table);
    static Message fused_broadcast(std::int64_t step, std::vector<QTable> tables);
    static Message cooperation(int sender, int recipient, std::int64_t step, std::vector<Cell> herd);

    /// Throws ProtocolError when the payload does not match the kind.
    void validate() const;

    template <class T>
    const T& as() const {
        return std::get<T>(payload);
    }

    friend bool operator==(const Message&, const Message&) = default;
};

/// Self-describing single-line encoding:
/// `<step> <sender> <recipient> <Kind> <payload...>`, doubles with 17
/// significant digits so decoding is lossless.
std::string encode(const Message& msg);
Message decode(std::string_view line);

}  // namespace shepherd
