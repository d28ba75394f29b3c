#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <vector>

#include "shepherd/abstraction.hpp"
#include "shepherd/random.hpp"

namespace shepherd {

struct QKey {
    AbstractState state;
    int action = 0;

    friend constexpr auto operator<=>(const QKey&, const QKey&) = default;
};

/// One (state, action) cell of a Q-table.
struct QEntry {
    double q = 0.0;
    std::int64_t visits = 0;

    friend bool operator==(const QEntry&, const QEntry&) = default;
};

/// Sparse per-behavior Q-table over abstract states and the nine actions.
/// Missing entries read as (q = 0, visits = 0).
class QTable {
public:
    static constexpr int kActions = kMoveCount;

    QTable() = default;
    explicit QTable(Behavior behavior) : behavior_(behavior) {}

    Behavior behavior() const { return behavior_; }
    const std::map<QKey, QEntry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    const QEntry* find(const AbstractState& s, int action) const;
    QEntry& entry(const AbstractState& s, int action);
    void set(const QKey& key, const QEntry& value);

    double q(const AbstractState& s, int action) const;
    std::int64_t visits(const AbstractState& s, int action) const;
    /// Q-values of all nine actions at s, missing ones as 0.
    std::array<double, kActions> row(const AbstractState& s) const;
    /// max_a Q(s, a) with missing actions counted as 0.
    double max_q(const AbstractState& s) const;

    friend bool operator==(const QTable&, const QTable&) = default;

private:
    Behavior behavior_ = Behavior::SoloHerding;
    std::map<QKey, QEntry> entries_;
};

/// Linearly decaying epsilon: eps_start at index 0 down to eps_min at
/// `horizon`, constant afterwards.
struct ExplorationSchedule {
    double eps_start = 1.0;
    double eps_min = 0.05;
    std::int64_t horizon = 30000;

    double epsilon(std::int64_t index) const;
    friend bool operator==(const ExplorationSchedule&, const ExplorationSchedule&) = default;
};

struct LearningParams {
    double learning_rate = 0.1;
    double discount = 0.9;
    ExplorationSchedule exploration{};
    std::uint64_t seed = 0;

    void validate() const;
    friend bool operator==(const LearningParams&, const LearningParams&) = default;
};

/// Q + lr * (reward + discount * next_value - Q).
double q_learning_target(double q, double reward, double next_value, double learning_rate,
                         double discount);

/// Standard Q-learning update of (s, a); the bootstrap is max_a' Q(s', a')
/// from the same table. Visits of (s, a) increment even when the rate is 0.
void q_update(QTable& table, const AbstractState& s, int action, double reward,
              const AbstractState& next, const LearningParams& params);

/// Same update with an explicit bootstrap value (terminal transitions pass 0,
/// cross-table bootstraps pass the other table's max).
void q_update_with_value(QTable& table, const AbstractState& s, int action, double reward,
                         double next_value, const LearningParams& params);

/// Index of the largest value; ties resolve to the lowest index.
int greedy_index(std::span<const double> values);

struct ActionChoice {
    int action = 0;
    bool exploratory = false;
};

/// Epsilon-greedy over the nine actions with epsilon taken from the schedule
/// at `step_index`. Greedy ties resolve to the lowest action index.
ActionChoice select_action(const QTable& table, const AbstractState& s, std::int64_t step_index,
                           const LearningParams& params, RandomStream& rng);

/// Visit-weighted mean: sum(q_i * m_i) / sum(m_i), or 0 when all m_i are 0.
double fused_value(std::span<const double> q, std::span<const std::int64_t> visits);

/// Entry-wise visit-weighted fusion of same-behavior tables. Fused visits are
/// the visit sums. Throws ProtocolError on an empty list or mixed behaviors.
QTable fuse_tables(std::span<const QTable> tables);

/// Snapshot records `behavior s1 s2 s3 action q visits`, one per entry, with
/// 17 significant digits.
void write_qtables(std::ostream& out, std::span<const QTable> tables);
std::vector<QTable> read_qtables(std::istream& in);

}  // namespace shepherd
