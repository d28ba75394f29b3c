#include "shepherd/learning.hpp"

#include <algorithm>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "shepherd/errors.hpp"

namespace shepherd {

const QEntry* QTable::find(const AbstractState& s, int action) const {
    const auto it = entries_.find(QKey{s, action});
    return it == entries_.end() ? nullptr : &it->second;
}

QEntry& QTable::entry(const AbstractState& s, int action) { return entries_[QKey{s, action}]; }

void QTable::set(const QKey& key, const QEntry& value) { entries_[key] = value; }

double QTable::q(const AbstractState& s, int action) const {
    const QEntry* e = find(s, action);
    return e ? e->q : 0.0;
}

std::int64_t QTable::visits(const AbstractState& s, int action) const {
    const QEntry* e = find(s, action);
    return e ? e->visits : 0;
}

std::array<double, QTable::kActions> QTable::row(const AbstractState& s) const {
    std::array<double, kActions> out{};
    for (auto it = entries_.lower_bound(QKey{s, 0}); it != entries_.end() && it->first.state == s; ++it) {
        out[static_cast<std::size_t>(it->first.action)] = it->second.q;
    }
    return out;
}

double QTable::max_q(const AbstractState& s) const {
    const auto values = row(s);
    return *std::max_element(values.begin(), values.end());
}

double ExplorationSchedule::epsilon(std::int64_t index) const {
    if (horizon <= 0 || index >= horizon) return eps_min;
    if (index <= 0) return eps_start;
    const double t = static_cast<double>(index) / static_cast<double>(horizon);
    return eps_start + (eps_min - eps_start) * t;
}

void LearningParams::validate() const {
    if (!(learning_rate > 0.0 && learning_rate <= 1.0)) {
        throw ConfigError("learning_rate must lie in (0, 1]");
    }
    if (!(discount >= 0.0 && discount < 1.0)) throw ConfigError("discount must lie in [0, 1)");
    const auto& e = exploration;
    if (!(e.eps_start >= 0.0 && e.eps_start <= 1.0 && e.eps_min >= 0.0 && e.eps_min <= 1.0)) {
        throw ConfigError("epsilon values must lie in [0, 1]");
    }
    if (e.horizon < 0) throw ConfigError("epsilon decay horizon must be nonnegative");
}

double q_learning_target(double q, double reward, double next_value, double learning_rate,
                         double discount) {
    return q + learning_rate * (reward + discount * next_value - q);
}

void q_update_with_value(QTable& table, const AbstractState& s, int action, double reward,
                         double next_value, const LearningParams& params) {
    QEntry& e = table.entry(s, action);
    e.q = q_learning_target(e.q, reward, next_value, params.learning_rate, params.discount);
    ++e.visits;
}

void q_update(QTable& table, const AbstractState& s, int action, double reward,
              const AbstractState& next, const LearningParams& params) {
    // Read the bootstrap before touching (s, a): s may equal next.
    const double next_value = table.max_q(next);
    q_update_with_value(table, s, action, reward, next_value, params);
}

int greedy_index(std::span<const double> values) {
    int best = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] > values[static_cast<std::size_t>(best)]) best = static_cast<int>(i);
    }
    return best;
}

ActionChoice select_action(const QTable& table, const AbstractState& s, std::int64_t step_index,
                           const LearningParams& params, RandomStream& rng) {
    const double eps = params.exploration.epsilon(step_index);
    // Always draw so the stream advances identically whatever epsilon is.
    const double coin = rng.uniform_real();
    if (coin < eps) return {rng.uniform_index(QTable::kActions), true};
    const auto values = table.row(s);
    return {greedy_index(values), false};
}

double fused_value(std::span<const double> q, std::span<const std::int64_t> visits) {
    double weighted = 0.0;
    std::int64_t total = 0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        weighted += q[i] * static_cast<double>(visits[i]);
        total += visits[i];
    }
    return total == 0 ? 0.0 : weighted / static_cast<double>(total);
}

QTable fuse_tables(std::span<const QTable> tables) {
    if (tables.empty()) throw ProtocolError("fuse_tables: no tables");
    const Behavior tag = tables.front().behavior();
    for (const QTable& t : tables) {
        if (t.behavior() != tag) throw ProtocolError("fuse_tables: mixed behavior tags");
    }
    // Accumulate sum(q*m) and sum(m) per key in table order.
    struct Acc {
        double weighted_q = 0.0;
        std::int64_t visits = 0;
    };
    std::map<QKey, Acc> acc;
    for (const QTable& t : tables) {
        for (const auto& [key, e] : t.entries()) {
            Acc& a = acc[key];
            const auto m = static_cast<double>(e.visits);
            a.weighted_q += e.q * m;
            a.visits += e.visits;
        }
    }
    QTable fused(tag);
    for (const auto& [key, a] : acc) {
        QEntry e;
        e.visits = a.visits;
        if (a.visits > 0) e.q = a.weighted_q / static_cast<double>(a.visits);
        fused.set(key, e);
    }
    return fused;
}

void write_qtables(std::ostream& out, std::span<const QTable> tables) {
    const auto old_precision = out.precision(17);
    for (const QTable& t : tables) {
        for (const auto& [key, e] : t.entries()) {
            out << to_string(t.behavior()) << ' ' << key.state.dist_target << ' '
                << key.state.dist_herd << ' ' << key.state.angle << ' ' << key.action << ' '
                << e.q << ' ' << e.visits << '\n';
        }
    }
    out.precision(old_precision);
}

std::vector<QTable> read_qtables(std::istream& in) {
    std::vector<QTable> tables;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream rec(line);
        std::string name;
        QKey key;
        QEntry e;
        if (!(rec >> name >> key.state.dist_target >> key.state.dist_herd >> key.state.angle >>
              key.action >> e.q >> e.visits)) {
            throw ConfigError("qtable snapshot: malformed record at line " + std::to_string(line_no));
        }
        const auto behavior = parse_behavior(name);
        if (!behavior) throw ConfigError("qtable snapshot: unknown behavior '" + name + "'");
        if (key.action < 0 || key.action >= QTable::kActions) {
            throw ConfigError("qtable snapshot: action out of range at line " + std::to_string(line_no));
        }
        std::string extra;
        if (rec >> extra) throw ConfigError("qtable snapshot: trailing fields at line " + std::to_string(line_no));
        auto it = std::find_if(tables.begin(), tables.end(),
                               [&](const QTable& t) { return t.behavior() == *behavior; });
        if (it == tables.end()) {
            tables.emplace_back(*behavior);
            it = std::prev(tables.end());
        }
        it->set(key, e);
    }
    return tables;
}

}  // namespace shepherd
