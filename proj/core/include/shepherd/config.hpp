#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>

#include "shepherd/agents.hpp"
#include "shepherd/goalsearch.hpp"
#include "shepherd/world.hpp"

namespace shepherd {

struct ScenarioConfig {
    int cows = 130;
    int obstacles = 160;
    int agents = 6;
    int side = 100;
    double d = 10.0;
    double a = 5.0;
    bool transfer = true;
    bool heuristics = false;
    std::int64_t total_iterations = 50000;
    std::int64_t sample_every = 50;
    std::uint64_t master_seed = 1;

    /// Corral rectangle; when absent a centred square of side max(1, side/5).
    std::optional<Rect> corral;
    int fusion_period = 1;
    double proximity = 3.0;
    double learning_rate = 0.1;
    double discount = 0.9;
    double eps_start = 1.0;
    double eps_min = 0.05;
    std::int64_t eps_horizon = 30000;
    RewardMode reward_mode = RewardMode::Level;
    double jumpstart_window = 0.05;
    double convergence_tolerance = 2.0;
    int convergence_window = 20;
    CowParams cow_model;

    /// Throws ConfigError naming the offending field.
    void validate() const;
    Rect corral_rect() const;
    AgentConfig agent_config() const;
};

/// Flat `key = value` lines; `#` starts a comment line. Throws ConfigError on
/// malformed lines and duplicate keys.
std::map<std::string, std::string> parse_key_values(std::istream& in);

/// Applies one key. Throws ConfigError on unknown keys and bad values.
void apply_setting(ScenarioConfig& config, const std::string& key, const std::string& value);
void apply_setting(TrialConfig& config, const std::string& key, const std::string& value);

ScenarioConfig load_scenario_config(std::istream& in);
TrialConfig load_trial_config(std::istream& in);

/// Canonical `key=value` listing of every field, in fixed order.
std::string canonical_text(const ScenarioConfig& config);
std::string canonical_text(const TrialConfig& config);

}  // namespace shepherd
