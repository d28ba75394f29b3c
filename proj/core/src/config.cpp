#include "shepherd/config.hpp"

#include <charconv>
#include <istream>
#include <sstream>

#include "shepherd/errors.hpp"

namespace shepherd {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& value) {
    T out{};
    const char* first = value.data();
    const char* last = value.data() + value.size();
    std::from_chars_result r{};
    if constexpr (std::is_floating_point_v<T>) {
        // from_chars for doubles is not available on every toolchain.
        std::istringstream ss(value);
        ss >> out;
        if (!ss || !(ss >> std::ws).eof()) throw ConfigError(key + ": expected a number, got '" + value + "'");
        return out;
    } else {
        r = std::from_chars(first, last, out);
        if (r.ec != std::errc{} || r.ptr != last) throw ConfigError(key + ": expected an integer, got '" + value + "'");
        return out;
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "on" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "off" || value == "no") return false;
    throw ConfigError(key + ": expected a boolean, got '" + value + "'");
}

Rect parse_rect(const std::string& key, const std::string& value) {
    std::istringstream ss(value);
    Rect r;
    if (!(ss >> r.x_min >> r.y_min >> r.x_max >> r.y_max) || !(ss >> std::ws).eof())
        throw ConfigError(key + ": expected 'x1 y1 x2 y2', got '" + value + "'");
    return r;
}

void require(bool ok, const std::string& field, const std::string& rule) {
    if (!ok) throw ConfigError(field + ": " + rule);
}

std::string rect_text(const Rect& r) {
    return std::to_string(r.x_min) + ' ' + std::to_string(r.y_min) + ' ' + std::to_string(r.x_max) + ' ' +
           std::to_string(r.y_max);
}

std::string real_text(double v) {
    std::ostringstream ss;
    ss.precision(17);
    ss << v;
    return ss.str();
}

}  // namespace

void ScenarioConfig::validate() const {
    require(cows > 0, "cows", "must be positive");
    require(obstacles >= 0, "obstacles", "must be non-negative");
    require(agents > 0, "agents", "must be positive");
    require(side >= 5, "side", "must be at least 5");
    require(total_iterations > 0, "total_iterations", "must be positive");
    require(sample_every > 0, "sample_every", "must be positive");
    require(fusion_period >= 1, "fusion_period", "must be >= 1");
    require(proximity > 0, "proximity", "must be positive");
    require(learning_rate >= 0 && learning_rate <= 1, "learning_rate", "must be in [0, 1]");
    require(discount >= 0 && discount <= 1, "discount", "must be in [0, 1]");
    require(eps_start >= 0 && eps_start <= 1, "eps_start", "must be in [0, 1]");
    require(eps_min >= 0 && eps_min <= 1, "eps_min", "must be in [0, 1]");
    require(eps_horizon > 0, "eps_horizon", "must be positive");
    require(jumpstart_window > 0 && jumpstart_window <= 1, "jumpstart_window", "must be in (0, 1]");
    require(convergence_tolerance >= 0, "convergence_tolerance", "must be non-negative");
    require(convergence_window >= 1, "convergence_window", "must be positive");
    cow_model.validate();
    const AbstractionParams p{d, a, static_cast<double>(side)};
    require(d > 1.0 && d < p.diagonal(), "d", "must satisfy 1 < d < side*sqrt(2)");
    require(a > 1.0 && a < 180.0, "a", "must satisfy 1 < a < 180");
    const Rect k = corral_rect();
    require(k.valid() && k.x_min >= 1 && k.y_min >= 1 && k.x_max <= side - 2 && k.y_max <= side - 2, "corral",
            "must lie strictly inside the grid");
}

Rect ScenarioConfig::corral_rect() const {
    if (corral) return *corral;
    const int k = std::max(1, side / 5);
    const int lo = (side - k) / 2;
    return {lo, lo, lo + k - 1, lo + k - 1};
}

AgentConfig ScenarioConfig::agent_config() const {
    AgentConfig c;
    c.agent_count = agents;
    c.abstraction = {d, a, static_cast<double>(side)};
    c.learning.learning_rate = learning_rate;
    c.learning.discount = discount;
    c.learning.exploration = {eps_start, eps_min, eps_horizon};
    c.proximity_threshold = proximity;
    c.heuristics = heuristics;
    c.reward_mode = reward_mode;
    c.predictor = cow_model;
    return c;
}

std::map<std::string, std::string> parse_key_values(std::istream& in) {
    std::map<std::string, std::string> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        if (!out.emplace(key, value).second) throw ConfigError("config: duplicate key '" + key + "'");
    }
    return out;
}

void apply_setting(ScenarioConfig& c, const std::string& key, const std::string& v) {
    if (key == "cows") c.cows = parse_number<int>(key, v);
    else if (key == "obstacles") c.obstacles = parse_number<int>(key, v);
    else if (key == "agents") c.agents = parse_number<int>(key, v);
    else if (key == "side") c.side = parse_number<int>(key, v);
    else if (key == "d") c.d = parse_number<double>(key, v);
    else if (key == "a") c.a = parse_number<double>(key, v);
    else if (key == "transfer") c.transfer = parse_bool(key, v);
    else if (key == "heuristics") c.heuristics = parse_bool(key, v);
    else if (key == "total_iterations") c.total_iterations = parse_number<std::int64_t>(key, v);
    else if (key == "sample_every") c.sample_every = parse_number<std::int64_t>(key, v);
    else if (key == "master_seed") c.master_seed = parse_number<std::uint64_t>(key, v);
    else if (key == "corral") c.corral = parse_rect(key, v);
    else if (key == "fusion_period") c.fusion_period = parse_number<int>(key, v);
    else if (key == "proximity") c.proximity = parse_number<double>(key, v);
    else if (key == "learning_rate") c.learning_rate = parse_number<double>(key, v);
    else if (key == "discount") c.discount = parse_number<double>(key, v);
    else if (key == "eps_start") c.eps_start = parse_number<double>(key, v);
    else if (key == "eps_min") c.eps_min = parse_number<double>(key, v);
    else if (key == "eps_horizon") c.eps_horizon = parse_number<std::int64_t>(key, v);
    else if (key == "reward_mode") {
        if (v == "level") c.reward_mode = RewardMode::Level;
        else if (v == "delta") c.reward_mode = RewardMode::Delta;
        else throw ConfigError("reward_mode: expected 'level' or 'delta', got '" + v + "'");
    }
    else if (key == "jumpstart_window") c.jumpstart_window = parse_number<double>(key, v);
    else if (key == "convergence_tolerance") c.convergence_tolerance = parse_number<double>(key, v);
    else if (key == "convergence_window") c.convergence_window = parse_number<int>(key, v);
    else if (key == "cow_flee_radius") c.cow_model.flee_radius = parse_number<double>(key, v);
    else if (key == "cow_cohesion_radius") c.cow_model.cohesion_radius = parse_number<double>(key, v);
    else if (key == "cow_separation_radius") c.cow_model.separation_radius = parse_number<double>(key, v);
    else if (key == "cow_flee_weight") c.cow_model.flee_weight = parse_number<double>(key, v);
    else if (key == "cow_cohesion_weight") c.cow_model.cohesion_weight = parse_number<double>(key, v);
    else if (key == "cow_separation_weight") c.cow_model.separation_weight = parse_number<double>(key, v);
    else if (key == "cow_random_weight") c.cow_model.random_weight = parse_number<double>(key, v);
    else throw ConfigError("unknown scenario key '" + key + "'");
}

void apply_setting(TrialConfig& c, const std::string& key, const std::string& v) {
    if (key == "episodes") c.episodes = parse_number<int>(key, v);
    else if (key == "trials") c.trials = parse_number<int>(key, v);
    else if (key == "step_cap") c.step_cap = parse_number<int>(key, v);
    else if (key == "d") c.abstraction.distance_resolution = parse_number<double>(key, v);
    else if (key == "a") c.abstraction.angle_resolution = parse_number<double>(key, v);
    else if (key == "learning_rate") c.learning_rate = parse_number<double>(key, v);
    else if (key == "discount") c.discount = parse_number<double>(key, v);
    else if (key == "goal_reward") c.goal_reward = parse_number<double>(key, v);
    else if (key == "progress_reward") c.progress_reward = parse_number<double>(key, v);
    else if (key == "initial_q") c.initial_q = parse_number<double>(key, v);
    else if (key == "eps_start") c.eps_start = parse_number<double>(key, v);
    else if (key == "eps_end") c.eps_end = parse_number<double>(key, v);
    else if (key == "eps_episodes") c.eps_episodes = parse_number<int>(key, v);
    else if (key == "explore_hold") c.explore_hold = parse_number<int>(key, v);
    else if (key == "fusion") c.fusion = parse_bool(key, v);
    else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, v);
    else throw ConfigError("unknown goalsearch key '" + key + "'");
}

ScenarioConfig load_scenario_config(std::istream& in) {
    ScenarioConfig c;
    for (const auto& [k, v] : parse_key_values(in)) apply_setting(c, k, v);
    c.validate();
    return c;
}

TrialConfig load_trial_config(std::istream& in) {
    TrialConfig c;
    for (const auto& [k, v] : parse_key_values(in)) apply_setting(c, k, v);
    c.validate();
    return c;
}

std::string canonical_text(const ScenarioConfig& c) {
    std::ostringstream o;
    o << "cows=" << c.cows << "\nobstacles=" << c.obstacles << "\nagents=" << c.agents << "\nside=" << c.side
      << "\nd=" << real_text(c.d) << "\na=" << real_text(c.a) << "\ntransfer=" << c.transfer
      << "\nheuristics=" << c.heuristics << "\ntotal_iterations=" << c.total_iterations
      << "\nsample_every=" << c.sample_every << "\nmaster_seed=" << c.master_seed
      << "\ncorral=" << rect_text(c.corral_rect()) << "\nfusion_period=" << c.fusion_period
      << "\nproximity=" << real_text(c.proximity) << "\nlearning_rate=" << real_text(c.learning_rate)
      << "\ndiscount=" << real_text(c.discount) << "\neps_start=" << real_text(c.eps_start)
      << "\neps_min=" << real_text(c.eps_min) << "\neps_horizon=" << c.eps_horizon
      << "\nreward_mode=" << (c.reward_mode == RewardMode::Level ? "level" : "delta")
      << "\njumpstart_window=" << real_text(c.jumpstart_window)
      << "\nconvergence_tolerance=" << real_text(c.convergence_tolerance)
      << "\nconvergence_window=" << c.convergence_window
      << "\ncow_flee_radius=" << real_text(c.cow_model.flee_radius)
      << "\ncow_cohesion_radius=" << real_text(c.cow_model.cohesion_radius)
      << "\ncow_separation_radius=" << real_text(c.cow_model.separation_radius)
      << "\ncow_flee_weight=" << real_text(c.cow_model.flee_weight)
      << "\ncow_cohesion_weight=" << real_text(c.cow_model.cohesion_weight)
      << "\ncow_separation_weight=" << real_text(c.cow_model.separation_weight)
      << "\ncow_random_weight=" << real_text(c.cow_model.random_weight) << '\n';
    return o.str();
}

std::string canonical_text(const TrialConfig& c) {
    std::ostringstream o;
    o << "episodes=" << c.episodes << "\ntrials=" << c.trials << "\nstep_cap=" << c.step_cap
      << "\nd=" << real_text(c.abstraction.distance_resolution) << "\na=" << real_text(c.abstraction.angle_resolution)
      << "\nlearning_rate=" << real_text(c.learning_rate) << "\ndiscount=" << real_text(c.discount)
      << "\ngoal_reward=" << real_text(c.goal_reward) << "\nprogress_reward=" << real_text(c.progress_reward)
      << "\ninitial_q=" << real_text(c.initial_q) << "\neps_start=" << real_text(c.eps_start)
      << "\neps_end=" << real_text(c.eps_end) << "\neps_episodes=" << c.eps_episodes
      << "\nexplore_hold=" << c.explore_hold << "\nfusion=" << c.fusion << "\nseed=" << c.seed << '\n';
    return o.str();
}

}  // namespace shepherd
