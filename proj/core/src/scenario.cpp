#include "shepherd/scenario.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "shepherd/errors.hpp"
#include "shepherd/random.hpp"

#ifndef SHEPHERD_VERSION
#define SHEPHERD_VERSION "0.0.0"
#endif

namespace shepherd {

namespace {

std::string real_text(double v) {
    std::ostringstream ss;
    ss.precision(17);
    ss << v;
    return ss.str();
}

std::string optional_text(const std::optional<double>& v) { return v ? real_text(*v) : "absent"; }

RunReport make_report(const ScenarioConfig& config, const LearningCurve& curve) {
    RunReport r;
    r.final_success = curve.back().success;
    r.convergence_iteration =
        convergence_iteration(curve, config.convergence_tolerance, config.convergence_window);
    try {
        r.jumpstart = jumpstart(curve, config.jumpstart_window);
    } catch (const DomainError&) {
        r.jumpstart.reset();
    }
    r.seed = config.master_seed;
    r.config_digest = fnv_digest(canonical_text(config));
    return r;
}

ScenarioResult run_built(const ScenarioConfig& config, GridMap map, WorldState world, std::ostream* trace) {
    SimulationConfig sc;
    sc.agent = config.agent_config();
    sc.transfer = config.transfer;
    sc.fusion_period = config.fusion_period;
    sc.cows = config.cow_model;
    Simulation sim(std::move(map), std::move(world), sc, derive_seed(config.master_seed, "agents"));
    if (trace) sim.set_trace(trace);

    ScenarioResult result;
    result.curve.push_back({0, sim.success()});
    for (std::int64_t t = 1; t <= config.total_iterations; ++t) {
        sim.step();
        if (t % config.sample_every == 0 || t == config.total_iterations) result.curve.push_back({t, sim.success()});
    }
    validate_curve(result.curve);
    result.report = make_report(config, result.curve);
    result.messages = sim.stats();
    return result;
}

}  // namespace

std::string_view code_version() { return SHEPHERD_VERSION; }

std::pair<GridMap, WorldState> build_scenario(const ScenarioConfig& config) {
    config.validate();
    GridMap map = build_map(config.side, config.obstacles, config.corral_rect(),
                            derive_seed(config.master_seed, "map"), config.cows + config.agents);
    WorldState world = place_entities(map, config.cows, config.agents, derive_seed(config.master_seed, "place"),
                                      derive_seed(config.master_seed, "cows"));
    return {std::move(map), std::move(world)};
}

ScenarioResult run_scenario(const ScenarioConfig& config, std::ostream* trace) {
    auto [map, world] = build_scenario(config);
    return run_built(config, std::move(map), std::move(world), trace);
}

CompareResult compare(const ScenarioConfig& config) {
    ScenarioConfig with = config;
    with.transfer = true;
    ScenarioConfig without = config;
    without.transfer = false;
    CompareResult out;
    out.with_transfer = run_scenario(with);
    out.without_transfer = run_scenario(without);
    out.transfer_rate = transfer_rate(out.with_transfer.curve, out.without_transfer.curve);
    out.with_transfer.report.transfer_rate = out.transfer_rate;
    return out;
}

void write_curve_csv(std::ostream& out, const LearningCurve& curve) {
    out << "# shepherd curve csv v1\niteration,success\n";
    out.precision(17);
    for (const CurvePoint& p : curve) out << p.iteration << ',' << p.success << '\n';
}

void write_compare_csv(std::ostream& out, const LearningCurve& with, const LearningCurve& without) {
    if (with.size() != without.size()) throw DomainError("compare csv: curves differ in length");
    out << "# shepherd compare csv v1\niteration,with,without\n";
    out.precision(17);
    for (std::size_t i = 0; i < with.size(); ++i)
        out << with[i].iteration << ',' << with[i].success << ',' << without[i].success << '\n';
}

void write_report(std::ostream& out, const RunReport& r, const std::string& prefix) {
    out << prefix << "finalSuccess=" << real_text(r.final_success) << '\n'
        << prefix << "convergenceIteration=" << r.convergence_iteration << '\n'
        << prefix << "jumpstart=" << optional_text(r.jumpstart) << '\n'
        << prefix << "transferRate=" << optional_text(r.transfer_rate) << '\n'
        << prefix << "seed=" << r.seed << '\n'
        << prefix << "configDigest=" << r.config_digest << '\n';
}

void write_compare_report(std::ostream& out, const CompareResult& result, const ScenarioConfig& config) {
    out << "codeVersion=" << code_version() << '\n'
        << "configDigest=" << fnv_digest(canonical_text(config)) << '\n'
        << "seed=" << config.master_seed << '\n'
        << "transferRate=" << (result.transfer_rate ? real_text(*result.transfer_rate) : "no-baseline") << '\n'
        << "jumpstartWith=" << optional_text(result.with_transfer.report.jumpstart) << '\n'
        << "jumpstartWithout=" << optional_text(result.without_transfer.report.jumpstart) << '\n';
    write_report(out, result.with_transfer.report, "with.");
    write_report(out, result.without_transfer.report, "without.");
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::filesystem::path target(path);
    std::filesystem::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw ConfigError("cannot open '" + tmp.string() + "' for writing");
        f << content;
        if (!f.flush()) throw ConfigError("failed writing '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, target);
}

}  // namespace shepherd
