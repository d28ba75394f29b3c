#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "shepherd/config.hpp"
#include "shepherd/coordinator.hpp"
#include "shepherd/errors.hpp"
#include "shepherd/goalsearch.hpp"
#include "shepherd/scenario.hpp"
#include "shepherd/validate.hpp"

namespace {

using namespace shepherd;

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    return in;
}

std::pair<std::string, std::string> split_override(const std::string& kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + kv + "' is not key=value");
    return {kv.substr(0, eq), kv.substr(eq + 1)};
}

template <class Config>
void apply_overrides(Config& config, const std::vector<std::string>& overrides) {
    for (const auto& kv : overrides) {
        const auto [k, v] = split_override(kv);
        apply_setting(config, k, v);
    }
}

ScenarioConfig scenario_from(const std::string& path, const std::vector<std::string>& overrides) {
    ScenarioConfig config;
    if (!path.empty()) {
        auto in = open_input(path);
        for (const auto& [k, v] : parse_key_values(in)) apply_setting(config, k, v);
    }
    apply_overrides(config, overrides);
    config.validate();
    return config;
}

void emit(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
    } else {
        write_file_atomic(path, content);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cooperative herding Q-learning simulator"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(code_version()));

    std::string config_path;
    std::vector<std::string> overrides;
    std::string csv_path;
    std::string report_path;
    std::string trace_path;
    std::string map_path;

    auto* run = app.add_subcommand("run", "Run one scenario");
    run->add_option("-c,--config", config_path, "Scenario config file")->check(CLI::ExistingFile);
    run->add_option("-s,--set", overrides, "Override a config key (key=value)");
    run->add_option("--csv", csv_path, "Curve CSV output ('-' for stdout)");
    run->add_option("--report", report_path, "Report output");
    run->add_option("--trace", trace_path, "Message trace output");

    auto* cmp = app.add_subcommand("compare", "Paired runs with and without transfer");
    cmp->add_option("-c,--config", config_path, "Scenario config file")->check(CLI::ExistingFile);
    cmp->add_option("-s,--set", overrides, "Override a config key (key=value)");
    cmp->add_option("--csv", csv_path, "Paired curve CSV output");
    cmp->add_option("--report", report_path, "Report output");

    auto* gs = app.add_subcommand("goalsearch", "Cooperative goal-search benchmark");
    gs->add_option("-c,--config", config_path, "Trial config file")->check(CLI::ExistingFile);
    gs->add_option("-m,--map", map_path, "Goal map file (default: built-in layout)")->check(CLI::ExistingFile);
    gs->add_option("-s,--set", overrides, "Override a config key (key=value)");
    gs->add_option("--csv", csv_path, "Curve CSV output");
    gs->add_option("--report", report_path, "Report output");

    auto* rep = app.add_subcommand("replay", "Replay a message trace through the coordinator");
    rep->add_option("trace", trace_path, "Trace file")->required()->check(CLI::ExistingFile);

    auto* val = app.add_subcommand("validate", "Run the invariant suites");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            const ScenarioConfig config = scenario_from(config_path, overrides);
            std::ofstream trace;
            if (!trace_path.empty()) {
                trace.open(trace_path);
                if (!trace) throw ConfigError("cannot open '" + trace_path + "'");
            }
            const ScenarioResult result = run_scenario(config, trace_path.empty() ? nullptr : &trace);
            std::ostringstream csv;
            write_curve_csv(csv, result.curve);
            std::ostringstream report;
            report << "codeVersion=" << code_version() << '\n';
            write_report(report, result.report);
            emit(csv_path.empty() ? "-" : csv_path, csv.str());
            if (!report_path.empty()) emit(report_path, report.str());
            else std::cerr << report.str();
        } else if (cmp->parsed()) {
            const ScenarioConfig config = scenario_from(config_path, overrides);
            const CompareResult result = compare(config);
            std::ostringstream csv;
            write_compare_csv(csv, result.with_transfer.curve, result.without_transfer.curve);
            std::ostringstream report;
            write_compare_report(report, result, config);
            emit(csv_path.empty() ? "-" : csv_path, csv.str());
            if (!report_path.empty()) emit(report_path, report.str());
            else std::cerr << report.str();
        } else if (gs->parsed()) {
            TrialConfig config;
            if (!config_path.empty()) {
                auto in = open_input(config_path);
                for (const auto& [k, v] : parse_key_values(in)) apply_setting(config, k, v);
            }
            apply_overrides(config, overrides);
            config.validate();
            GoalWorld world = canonical_goal_world();
            if (!map_path.empty()) {
                auto in = open_input(map_path);
                world = read_goal_world(in);
            }
            const GoalSearchResult result = run_goalsearch_experiment(world, config);
            std::ostringstream csv;
            write_goalsearch_csv(csv, result);
            std::ostringstream report;
            report.precision(17);
            report << "codeVersion=" << code_version() << "\nconfigDigest=" << fnv_digest(canonical_text(config))
                   << "\nseed=" << config.seed << '\n';
            for (int e : kReportedEpisodes) {
                if (e > result.episodes) continue;
                for (int a = 1; a <= kGoalAgents; ++a)
                    report << "agent" << a << ".episode" << e << '=' << result.at(a, e) << '\n';
            }
            emit(csv_path.empty() ? "-" : csv_path, csv.str());
            if (!report_path.empty()) emit(report_path, report.str());
            else std::cerr << report.str();
        } else if (rep->parsed()) {
            auto in = open_input(trace_path);
            const ReplayResult r = replay_trace(in);
            std::cout << "messages=" << r.messages << "\ncheckpoints=" << r.checkpoints
                      << "\nmismatches=" << r.mismatches << "\nstate=" << state_digest(r.state) << '\n';
            return r.mismatches == 0 ? 0 : 1;
        } else if (val->parsed()) {
            return run_validation(std::cout) == 0 ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
