#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "shepherd/config.hpp"
#include "shepherd/metrics.hpp"
#include "shepherd/simulation.hpp"

namespace shepherd {

std::string_view code_version();

/// Every field is either populated or explicitly absent (nullopt).
struct RunReport {
    double final_success = 0.0;
    std::int64_t convergence_iteration = 0;
    /// Absent when the early window holds fewer than two samples.
    std::optional<double> jumpstart;
    std::optional<double> transfer_rate;
    std::uint64_t seed = 0;
    std::string config_digest;
};

struct ScenarioResult {
    LearningCurve curve;
    RunReport report;
    MessageStats messages;
};

/// Initial map and world for a configuration; identical for both arms of a
/// comparison.
std::pair<GridMap, WorldState> build_scenario(const ScenarioConfig& config);

/// Runs the round loop for total_iterations steps, sampling success at
/// iteration 0 and every sample_every steps (and at the final step).
ScenarioResult run_scenario(const ScenarioConfig& config, std::ostream* trace = nullptr);

struct CompareResult {
    ScenarioResult with_transfer;
    ScenarioResult without_transfer;
    std::optional<double> transfer_rate;
};

/// Paired runs on the same map, initial world and cow stream; only transfer
/// gating differs.
CompareResult compare(const ScenarioConfig& config);

/// `# shepherd curve csv v1` then `iteration,success`.
void write_curve_csv(std::ostream& out, const LearningCurve& curve);
/// `# shepherd compare csv v1` then `iteration,with,without`.
void write_compare_csv(std::ostream& out, const LearningCurve& with, const LearningCurve& without);

/// key=value lines; `prefix` is prepended to every key.
void write_report(std::ostream& out, const RunReport& report, const std::string& prefix = "");
void write_compare_report(std::ostream& out, const CompareResult& result, const ScenarioConfig& config);

/// Writes `content` to `path` through a temporary file and a rename.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace shepherd
