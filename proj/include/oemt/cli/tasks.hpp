#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "oemt/cli/config.hpp"
#include "oemt/io.hpp"
#include "oemt/protocols.hpp"

namespace oemt::cli {

using MetricList = std::vector<std::pair<std::string, double>>;

struct SweepAxis {
    std::string name;
    std::vector<nlohmann::json> values;
};

struct SweepPlan {
    /// A protocol kind, "protocol" (kind from the protocol block or axis),
    /// "precool_comparison", or "conversion".
    std::string evaluator = "protocol";
    ProtocolSpec protocol;
    std::vector<SweepAxis> axes;
    std::vector<std::string> metrics;  // empty keeps every metric
};

std::vector<std::string> sweep_axis_names();
std::vector<std::string> sweep_evaluators();
SweepPlan sweep_plan_from_json(const nlohmann::json& j, const std::string& where = "/sweep");

/// Metrics of one sweep point (without the leading "ok" flag).
MetricList evaluate_point(const std::string& evaluator, const TransducerModel& model, const ProtocolSpec& spec);

struct SweepOutput {
    CsvTable long_table;
    CsvTable wide_table;
    nlohmann::json summary;
};
SweepOutput run_sweep(const TransducerModel& model, const SweepPlan& plan);

/// Short label such as "alpha=2;r0=0.4" for a state axis value.
std::string state_label(const nlohmann::json& state);

/// Runs the configured task and writes its files into `dir`. Returns a
/// summary object that the caller stores as summary.json.
nlohmann::json run_task(const ExperimentConfig& config, const std::filesystem::path& dir);

}  // namespace oemt::cli
