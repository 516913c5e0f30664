#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "json.hpp"
#include "oemt/model.hpp"

namespace oemt::cli {

enum class Task { spectrum, protocol, sweep, search, validate };

std::string_view to_string(Task task);
Task task_from_string(std::string_view name, const std::string& where = "/task");

struct ExperimentConfig {
    nlohmann::json raw;         // the document as read
    std::string name = "run";
    TransducerModel model;
    nlohmann::json model_source;  // preset name / overrides, echoed into metadata
    Task task = Task::validate;
    nlohmann::json params = nlohmann::json::object();  // the object under the task's key
    std::filesystem::path output;
    std::uint64_t seed = 0;
};

/// Model entry: a preset name, {"preset": name, "set": {param: value}}, or an
/// inline model object.
TransducerModel resolve_model(const nlohmann::json& j, const std::string& where = "/model");

ExperimentConfig parse_config(const nlohmann::json& doc);
/// Reads and parses a JSON file; syntax errors carry line/column.
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace oemt::cli
