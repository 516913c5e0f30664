#include "oemt/cli/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "oemt/errors.hpp"
#include "oemt/protocols.hpp"
#include "oemt/search.hpp"

namespace oemt::cli {

using nlohmann::json;

namespace {

constexpr std::pair<Task, const char*> task_names[] = {
    {Task::spectrum, "spectrum"}, {Task::protocol, "protocol"}, {Task::sweep, "sweep"},
    {Task::search, "search"},     {Task::validate, "validate"},
};

}  // namespace

std::string_view to_string(Task task) {
    for (const auto& [t, n] : task_names) {
        if (t == task) return n;
    }
    return "unknown";
}

Task task_from_string(std::string_view name, const std::string& where) {
    for (const auto& [t, n] : task_names) {
        if (name == n) return t;
    }
    throw ConfigError("unknown task '" + std::string(name) + "' (expected spectrum, protocol, sweep, search, validate)",
                      where);
}

TransducerModel resolve_model(const json& j, const std::string& where) {
    if (j.is_string()) return load_preset(j.get<std::string>());
    if (!j.is_object()) throw ConfigError("model must be a preset name or an object", where);
    if (!j.contains("preset")) return model_from_json(j, where);

    for (const auto& [key, _] : j.items()) {
        if (key != "preset" && key != "set") {
            throw ConfigError("unknown key '" + key + "' next to 'preset' (only 'set' is allowed)", where + "/" + key);
        }
    }
    if (!j.at("preset").is_string()) throw ConfigError("'preset' must be a string", where + "/preset");
    TransducerModel m;
    try {
        m = load_preset(j.at("preset").get<std::string>());
    } catch (const ConfigError& e) {
        throw ConfigError(e.what(), where + "/preset");
    }
    if (j.contains("set")) {
        const json& set = j.at("set");
        if (!set.is_object()) throw ConfigError("'set' must be an object of parameter values", where + "/set");
        ProtocolSpec unused;
        for (const auto& [key, value] : set.items()) {
            if (!value.is_number()) throw ConfigError("expected a number", where + "/set/" + key);
            try {
                apply_parameter(m, unused, key, value.get<double>());
            } catch (const ConfigError& e) {
                throw ConfigError(e.what(), where + "/set/" + key);
            }
        }
    }
    return m;
}

ExperimentConfig parse_config(const json& doc) {
    if (!doc.is_object()) throw ConfigError("config must be a JSON object", "");
    static const char* known[] = {"name", "model", "task", "output", "seed",
                                  "spectrum", "protocol", "sweep", "search", "validate", "description"};
    for (const auto& [key, _] : doc.items()) {
        if (std::none_of(std::begin(known), std::end(known), [&](const char* k) { return key == k; })) {
            throw ConfigError("unknown top-level key '" + key + "'", "/" + key);
        }
    }
    ExperimentConfig c;
    c.raw = doc;
    if (doc.contains("name")) {
        if (!doc.at("name").is_string()) throw ConfigError("'name' must be a string", "/name");
        c.name = doc.at("name").get<std::string>();
    }
    if (!doc.contains("task")) throw ConfigError("missing 'task'", "/task");
    if (!doc.at("task").is_string()) throw ConfigError("'task' must be a string", "/task");
    c.task = task_from_string(doc.at("task").get<std::string>());

    for (const auto& [t, n] : task_names) {
        if (doc.contains(n)) {
            if (t != c.task) {
                throw ConfigError(std::string("block '") + n + "' does not match task '" +
                                      std::string(to_string(c.task)) + "' (one task per config)",
                                  std::string("/") + n);
            }
        }
    }
    const std::string key(to_string(c.task));
    if (doc.contains(key)) {
        if (!doc.at(key).is_object()) throw ConfigError("task parameters must be an object", "/" + key);
        c.params = doc.at(key);
    }

    if (!doc.contains("model")) throw ConfigError("missing 'model' (preset name or object)", "/model");
    c.model_source = doc.at("model");
    c.model = resolve_model(doc.at("model"));

    if (doc.contains("output")) {
        if (!doc.at("output").is_string()) throw ConfigError("'output' must be a path string", "/output");
        c.output = doc.at("output").get<std::string>();
    } else {
        c.output = std::filesystem::path("results") / c.name;
    }
    if (doc.contains("seed")) {
        if (!doc.at("seed").is_number_unsigned()) throw ConfigError("'seed' must be a non-negative integer", "/seed");
        c.seed = doc.at("seed").get<std::uint64_t>();
    }
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read config '" + path.string() + "'", path.string());
    std::stringstream ss;
    ss << f.rdbuf();
    json doc;
    try {
        doc = json::parse(ss.str());
    } catch (const json::parse_error& e) {
        // byte offset -> line/column
        const std::string text = ss.str();
        std::size_t line = 1, col = 1;
        for (std::size_t k = 0; k + 1 < e.byte && k < text.size(); ++k) {
            if (text[k] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ConfigError(std::string("JSON syntax error: ") + e.what(),
                          path.string() + ":" + std::to_string(line) + ":" + std::to_string(col));
    }
    return parse_config(doc);
}

}  // namespace oemt::cli
