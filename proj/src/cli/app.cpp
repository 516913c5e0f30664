#include "oemt/cli/app.hpp"

#include <chrono>
#include <ctime>
#include <iostream>
#include <optional>
#include <random>

#include "CLI11.hpp"
#include "oemt/cli/config.hpp"
#include "oemt/cli/tasks.hpp"
#include "oemt/errors.hpp"
#include "oemt/io.hpp"
#include "oemt/parallel.hpp"

#ifndef OEMT_VERSION
#define OEMT_VERSION "dev"
#endif

namespace oemt::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

int report(std::ostream& err, int code, const char* type, const std::string& message, const std::string& location = {}) {
    json j = {{"error", {{"type", type}, {"message", message}, {"exit_code", code}}}};
    if (!location.empty()) j["error"]["location"] = location;
    err << j.dump() << std::endl;
    return code;
}

// Writes into a sibling staging directory and renames it into place.
json write_bundle(const ExperimentConfig& cfg, const fs::path& out) {
    const fs::path target = fs::absolute(out);
    fs::create_directories(target.parent_path());
    std::random_device rd;
    const fs::path staging =
        target.parent_path() / ("." + target.filename().string() + ".partial-" + std::to_string(rd()));
    fs::create_directories(staging);
    try {
        const auto t0 = std::chrono::steady_clock::now();
        json summary = run_task(cfg, staging);
        const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        write_json(staging / "summary.json", summary);
        write_json(staging / "config.json", cfg.raw);
        json meta = {{"tool", "oemt"},
                     {"version", OEMT_VERSION},
                     {"task", std::string(to_string(cfg.task))},
                     {"name", cfg.name},
                     {"seed", cfg.seed},
                     {"timestamp", utc_timestamp()},
                     {"elapsed_seconds", elapsed},
                     {"threads", max_threads()},
                     {"model_source", cfg.model_source},
                     {"config", cfg.raw}};
        write_json(staging / "metadata.json", meta);
        if (fs::exists(target)) fs::remove_all(target);
        fs::rename(staging, target);
        return summary;
    } catch (...) {
        std::error_code ec;
        fs::remove_all(staging, ec);
        throw;
    }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Linearized optoelectromechanical transducer toolkit", "oemt"};
    std::string config_path;
    std::string out_dir;
    int jobs = 0;
    std::string preset;
    bool list = false;
    app.add_option("config", config_path, "experiment config (JSON)");
    app.add_option("--out", out_dir, "output directory (overrides the config)");
    app.add_option("--jobs", jobs, "worker threads (default: OpenMP default)")->check(CLI::NonNegativeNumber);
    app.add_option("--preset", preset, "use a catalog preset as the model; alone, validates and exports it");
    app.add_flag("--list-presets", list, "print the preset catalog and exit");
    app.set_version_flag("--version", OEMT_VERSION);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::CallForVersion& e) {
        out << OEMT_VERSION << "\n";
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        return report(err, exit_config, "ConfigError", e.what());
    }

    try {
        if (list) {
            for (const auto& name : preset_names()) out << name << "\n";
            return exit_ok;
        }
        if (jobs > 0) set_threads(jobs);

        ExperimentConfig cfg;
        if (!config_path.empty()) {
            cfg = load_config(config_path);
            if (!preset.empty()) {
                cfg.model = load_preset(preset);
                cfg.model_source = preset;
            }
        } else if (!preset.empty()) {
            cfg.model = load_preset(preset);
            cfg.model_source = preset;
            cfg.name = preset;
            cfg.task = Task::validate;
            cfg.raw = {{"name", preset}, {"model", preset}, {"task", "validate"}};
            cfg.output = fs::path("results") / preset;
        } else {
            return report(err, exit_config, "ConfigError", "no config given (pass a config path or --preset NAME)");
        }
        if (!out_dir.empty()) cfg.output = out_dir;

        const json summary = write_bundle(cfg, cfg.output);
        out << json({{"status", "ok"}, {"task", std::string(to_string(cfg.task))}, {"output", cfg.output.string()}})
                   .dump()
            << std::endl;
        return exit_ok;
    } catch (const ConfigError& e) {
        return report(err, exit_config, "ConfigError", e.what(), e.location());
    } catch (const PhysicsError& e) {
        return report(err, exit_physics, "PhysicsError", e.what());
    } catch (const NumericalError& e) {
        return report(err, exit_numerical, "NumericalError", e.what());
    } catch (const fs::filesystem_error& e) {
        return report(err, exit_config, "ConfigError", e.what());
    } catch (const std::exception& e) {
        return report(err, exit_internal, "InternalError", e.what());
    }
}

}  // namespace oemt::cli
