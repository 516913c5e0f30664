#include <fstream>
#include <sstream>

#include <doctest.h>

#include "helpers.hpp"
#include "oemt/cli/app.hpp"
#include "oemt/cli/config.hpp"
#include "oemt/cli/tasks.hpp"
#include "oemt/errors.hpp"
#include "oemt/parallel.hpp"

using namespace oemt;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code = 0;
    std::string out, err;
};

Run invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "oemt");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path write_config(const fs::path& dir, const std::string& name, const json& j) {
    const fs::path p = dir / name;
    std::ofstream(p) << j.dump(2);
    return p;
}

json read_json(const fs::path& p) {
    std::ifstream in(p);
    return json::parse(in);
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("list presets and version") {
    const Run r = invoke({"--list-presets"});
    CHECK(r.code == 0);
    CHECK(r.out.find("dimensionless-fig4") != std::string::npos);
    CHECK(invoke({"--version"}).code == 0);
}

TEST_CASE("preset alone writes a validation bundle") {
    testing::TempDir dir("cli-preset");
    const fs::path out = dir.path / "bundle";
    const Run r = invoke({"--preset", "dimensionless-fig4", "--out", out.string()});
    REQUIRE(r.code == 0);
    for (const char* f : {"summary.json", "config.json", "metadata.json", "validation.json", "model.json"}) {
        CHECK(fs::exists(out / f));
    }
    CHECK(read_json(out / "metadata.json").contains("threads"));
    for (const auto& e : fs::directory_iterator(dir.path)) CHECK(e.path().filename().string().find(".partial") == std::string::npos);
}

TEST_CASE("spectrum task writes csv with sidecars") {
    testing::TempDir dir("cli-spectrum");
    const json cfg = {{"name", "spec"},
                      {"model", "dimensionless-fig4"},
                      {"task", "spectrum"},
                      {"spectrum", {{"omega", {{"min", -3}, {"max", 3}, {"points", 301}}}}}};
    const fs::path out = dir.path / "out";
    const Run r = invoke({write_config(dir.path, "c.json", cfg).string(), "--out", out.string()});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    CHECK(fs::exists(out / "spectrum.csv"));
    const json side = read_json(out / "spectrum.columns.json");
    CHECK(side["columns"][0]["name"] == "variant");
    CHECK(read_json(out / "summary.json").dump().find("halfwidth") != std::string::npos);
}

TEST_CASE("config errors exit with code 2 and a located message") {
    testing::TempDir dir("cli-bad");
    const json cfg = {{"model", "dimensionless-fig4"}, {"task", "spectrum"}, {"spectrum", {{"omgea", 1}}}};
    const Run r = invoke({write_config(dir.path, "c.json", cfg).string(), "--out", (dir.path / "o").string()});
    CHECK(r.code == cli::exit_config);
    const json e = json::parse(r.err);
    CHECK(e["error"]["type"] == "ConfigError");
    CHECK(e["error"]["location"].get<std::string>().find("/spectrum") == 0);
    CHECK_FALSE(fs::exists(dir.path / "o"));

    std::ofstream(dir.path / "broken.json") << "{\"model\": ";
    CHECK(invoke({(dir.path / "broken.json").string()}).code == cli::exit_config);
    CHECK(invoke({(dir.path / "missing.json").string()}).code == cli::exit_config);
    CHECK(invoke({"--preset", "nope"}).code == cli::exit_config);
    CHECK(invoke({}).code == cli::exit_config);
}

TEST_CASE("physics errors exit with code 3") {
    testing::TempDir dir("cli-physics");
    const json cfg = {{"model", {{"preset", "dimensionless-fig3"}, {"set", {{"g2", 0.2}}}}},
                      {"task", "protocol"},
                      {"protocol", {{"kind", "entangle_red_blue"}}}};
    const Run r = invoke({write_config(dir.path, "c.json", cfg).string(), "--out", (dir.path / "o").string()});
    CHECK(r.code == cli::exit_physics);
    CHECK(json::parse(r.err)["error"]["type"] == "PhysicsError");
}

TEST_CASE("protocol task bundle") {
    testing::TempDir dir("cli-protocol");
    const json cfg = {{"model", "dimensionless-fig3"},
                      {"task", "protocol"},
                      {"protocol", {{"kind", "double_swap"}, {"state", {{"alpha", 1}}}}}};
    const fs::path out = dir.path / "o";
    const Run r = invoke({write_config(dir.path, "c.json", cfg).string(), "--out", out.string()});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    CHECK(fs::exists(out / "trajectory.csv"));
    CHECK(fs::exists(out / "trajectory.columns.json"));
    CHECK(read_json(out / "metrics.json").dump().find("\"fidelity\"") != std::string::npos);
}

TEST_CASE("sweep output is independent of the thread count") {
    const json j = json::parse(R"({"evaluator": "protocol", "protocol": {"kind": "double_swap", "state": {"alpha": 1}},
        "axes": [{"name": "n_th_m", "values": [0, 10, 100]}, {"name": "g1", "values": [0.05, 0.1]}],
        "metrics": ["fidelity"]})");
    const cli::SweepPlan plan = cli::sweep_plan_from_json(j);
    const TransducerModel m = load_preset("dimensionless-fig3");
    set_threads(1);
    const auto a = cli::run_sweep(m, plan);
    set_threads(4);
    const auto b = cli::run_sweep(m, plan);
    CHECK(a.long_table.to_csv() == b.long_table.to_csv());
    CHECK(a.wide_table.size() == 6);
}

TEST_CASE("sweep records failing points without aborting") {
    const json j = json::parse(R"({"evaluator": "entangle_red_blue", "axes": [{"name": "g2", "values": [0.05, 0.2]}]})");
    const auto o = cli::run_sweep(load_preset("dimensionless-fig3"), cli::sweep_plan_from_json(j));
    CHECK(o.wide_table.size() == 2);
    CHECK(o.summary["errors"].size() == 1);
}

TEST_CASE("model resolution") {
    const TransducerModel m = cli::resolve_model(json::parse(R"({"preset": "dimensionless-fig3", "set": {"n_th_m": 5}})"));
    CHECK(m.mechanics().n_th == 5.0);
    CHECK_THROWS_AS(cli::resolve_model(json::parse(R"({"preset": "dimensionless-fig3", "set": {"bogus": 5}})")),
                    ConfigError);
    CHECK(cli::state_label(json::parse(R"({"alpha": 2, "r0": 0.4})")) == "alpha=2;r0=0.4");
}

TEST_CASE("config keys are strict") {
    CHECK_THROWS_AS(cli::parse_config(json::parse(R"({"model": "dimensionless-fig3", "task": "validate", "extra": 1})")),
                    ConfigError);
    CHECK_THROWS_AS(cli::parse_config(json::parse(R"({"model": "dimensionless-fig3", "task": "validate",
        "sweep": {"axes": []}})")), ConfigError);
    const auto c = cli::parse_config(json::parse(R"({"name": "x", "model": "dimensionless-fig3", "task": "validate"})"));
    CHECK(c.output == fs::path("results") / "x");
}

}
