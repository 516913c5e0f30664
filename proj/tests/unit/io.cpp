#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <doctest.h>

#include "helpers.hpp"
#include "oemt/dynamics.hpp"
#include "oemt/io.hpp"
#include "oemt/scattering.hpp"

using namespace oemt;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("numbers round trip through their text form") {
    for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0}) CHECK(std::stod(format_number(x)) == x);
    CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-inf");
    CHECK(format_number(std::nan("")) == "nan");
}

TEST_CASE("csv table with sidecar") {
    CsvTable t({{"omega", "ω", "1", "detuning"}, {"label", "", "", "variant"}});
    t.add_row({0.5, std::string("matched")});
    t.add_row({-1.0, std::string("a,b")});
    CHECK_THROWS(t.add_row({1.0}));
    const std::string csv = t.to_csv();
    CHECK(csv.rfind("omega,label\n", 0) == 0);
    CHECK(csv.find("\"a,b\"") != std::string::npos);

    testing::TempDir dir("io");
    t.write(dir.path, "table", {{"task", "unit"}});
    CHECK(slurp(dir.path / "table.csv") == csv);
    const auto side = nlohmann::json::parse(slurp(dir.path / "table.columns.json"));
    CHECK(side["file"] == "table.csv");
    CHECK(side["columns"].size() == 2);
    CHECK(side["columns"][0]["name"] == "omega");
    CHECK(side["columns"][0]["unit"] == "1");
    CHECK(side["context"]["task"] == "unit");
}

TEST_CASE("trajectory table columns") {
    Trajectory tr;
    tr.t = {0.0, 1.0};
    tr.mean = {Eigen::VectorXd::Zero(2), Eigen::VectorXd::Ones(2)};
    tr.cov = {Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Identity(2, 2)};
    tr.output = {Eigen::VectorXcd::Zero(1), Eigen::VectorXcd::Zero(1)};
    const CsvTable t = trajectory_table(tr, "1/omega_m");
    CHECK(t.size() == 2);
    std::vector<std::string> names;
    for (const auto& c : t.columns()) names.push_back(c.name);
    CHECK(names.front() == "t");
    CHECK(std::find(names.begin(), names.end(), "mean_x1") != names.end());
    CHECK(std::find(names.begin(), names.end(), "V_x1_p1") != names.end());
    CHECK(std::find(names.begin(), names.end(), "V_p1_x1") == names.end());
}

}
