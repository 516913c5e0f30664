#include "oemt/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "oemt/errors.hpp"

namespace oemt {

namespace {

std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + "\"";
}

const char* quadrature_name(int k) { return k % 2 == 0 ? "x" : "p"; }

}  // namespace

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) return "0";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void CsvTable::add_row(std::vector<Cell> row) {
    if (row.size() != columns_.size()) {
        throw std::invalid_argument("CSV row has " + std::to_string(row.size()) + " cells, expected " +
                                    std::to_string(columns_.size()));
    }
    rows_.push_back(std::move(row));
}

std::string CsvTable::to_csv() const {
    std::ostringstream os;
    for (std::size_t c = 0; c < columns_.size(); ++c) os << (c ? "," : "") << quote(columns_[c].name);
    os << '\n';
    for (const auto& row : rows_) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) os << ',';
            if (const double* d = std::get_if<double>(&row[c])) {
                os << format_number(*d);
            } else {
                os << quote(std::get<std::string>(row[c]));
            }
        }
        os << '\n';
    }
    return os.str();
}

nlohmann::json CsvTable::sidecar(const std::string& file_name) const {
    nlohmann::json cols = nlohmann::json::array();
    for (const auto& c : columns_) {
        cols.push_back({{"name", c.name}, {"symbol", c.symbol}, {"unit", c.unit}, {"description", c.description}});
    }
    return {{"file", file_name}, {"rows", rows_.size()}, {"columns", cols}};
}

void CsvTable::write(const std::filesystem::path& dir, const std::string& stem, const nlohmann::json& extra) const {
    write_text(dir / (stem + ".csv"), to_csv());
    nlohmann::json side = sidecar(stem + ".csv");
    if (!extra.is_null()) side["context"] = extra;
    write_json(dir / (stem + ".columns.json"), side);
}

CsvTable trajectory_table(const Trajectory& traj, const std::string& time_unit) {
    const int n = traj.modes();
    std::vector<Column> cols{{"t", "t", time_unit, "time"}};
    for (int k = 0; k < 2 * n; ++k) {
        const std::string name = std::string(quadrature_name(k)) + std::to_string(k / 2 + 1);
        cols.push_back({"mean_" + name, "<" + name + ">", "1", "first moment of quadrature " + name});
    }
    const bool cov = !traj.cov.empty();
    if (cov) {
        for (int i = 0; i < 2 * n; ++i) {
            for (int j = i; j < 2 * n; ++j) {
                const std::string a = std::string(quadrature_name(i)) + std::to_string(i / 2 + 1);
                const std::string b = std::string(quadrature_name(j)) + std::to_string(j / 2 + 1);
                cols.push_back({"V_" + a + "_" + b, "V(" + a + "," + b + ")", "1",
                                "symmetrized covariance, vacuum = 1/2"});
            }
        }
    }
    CsvTable table(std::move(cols));
    for (std::size_t k = 0; k < traj.size(); ++k) {
        std::vector<Cell> row{traj.t[k]};
        for (int i = 0; i < 2 * n; ++i) row.emplace_back(traj.mean[k](i));
        if (cov) {
            for (int i = 0; i < 2 * n; ++i) {
                for (int j = i; j < 2 * n; ++j) row.emplace_back(traj.cov[k](i, j));
            }
        }
        table.add_row(std::move(row));
    }
    return table;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) { write_text(path, j.dump(2) + "\n"); }

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open '" + path.string() + "' for writing");
    f << text;
    if (!f) throw ConfigError("failed writing '" + path.string() + "'");
}

}  // namespace oemt
