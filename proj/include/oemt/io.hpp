#pragma once

// Deterministic CSV tables with JSON column sidecars.

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "oemt/dynamics.hpp"

namespace oemt {

struct Column {
    std::string name;
    std::string symbol;
    std::string unit;
    std::string description;
};

using Cell = std::variant<double, std::string>;

/// Shortest decimal form that reads back to the same double; inf/nan spelled out.
std::string format_number(double v);

class CsvTable {
public:
    CsvTable() = default;
    explicit CsvTable(std::vector<Column> columns) : columns_(std::move(columns)) {}

    const std::vector<Column>& columns() const { return columns_; }
    const std::vector<std::vector<Cell>>& rows() const { return rows_; }
    std::size_t size() const { return rows_.size(); }

    void add_row(std::vector<Cell> row);
    std::string to_csv() const;
    nlohmann::json sidecar(const std::string& file_name) const;

    /// Writes `<dir>/<stem>.csv` and `<dir>/<stem>.columns.json`.
    void write(const std::filesystem::path& dir, const std::string& stem, const nlohmann::json& extra = {}) const;

private:
    std::vector<Column> columns_;
    std::vector<std::vector<Cell>> rows_;
};

/// Columns t, mean entries, then the row-major upper triangle of the covariance.
CsvTable trajectory_table(const Trajectory& traj, const std::string& time_unit);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace oemt
