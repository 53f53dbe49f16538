#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "cbctl/core_model.hpp"

namespace cbctl {

/// Comma-separated table with a header row. Cells are kept as text; numeric
/// cells are written with 17 significant digits so doubles survive a round trip.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> row) { rows.push_back(std::move(row)); }
    [[nodiscard]] double number(std::size_t row, std::size_t col) const;
    [[nodiscard]] std::string to_string() const;
};

std::string format_double(double v);

void write_csv(const std::filesystem::path& path, const CsvTable& table);
CsvTable read_csv(const std::filesystem::path& path);
CsvTable parse_csv(const std::string& text);

/// Columns k, <prefix>_1 ... <prefix>_d, one row per vector.
CsvTable series_table(const std::vector<Vector>& series, const std::string& prefix);

/// Inverse of series_table: drops the k column and returns the vectors.
std::vector<Vector> series_from_table(const CsvTable& table);

}  // namespace cbctl
