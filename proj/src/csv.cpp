#include "cbctl/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cbctl {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double CsvTable::number(std::size_t row, std::size_t col) const {
    const std::string& cell = rows.at(row).at(col);
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (cell.empty() || end != cell.c_str() + cell.size()) {
        throw std::runtime_error("CSV cell (" + std::to_string(row + 2) + ", " + std::to_string(col + 1) +
                                 ") is not a number: '" + cell + "'");
    }
    return v;
}

std::string CsvTable::to_string() const {
    std::ostringstream os;
    auto emit = [&os](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) os << ',';
            os << cells[i];
        }
        os << '\n';
    };
    emit(header);
    for (const auto& r : rows) {
        emit(r);
    }
    return os.str();
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    out << table.to_string();
    if (!out) {
        throw std::runtime_error("write failed for " + path.string());
    }
}

CsvTable parse_csv(const std::string& text) {
    CsvTable t;
    std::istringstream in(text);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) {
            cells.push_back(cell);
        }
        if (line.back() == ',') {
            cells.emplace_back();
        }
        if (first) {
            t.header = std::move(cells);
            first = false;
        } else {
            if (cells.size() != t.header.size()) {
                throw std::runtime_error("CSV row " + std::to_string(t.rows.size() + 2) + " has " +
                                         std::to_string(cells.size()) + " cells, header has " +
                                         std::to_string(t.header.size()));
            }
            t.rows.push_back(std::move(cells));
        }
    }
    if (first) {
        throw std::runtime_error("CSV input is empty");
    }
    return t;
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_csv(ss.str());
}

CsvTable series_table(const std::vector<Vector>& series, const std::string& prefix) {
    CsvTable t;
    t.header.push_back("k");
    const Eigen::Index d = series.empty() ? 0 : series.front().size();
    for (Eigen::Index i = 0; i < d; ++i) {
        t.header.push_back(prefix + "_" + std::to_string(i + 1));
    }
    for (std::size_t k = 0; k < series.size(); ++k) {
        std::vector<std::string> row{std::to_string(k)};
        for (Eigen::Index i = 0; i < series[k].size(); ++i) {
            row.push_back(format_double(series[k](i)));
        }
        t.add_row(std::move(row));
    }
    return t;
}

std::vector<Vector> series_from_table(const CsvTable& table) {
    std::vector<Vector> out;
    const std::size_t d = table.header.empty() ? 0 : table.header.size() - 1;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        Vector v(static_cast<Eigen::Index>(d));
        for (std::size_t i = 0; i < d; ++i) {
            v(static_cast<Eigen::Index>(i)) = table.number(r, i + 1);
        }
        out.push_back(std::move(v));
    }
    return out;
}

}  // namespace cbctl
