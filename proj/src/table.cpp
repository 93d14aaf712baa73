#include "cachelb/table.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>

namespace cachelb {

Table::Table(std::vector<std::string> columns, std::vector<std::vector<std::string>> rows)
    : columns_(std::move(columns)), rows_(std::move(rows)) {
    for (const auto& r : rows_)
        if (r.size() != columns_.size()) throw std::invalid_argument("table row width does not match header");
}

bool Table::has_column(const std::string& name) const {
    return std::find(columns_.begin(), columns_.end(), name) != columns_.end();
}

std::size_t Table::column_index(const std::string& name) const {
    const auto it = std::find(columns_.begin(), columns_.end(), name);
    if (it == columns_.end()) throw std::invalid_argument("unknown column '" + name + "'");
    return static_cast<std::size_t>(it - columns_.begin());
}

std::vector<std::string> Table::column(const std::string& name) const {
    const auto i = column_index(name);
    std::vector<std::string> out;
    out.reserve(rows_.size());
    for (const auto& r : rows_) out.push_back(r[i]);
    return out;
}

double parse_double(const std::string& cell) {
    if (cell == "inf") return INFINITY;
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(cell, &used);
    } catch (const std::logic_error&) {
        used = 0;
    }
    if (used == 0 || used != cell.size()) throw std::invalid_argument("not a number: '" + cell + "'");
    return v;
}

std::vector<double> Table::numeric(const std::string& name) const {
    std::vector<double> out;
    for (const auto& s : column(name)) out.push_back(parse_double(s));
    return out;
}

Table Table::filter(const std::string& name, const std::string& value) const {
    const auto i = column_index(name);
    std::vector<std::vector<std::string>> kept;
    for (const auto& r : rows_)
        if (r[i] == value) kept.push_back(r);
    return Table(columns_, std::move(kept));
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

}  // namespace

Table read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("empty CSV input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto columns = split_line(line);
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cells = split_line(line);
        if (cells.size() != columns.size())
            throw std::invalid_argument("CSV row " + std::to_string(rows.size() + 2) + " has " +
                                        std::to_string(cells.size()) + " cells, header has " +
                                        std::to_string(columns.size()));
        rows.push_back(std::move(cells));
    }
    return Table(std::move(columns), std::move(rows));
}

Table read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open CSV file " + path);
    return read_csv(in);
}

}  // namespace cachelb
