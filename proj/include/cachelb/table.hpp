#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cachelb {

// Minimal CSV table: a header row plus string cells. No quoting support;
// the files this project writes never need it.
class Table {
public:
    Table() = default;
    Table(std::vector<std::string> columns, std::vector<std::vector<std::string>> rows);

    const std::vector<std::string>& columns() const noexcept { return columns_; }
    const std::vector<std::vector<std::string>>& rows() const noexcept { return rows_; }
    std::size_t size() const noexcept { return rows_.size(); }
    bool empty() const noexcept { return rows_.empty(); }

    bool has_column(const std::string& name) const;
    // Throws std::invalid_argument for unknown columns.
    std::size_t column_index(const std::string& name) const;
    std::vector<std::string> column(const std::string& name) const;
    // Throws std::invalid_argument when a cell is not a number.
    std::vector<double> numeric(const std::string& name) const;

    // Rows whose `name` cell equals `value` exactly.
    Table filter(const std::string& name, const std::string& value) const;

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<std::string>> rows_;
};

Table read_csv(std::istream& in);
Table read_csv_file(const std::string& path);

double parse_double(const std::string& cell);

}  // namespace cachelb
