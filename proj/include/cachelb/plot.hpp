#pragma once

#include <optional>
#include <string>

#include "cachelb/table.hpp"

#include <json.hpp>

namespace cachelb {

struct PlotSpec {
    std::string x;
    std::string y;
    std::optional<std::string> group;   // one series per distinct value
    std::optional<std::string> y_err;   // half-width of a symmetric error bar
    std::optional<std::string> order_by;  // vertex order within a series (default: x)
    bool x_log = false;
    bool y_log = false;
    std::string title;
    std::string x_label;
    std::string y_label;
    int width = 720;
    int height = 440;
};

PlotSpec parse_plot_spec(const nlohmann::json& j);
PlotSpec load_plot_spec(const std::string& path);

// Self-contained SVG line chart. Output depends only on the inputs.
// Throws std::invalid_argument for an empty table, unknown columns, or
// non-positive values on a log axis.
std::string plot(const Table& table, const PlotSpec& spec);

}  // namespace cachelb
