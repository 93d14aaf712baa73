#include "cachelb/plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace cachelb {

using nlohmann::json;

PlotSpec parse_plot_spec(const json& j) {
    PlotSpec s;
    try {
        s.x = j.at("x").get<std::string>();
        s.y = j.at("y").get<std::string>();
        if (j.contains("group")) s.group = j.at("group").get<std::string>();
        if (j.contains("y_err")) s.y_err = j.at("y_err").get<std::string>();
        if (j.contains("order_by")) s.order_by = j.at("order_by").get<std::string>();
        s.x_log = j.value("x_log", false);
        s.y_log = j.value("y_log", false);
        s.title = j.value("title", std::string());
        s.x_label = j.value("x_label", s.x);
        s.y_label = j.value("y_label", s.y);
        s.width = j.value("width", s.width);
        s.height = j.value("height", s.height);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("malformed plot spec: ") + e.what());
    }
    if (s.width < 320 || s.height < 240) throw std::invalid_argument("plot must be at least 320x240");
    return s;
}

PlotSpec load_plot_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open plot spec " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::invalid_argument("plot spec " + path + " is not valid JSON: " + e.what());
    }
    return parse_plot_spec(j);
}

namespace {

constexpr std::array<const char*, 10> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                               "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Axis {
    double lo = 0, hi = 1;
    bool log = false;

    double project(double v) const {
        const double a = log ? std::log10(v) : v;
        return (a - lo) / (hi - lo);
    }
};

Axis make_axis(double lo, double hi, bool log) {
    Axis a;
    a.log = log;
    if (log) {
        lo = std::log10(lo);
        hi = std::log10(hi);
    }
    if (hi - lo < 1e-12) {
        lo -= 0.5;
        hi += 0.5;
    }
    const double pad = 0.05 * (hi - lo);
    a.lo = lo - pad;
    a.hi = hi + pad;
    return a;
}

// Axis values at which to draw ticks.
std::vector<double> ticks(const Axis& a) {
    std::vector<double> out;
    if (a.log) {
        for (double e = std::ceil(a.lo); e <= a.hi; e += 1.0) out.push_back(std::pow(10.0, e));
        if (out.size() >= 2) return out;
        out.clear();
    }
    const double lo = a.log ? std::pow(10.0, a.lo) : a.lo;
    const double hi = a.log ? std::pow(10.0, a.hi) : a.hi;
    const double raw = (hi - lo) / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (m * mag >= raw) {
            step = m * mag;
            break;
        }
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * step; v += step)
        if (!a.log || v > 0) out.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
    return out;
}

struct Point {
    double x, y, err, order;
};

}  // namespace

std::string plot(const Table& table, const PlotSpec& spec) {
    if (table.empty()) throw std::invalid_argument("plot: table is empty");
    const auto xs = table.numeric(spec.x);
    const auto ys = table.numeric(spec.y);
    const auto os = spec.order_by ? table.numeric(*spec.order_by) : xs;
    std::vector<double> es(xs.size(), 0.0);
    if (spec.y_err) es = table.numeric(*spec.y_err);
    std::vector<std::string> keys(xs.size(), "");
    if (spec.group) keys = table.column(*spec.group);

    // Group order: numeric ascending when every key is numeric.
    std::vector<std::string> groups;
    for (const auto& k : keys)
        if (std::find(groups.begin(), groups.end(), k) == groups.end()) groups.push_back(k);
    bool numeric_keys = true;
    for (const auto& g : groups) {
        try {
            parse_double(g);
        } catch (const std::invalid_argument&) {
            numeric_keys = false;
        }
    }
    if (numeric_keys)
        std::stable_sort(groups.begin(), groups.end(),
                         [](const std::string& a, const std::string& b) { return parse_double(a) < parse_double(b); });
    else
        std::sort(groups.begin(), groups.end());

    std::map<std::string, std::vector<Point>> series;
    double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!std::isfinite(xs[i]) || !std::isfinite(ys[i]))
            throw std::invalid_argument("plot: non-finite value in row " + std::to_string(i + 1));
        const double lo = ys[i] - es[i], hi = ys[i] + es[i];
        if (spec.x_log && xs[i] <= 0) throw std::invalid_argument("plot: log x axis needs positive values");
        if (spec.y_log && ys[i] <= 0) throw std::invalid_argument("plot: log y axis needs positive values");
        xmin = std::min(xmin, xs[i]);
        xmax = std::max(xmax, xs[i]);
        ymin = std::min(ymin, spec.y_log ? std::max(lo, ys[i] * 0.5) : lo);
        ymax = std::max(ymax, hi);
        series[keys[i]].push_back({xs[i], ys[i], es[i], os[i]});
    }
    for (auto& [_, pts] : series)
        std::stable_sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) { return a.order < b.order; });

    const Axis ax = make_axis(xmin, xmax, spec.x_log);
    const Axis ay = make_axis(ymin, ymax, spec.y_log);

    const double left = 70, right = spec.group ? 160 : 30, top = 40, bottom = 60;
    const double pw = spec.width - left - right, ph = spec.height - top - bottom;
    auto px = [&](double v) { return left + ax.project(v) * pw; };
    auto py = [&](double v) {
        if (spec.y_log) v = std::max(v, std::pow(10.0, ay.lo));
        return top + (1.0 - ay.project(v)) * ph;
    };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width << "\" height=\"" << spec.height
        << "\" viewBox=\"0 0 " << spec.width << ' ' << spec.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!spec.title.empty())
        svg << "<text class=\"title\" x=\"" << fmt(left + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
            << escape(spec.title) << "</text>\n";
    svg << "<rect class=\"plot-area\" x=\"" << fmt(left) << "\" y=\"" << fmt(top) << "\" width=\"" << fmt(pw)
        << "\" height=\"" << fmt(ph) << "\" fill=\"none\" stroke=\"#333\"/>\n";

    svg << "<g class=\"axes\" stroke=\"#333\">\n";
    for (double t : ticks(ax)) {
        const double x = px(t);
        if (x < left - 0.01 || x > left + pw + 0.01) continue;
        svg << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(top + ph) << "\" x2=\"" << fmt(x) << "\" y2=\""
            << fmt(top + ph + 5) << "\"/><text x=\"" << fmt(x) << "\" y=\"" << fmt(top + ph + 18)
            << "\" text-anchor=\"middle\" stroke=\"none\">" << tick_label(t) << "</text>\n";
    }
    for (double t : ticks(ay)) {
        const double y = py(t);
        if (y < top - 0.01 || y > top + ph + 0.01) continue;
        svg << "<line x1=\"" << fmt(left - 5) << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(left) << "\" y2=\""
            << fmt(y) << "\"/><text x=\"" << fmt(left - 8) << "\" y=\"" << fmt(y + 4)
            << "\" text-anchor=\"end\" stroke=\"none\">" << tick_label(t) << "</text>\n";
    }
    svg << "</g>\n";
    svg << "<text class=\"x-label\" x=\"" << fmt(left + pw / 2) << "\" y=\"" << fmt(spec.height - 22)
        << "\" text-anchor=\"middle\">" << escape(spec.x_label) << (spec.x_log ? " (log)" : "") << "</text>\n";
    svg << "<text class=\"y-label\" transform=\"translate(18," << fmt(top + ph / 2)
        << ") rotate(-90)\" text-anchor=\"middle\">" << escape(spec.y_label) << (spec.y_log ? " (log)" : "")
        << "</text>\n";

    for (std::size_t g = 0; g < groups.size(); ++g) {
        const auto& pts = series[groups[g]];
        const char* color = kPalette[g % kPalette.size()];
        svg << "<g class=\"series\" data-group=\"" << escape(groups[g]) << "\">\n";
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < pts.size(); ++i)
            svg << (i ? " " : "") << fmt(px(pts[i].x)) << ',' << fmt(py(pts[i].y));
        svg << "\"/>\n";
        for (const Point& p : pts) {
            if (p.err > 0)
                svg << "<line class=\"error-bar\" stroke=\"" << color << "\" x1=\"" << fmt(px(p.x)) << "\" y1=\""
                    << fmt(py(p.y - p.err)) << "\" x2=\"" << fmt(px(p.x)) << "\" y2=\"" << fmt(py(p.y + p.err)) << "\"/>\n";
            svg << "<circle cx=\"" << fmt(px(p.x)) << "\" cy=\"" << fmt(py(p.y)) << "\" r=\"3\" fill=\"" << color
                << "\"/>\n";
        }
        svg << "</g>\n";
    }

    if (spec.group) {
        svg << "<g class=\"legend\">\n";
        const double lx = left + pw + 15;
        for (std::size_t g = 0; g < groups.size(); ++g) {
            const double ly = top + 10 + 18.0 * static_cast<double>(g);
            const char* color = kPalette[g % kPalette.size()];
            svg << "<g class=\"legend-entry\"><line x1=\"" << fmt(lx) << "\" y1=\"" << fmt(ly) << "\" x2=\""
                << fmt(lx + 20) << "\" y2=\"" << fmt(ly) << "\" stroke=\"" << color
                << "\" stroke-width=\"2\"/><text x=\"" << fmt(lx + 26) << "\" y=\"" << fmt(ly + 4) << "\">"
                << escape(*spec.group) << '=' << escape(groups[g]) << "</text></g>\n";
        }
        svg << "</g>\n";
    }
    if (spec.y_err)
        svg << "<text class=\"note\" x=\"" << fmt(left) << "\" y=\"" << fmt(spec.height - 6)
            << "\" font-size=\"10\" fill=\"#555\">error bars: +/- " << escape(*spec.y_err)
            << " (simulation estimate over replications)</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace cachelb
