// cachelb: command-line front end for the cache-network load-balancing
// simulator.
//
//   cachelb run <spec.json> [--seed S] [--threads T] [--budget B] [--out DIR] [--timing]
//   cachelb plot <table.csv> <plotspec.json> [--out file.svg]
//   cachelb analyze voronoi|confgraph|goodness [flags]
//   cachelb selftest

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cachelb/analysis.hpp"
#include "cachelb/experiment.hpp"
#include "cachelb/plot.hpp"
#include "cachelb/selftest.hpp"

namespace fs = std::filesystem;
using namespace cachelb;

namespace {

struct Common {
    std::uint64_t seed = 1;
    unsigned threads = 0;
    std::optional<std::uint64_t> budget;
    std::string out;
};

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << content;
    if (!f) throw std::runtime_error("write failed for " + path.string());
}

fs::path resolve_output(const std::string& out_dir, const std::string& configured, const std::string& fallback) {
    const fs::path p = configured.empty() ? fs::path(fallback) : fs::path(configured);
    if (p.is_absolute() || out_dir.empty()) return p;
    return fs::path(out_dir) / p;
}

int cmd_run(const std::string& spec_path, const Common& c, bool seed_given, bool timing) {
    std::ifstream in(spec_path);
    if (!in) throw std::runtime_error("cannot open spec file " + spec_path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("spec file " + spec_path + " is not valid JSON: " + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("experiment spec must be a JSON object");
    if (seed_given) j["base_seed"] = c.seed;
    if (c.budget) j["budget"] = *c.budget;
    if (timing) j["record_runtime"] = true;
    const ExperimentSpec spec = parse_spec(j);

    const ExperimentResult result = run_experiment(spec, RunOptions{c.threads});
    if (result.conservation_violations != 0)
        throw std::runtime_error("conservation violated in " + std::to_string(result.conservation_violations) + " runs");

    std::ostringstream runs, agg;
    write_runs_csv(result, spec.record_runtime, runs);
    write_aggregate_csv(result, agg);
    const fs::path runs_path = resolve_output(c.out, spec.csv_path, spec.name + "_runs.csv");
    const fs::path agg_path = resolve_output(c.out, spec.aggregate_path, spec.name + "_aggregate.csv");
    write_file(runs_path, runs.str());
    write_file(agg_path, agg.str());
    std::cerr << "wrote " << result.runs.size() << " runs to " << runs_path.string() << " and "
              << result.aggregates.size() << " aggregate rows to " << agg_path.string() << '\n';

    if (spec.plot) {
        std::istringstream agg_in(agg.str());
        const std::string svg = plot(read_csv(agg_in), parse_plot_spec(*spec.plot));
        const fs::path svg_path = resolve_output(c.out, spec.svg_path, spec.name + ".svg");
        write_file(svg_path, svg);
        std::cerr << "wrote plot to " << svg_path.string() << '\n';
    }
    std::cout << agg.str();
    return 0;
}

int cmd_plot(const std::string& csv_path, const std::string& spec_path, const std::string& out) {
    const std::string svg = plot(read_csv_file(csv_path), load_plot_spec(spec_path));
    if (out.empty())
        std::cout << svg;
    else
        write_file(out, svg);
    return 0;
}

struct AnalyzeArgs {
    std::int64_t n = 0;
    int side = 0;
    bool grid = false;
    std::int64_t K = 0;
    std::int64_t M = 0;
    double gamma = 0.0;
    double alpha = 0.3;
    int r = 0;
    FileId file = 0;
    std::uint32_t seeds = 1;
};

TorusGeometry analysis_geometry(const AnalyzeArgs& a, std::int64_t default_n) {
    if (a.side > 0) return TorusGeometry(a.side, !a.grid);
    return TorusGeometry::from_nodes(a.n > 0 ? a.n : default_n, !a.grid);
}

PopularityProfile analysis_profile(std::uint32_t K, double gamma) {
    return make_profile(K, gamma > 0 ? PopularityKind::Zipf : PopularityKind::Uniform, gamma);
}

std::uint64_t placement_seed(std::uint64_t base, std::uint32_t s) {
    return derive_seed(derive_seed(base, stream::replication, s), stream::placement);
}

std::uint32_t positive_u32(std::int64_t v, const char* what) {
    if (v < 1 || v > UINT32_MAX) throw std::invalid_argument(std::string(what) + " must be a positive integer");
    return static_cast<std::uint32_t>(v);
}

int cmd_voronoi(const AnalyzeArgs& a, const Common& c) {
    const TorusGeometry geo = analysis_geometry(a, 2025);
    const std::uint32_t K = positive_u32(a.K > 0 ? a.K : 100, "--K");
    const std::uint32_t M = positive_u32(a.M > 0 ? a.M : 4, "--M");
    const auto profile = analysis_profile(K, a.gamma);
    const double bound = 8.0 * K * std::log(static_cast<double>(geo.size())) / M;
    if (a.file > K) throw std::invalid_argument("--file must lie in [1, K]");

    std::uint32_t within = 0;
    std::ostringstream csv;
    csv << "seed,file,cells,max_cell_size,largest_bbox_side,max_bbox_side\n";
    for (std::uint32_t s = 0; s < a.seeds; ++s) {
        const std::uint64_t seed = placement_seed(c.seed, s);
        const Placement p = place(geo.size(), M, profile, seed);
        Rng rng(seed, stream::voronoi);
        if (a.file > 0 && s == 0 && !c.out.empty()) {
            std::ostringstream t;
            write_csv(voronoi(a.file, p, geo, rng), geo, t);
            write_file(c.out, t.str());
        }
        std::vector<FileId> files;
        for (FileId f = 1; f <= K; ++f)
            if (!p.replicas(f).empty() && (a.file == 0 || f == a.file)) files.push_back(f);
        std::uint32_t worst = 0;
        for (const CellStats& st : max_cell_stats(p, geo, rng, files)) {
            worst = std::max(worst, st.max_cell_size);
            csv << s << ',' << st.file << ',' << st.cell_count << ',' << st.max_cell_size << ','
                << st.largest_bbox_side << ',' << st.max_bbox_side << '\n';
        }
        within += worst <= bound;
        std::cout << "seed " << s << ": max cell size " << worst << '\n';
    }
    std::cout << "bound 8*K*ln(n)/M = " << bound << "; seeds within bound: " << within << '/' << a.seeds << '\n';
    if (a.file == 0 && !c.out.empty()) write_file(c.out, csv.str());
    return 0;
}

int cmd_confgraph(const AnalyzeArgs& a, const Common& c) {
    const TorusGeometry geo = analysis_geometry(a, 4096);
    const double n = geo.size();
    const std::uint32_t K = positive_u32(a.K > 0 ? a.K : geo.size(), "--K");
    const std::uint32_t M =
        positive_u32(a.M > 0 ? a.M : static_cast<std::int64_t>(std::ceil(std::pow(n, 0.3) - 1e-9)), "--M");
    const int r = a.r > 0 ? a.r : static_cast<int>(std::ceil(std::pow(n, 0.35) - 1e-9));
    const auto profile = analysis_profile(K, a.gamma);
    const double ball = static_cast<double>(geo.ball_size(NodeId(0), 2 * r));

    std::cout << "n=" << geo.size() << " K=" << K << " M=" << M << " r=" << r << '\n';
    for (std::uint32_t s = 0; s < a.seeds; ++s) {
        const Placement p = place(geo.size(), M, profile, placement_seed(c.seed, s));
        const ConfigGraph g = build_config_graph(p, geo, r);
        const auto deg = g.degrees();
        const auto [lo, hi] = std::minmax_element(deg.begin(), deg.end());
        const double mean = std::accumulate(deg.begin(), deg.end(), 0.0) / n;
        double tbar = 0;
        for (std::uint32_t u = 0; u < geo.size(); ++u) tbar += distinct_count(NodeId(u), p);
        tbar /= n;
        std::cout << "seed " << s << ": e(H)=" << g.edge_count() << " degree min/mean/max=" << *lo << '/' << mean
                  << '/' << *hi << " predicted mean=" << tbar * tbar * ball / K << '\n';
        if (s == 0 && !c.out.empty()) {
            std::ostringstream h;
            write_degree_histogram_csv(g, h);
            write_file(c.out, h.str());
        }
    }
    return 0;
}

int cmd_goodness(const AnalyzeArgs& a, const Common& c) {
    const TorusGeometry geo = analysis_geometry(a, 4096);
    const std::uint32_t K = positive_u32(a.K > 0 ? a.K : geo.size(), "--K");
    const std::uint32_t M = positive_u32(
        a.M > 0 ? a.M : static_cast<std::int64_t>(std::llround(std::pow(static_cast<double>(geo.size()), a.alpha))),
        "--M");
    const auto profile = analysis_profile(K, a.gamma);
    std::uint32_t passed = 0;
    GoodnessReport last;
    for (std::uint32_t s = 0; s < a.seeds; ++s) {
        last = goodness_check(place(geo.size(), M, profile, placement_seed(c.seed, s)), a.alpha);
        passed += last.pass;
        if (!last.pass)
            std::cout << "seed " << s << ": " << last.sparse_nodes.size() << " sparse nodes, "
                      << last.heavy_pairs.size() << " heavy pairs\n";
    }
    std::cout << "n=" << geo.size() << " K=" << K << " M=" << M << " alpha=" << a.alpha << " delta=" << last.delta
              << " mu=" << last.mu << '\n';
    std::cout << "pass-rate " << passed << '/' << a.seeds << " = "
              << static_cast<double>(passed) / std::max<std::uint32_t>(a.seeds, 1) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Load balancing in a torus of caching servers: nearest-replica and proximity-aware two choices"};
    app.require_subcommand(1);
    Common common;

    auto* run_cmd = app.add_subcommand("run", "Run an experiment spec (JSON) and write CSV/SVG outputs");
    std::string spec_path;
    bool timing = false;
    run_cmd->add_option("spec", spec_path, "Experiment spec file")->required()->check(CLI::ExistingFile);
    auto* seed_opt = run_cmd->add_option("--seed", common.seed, "Override base_seed");
    run_cmd->add_option("--threads", common.threads, "Worker threads (default: CACHELB_THREADS or all cores)");
    run_cmd->add_option("--budget", common.budget, "Maximum number of runs");
    run_cmd->add_option("--out", common.out, "Output directory for relative output paths");
    run_cmd->add_flag("--timing", timing, "Record wall-clock runtime_ms in the runs CSV");

    auto* plot_cmd = app.add_subcommand("plot", "Render a CSV table as SVG");
    std::string csv_path, plot_spec_path, plot_out;
    plot_cmd->add_option("csv", csv_path, "Input CSV")->required()->check(CLI::ExistingFile);
    plot_cmd->add_option("plotspec", plot_spec_path, "Plot spec JSON")->required()->check(CLI::ExistingFile);
    plot_cmd->add_option("--out", plot_out, "SVG output path (default: stdout)");

    auto* analyze_cmd = app.add_subcommand("analyze", "Structural analyses of random placements");
    analyze_cmd->require_subcommand(1);
    AnalyzeArgs aa;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--n", aa.n, "Number of nodes (perfect square)");
        sub->add_option("--side", aa.side, "Torus side (alternative to --n)");
        sub->add_flag("--grid", aa.grid, "Bounded grid instead of torus");
        sub->add_option("--K", aa.K, "Library size");
        sub->add_option("--M", aa.M, "Cache slots per node");
        sub->add_option("--gamma", aa.gamma, "Zipf exponent (0 = uniform)")->check(CLI::NonNegativeNumber);
        sub->add_option("--seeds", aa.seeds, "Number of placements to sample")->check(CLI::PositiveNumber);
        sub->add_option("--seed", common.seed, "Base seed");
        sub->add_option("--threads", common.threads, "Unused; analyses are single-threaded");
        sub->add_option("--out", common.out, "CSV output path");
    };
    auto* vor = analyze_cmd->add_subcommand("voronoi", "Voronoi cell sizes per file");
    add_common(vor);
    vor->add_option("--file", aa.file, "Restrict to one file; with --out writes its tessellation");
    auto* cg = analyze_cmd->add_subcommand("confgraph", "Configuration graph degree statistics");
    add_common(cg);
    cg->add_option("--r", aa.r, "Two-choices radius r (edges join nodes within 2r)")->check(CLI::PositiveNumber);
    auto* good = analyze_cmd->add_subcommand("goodness", "(delta, mu)-goodness pass rate");
    add_common(good);
    good->add_option("--alpha", aa.alpha, "Exponent alpha in (0, 1/2)");

    auto* self_cmd = app.add_subcommand("selftest", "Run the built-in oracle checks");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) return cmd_run(spec_path, common, seed_opt->count() > 0, timing);
        if (plot_cmd->parsed()) return cmd_plot(csv_path, plot_spec_path, plot_out);
        if (vor->parsed()) return cmd_voronoi(aa, common);
        if (cg->parsed()) return cmd_confgraph(aa, common);
        if (good->parsed()) return cmd_goodness(aa, common);
        if (self_cmd->parsed()) return run_selftest(std::cout) ? 0 : 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
