#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "cachelb/analysis.hpp"
#include "cachelb/experiment.hpp"
#include "cachelb/fit.hpp"
#include "cachelb/selftest.hpp"

namespace py = pybind11;
using namespace cachelb;

namespace {

std::vector<std::uint32_t> indices(std::span<const NodeId> nodes) {
    std::vector<std::uint32_t> out;
    out.reserve(nodes.size());
    for (NodeId v : nodes) out.push_back(v.index);
    return out;
}

NodeId checked(const TorusGeometry& geo, std::uint32_t u) {
    if (u >= geo.size()) throw py::index_error("node index out of range");
    return NodeId(u);
}

NodeId checked(const Placement& p, std::uint32_t u) {
    if (u >= p.node_count()) throw py::index_error("node index out of range");
    return NodeId(u);
}

FileId checked_file(const Placement& p, FileId f) {
    if (f < 1 || f > p.library_size()) throw py::index_error("file id outside [1, K]");
    return f;
}

nlohmann::json to_json(const py::handle& obj) {
    auto json_mod = py::module_::import("json");
    return nlohmann::json::parse(json_mod.attr("dumps")(obj).cast<std::string>());
}

py::dict aggregate_dict(const AggregateRow& a) {
    py::dict d;
    d["strategy"] = to_string(a.config.strategy.kind);
    d["n"] = a.config.n;
    d["K"] = a.config.K;
    d["M"] = a.config.M;
    d["r"] = format_radius(a.config.strategy);
    d["gamma"] = a.config.gamma;
    d["runs"] = a.runs;
    d["mean_max_load"] = a.mean_max_load;
    d["se_max_load"] = a.se_max_load;
    d["mean_comm_cost"] = a.mean_comm_cost;
    d["se_comm_cost"] = a.se_comm_cost;
    d["mean_fallbacks"] = a.mean_fallbacks;
    d["mean_rejected"] = a.mean_rejected;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Load balancing in a torus of caching servers (C++ core)";

    py::class_<TorusGeometry>(m, "TorusGeometry")
        .def(py::init<int, bool>(), py::arg("side"), py::arg("wrap") = true)
        .def_static("from_nodes", &TorusGeometry::from_nodes, py::arg("n"), py::arg("wrap") = true)
        .def_property_readonly("side", &TorusGeometry::side)
        .def_property_readonly("wrap", &TorusGeometry::wrap)
        .def_property_readonly("size", &TorusGeometry::size)
        .def("coord", [](const TorusGeometry& g, std::uint32_t u) {
            const Coord c = g.coord(checked(g, u));
            return py::make_tuple(c.x, c.y);
        })
        .def("node", [](const TorusGeometry& g, int x, int y) {
            if (x < 0 || y < 0 || x >= g.side() || y >= g.side()) throw py::index_error("coordinate out of range");
            return g.node(x, y).index;
        })
        .def("distance", [](const TorusGeometry& g, std::uint32_t u, std::uint32_t v) {
            return g.distance(checked(g, u), checked(g, v));
        })
        .def("ball", [](const TorusGeometry& g, std::uint32_t u, int r) {
            if (r < 0) throw py::value_error("radius must be >= 0");
            return indices(g.ball(checked(g, u), r));
        })
        .def("bfs_distances", [](const TorusGeometry& g, std::uint32_t u) { return bfs_distance_oracle(checked(g, u), g); });

    py::class_<PopularityProfile>(m, "PopularityProfile")
        .def_property_readonly("K", &PopularityProfile::library_size)
        .def_property_readonly("kind", [](const PopularityProfile& p) { return to_string(p.kind()); })
        .def_property_readonly("gamma", &PopularityProfile::gamma)
        .def_property_readonly("pmf", &PopularityProfile::pmf);

    m.def("make_profile",
          [](std::uint32_t K, const std::string& kind, double gamma) {
              return make_profile(K, parse_popularity_kind(kind), gamma);
          },
          py::arg("K"), py::arg("kind") = "uniform", py::arg("gamma") = 0.0);
    m.def("harmonic_lambda", &harmonic_lambda, py::arg("K"), py::arg("gamma"));

    py::class_<Placement>(m, "Placement")
        .def_property_readonly("n", &Placement::node_count)
        .def_property_readonly("M", &Placement::cache_size)
        .def_property_readonly("K", &Placement::library_size)
        .def("slots", [](const Placement& p, std::uint32_t u) {
            auto s = p.slots(checked(p, u));
            return std::vector<FileId>(s.begin(), s.end());
        })
        .def("replicas", [](const Placement& p, FileId f) { return indices(p.replicas(checked_file(p, f))); })
        .def("holds", [](const Placement& p, std::uint32_t u, FileId f) { return p.holds(checked(p, u), f); })
        .def("distinct_count", [](const Placement& p, std::uint32_t u) { return distinct_count(checked(p, u), p); })
        .def("overlap", [](const Placement& p, std::uint32_t u, std::uint32_t v) {
            const Overlap o = overlap(checked(p, u), checked(p, v), p);
            return py::make_tuple(o.count, o.files);
        })
        .def("to_text", [](const Placement& p) {
            std::ostringstream out;
            save_text(p, out);
            return out.str();
        })
        .def_static("from_text", [](const std::string& s) {
            std::istringstream in(s);
            return load_text(in);
        });

    m.def("place", &place, py::arg("n"), py::arg("M"), py::arg("profile"), py::arg("seed"));

    py::class_<RequestStream>(m, "RequestStream")
        .def_property_readonly("node_count", [](const RequestStream& s) { return s.node_count; })
        .def("__len__", &RequestStream::size)
        .def_property_readonly("requests", [](const RequestStream& s) {
            py::list out;
            for (const Request& r : s.requests) out.append(py::make_tuple(r.seq, r.origin.index, r.file));
            return out;
        });
    m.def("generate", &generate, py::arg("n_requests"), py::arg("n_nodes"), py::arg("profile"), py::arg("seed"));
    m.def("per_node_counts", &per_node_counts, py::arg("stream"), py::arg("n_nodes"));

    py::class_<StrategyConfig>(m, "StrategyConfig")
        .def(py::init([](const std::string& kind, std::optional<int> radius, const std::string& fallback) {
                 StrategyConfig c;
                 c.kind = parse_strategy_kind(kind);
                 c.radius = radius;
                 c.fallback = parse_fallback(fallback);
                 c.validate();
                 return c;
             }),
             py::arg("kind") = "nearest", py::arg("radius") = py::none(), py::arg("fallback") = "nearest_global")
        .def_property_readonly("kind", [](const StrategyConfig& c) { return to_string(c.kind); })
        .def_property_readonly("radius", [](const StrategyConfig& c) { return c.radius; })
        .def_property_readonly("fallback", [](const StrategyConfig& c) { return to_string(c.fallback); });

    py::class_<MetricsRecord>(m, "MetricsRecord")
        .def_readonly("n", &MetricsRecord::n)
        .def_readonly("K", &MetricsRecord::K)
        .def_readonly("M", &MetricsRecord::M)
        .def_readonly("seed", &MetricsRecord::seed)
        .def_readonly("max_load", &MetricsRecord::max_load)
        .def_readonly("comm_cost", &MetricsRecord::comm_cost)
        .def_readonly("served", &MetricsRecord::served)
        .def_readonly("fallbacks", &MetricsRecord::fallbacks)
        .def_readonly("rejected", &MetricsRecord::rejected)
        .def_readonly("requests", &MetricsRecord::requests)
        .def_readonly("load_histogram", &MetricsRecord::load_histogram)
        .def_readonly("runtime_ms", &MetricsRecord::runtime_ms);

    m.def("run",
          [](const RequestStream& s, const Placement& p, const TorusGeometry& g, const StrategyConfig& c,
             std::uint64_t seed) {
              py::gil_scoped_release release;
              return run(s, p, g, c, seed);
          },
          py::arg("stream"), py::arg("placement"), py::arg("geometry"), py::arg("config"), py::arg("seed"));

    m.def("voronoi",
          [](FileId file, const Placement& p, const TorusGeometry& g, std::uint64_t seed) {
              Rng rng(seed);
              const VoronoiTessellation t = voronoi(file, p, g, rng);
              py::dict d;
              d["file"] = t.file;
              d["owner"] = indices(t.owner);
              d["distance"] = t.distance;
              d["centers"] = indices(t.centers);
              d["cell_sizes"] = t.cell_sizes;
              return d;
          },
          py::arg("file"), py::arg("placement"), py::arg("geometry"), py::arg("seed"));

    py::class_<ConfigGraph>(m, "ConfigGraph")
        .def_property_readonly("node_count", &ConfigGraph::node_count)
        .def_property_readonly("edge_count", &ConfigGraph::edge_count)
        .def("degrees", &ConfigGraph::degrees)
        .def("neighbors", [](const ConfigGraph& g, std::uint32_t u) {
            if (u >= g.node_count()) throw py::index_error("node index out of range");
            return indices(g.neighbors(NodeId(u)));
        });
    m.def("build_config_graph",
          [](const Placement& p, const TorusGeometry& g, int r) { return build_config_graph(p, g, r); },
          py::arg("placement"), py::arg("geometry"), py::arg("r"));

    m.def("goodness_check",
          [](const Placement& p, double alpha) {
              const GoodnessReport rep = goodness_check(p, alpha);
              py::dict d;
              d["pass"] = rep.pass;
              d["delta"] = rep.delta;
              d["mu"] = rep.mu;
              d["sparse_nodes"] = indices(rep.sparse_nodes);
              py::list pairs;
              for (const auto& v : rep.heavy_pairs) pairs.append(py::make_tuple(v.u.index, v.v.index, v.shared));
              d["heavy_pairs"] = pairs;
              return d;
          },
          py::arg("placement"), py::arg("alpha"));

    m.def("predicted_cost", &predicted_cost, py::arg("profile"), py::arg("M"));
    m.def("cost_regime",
          [](std::uint32_t K, std::uint32_t M, double gamma) {
              const CostRegime r = cost_regime(K, M, gamma);
              return py::make_tuple(r.label, r.leading_term);
          },
          py::arg("K"), py::arg("M"), py::arg("gamma"));

    m.def("fit_loglog",
          [](const std::vector<double>& x, const std::vector<double>& y, const std::string& transform) {
              const FitResult f = fit_loglog(x, y, parse_fit_transform(transform));
              return py::make_tuple(f.slope, f.intercept, f.r2);
          },
          py::arg("x"), py::arg("y"), py::arg("transform") = "ln");

    m.def("run_experiment",
          [](const py::object& spec, unsigned threads) {
              const ExperimentSpec s = parse_spec(to_json(spec));
              ExperimentResult r;
              {
                  py::gil_scoped_release release;
                  r = run_experiment(s, RunOptions{threads});
              }
              std::ostringstream runs, agg;
              write_runs_csv(r, s.record_runtime, runs);
              write_aggregate_csv(r, agg);
              py::list aggregates;
              for (const auto& a : r.aggregates) aggregates.append(aggregate_dict(a));
              py::dict d;
              d["runs_csv"] = runs.str();
              d["aggregate_csv"] = agg.str();
              d["aggregates"] = aggregates;
              d["conservation_violations"] = r.conservation_violations;
              return d;
          },
          py::arg("spec"), py::arg("threads") = 0);

    m.def("selftest", [] {
        std::ostringstream log;
        const bool ok = run_selftest(log);
        return py::make_tuple(ok, log.str());
    });

    py::register_exception<UnservableFile>(m, "UnservableFile", PyExc_ValueError);
}
