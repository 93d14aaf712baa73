#include "cachelb/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "cachelb/placement.hpp"
#include "cachelb/workload.hpp"

namespace cachelb {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Quantity

Quantity Quantity::parse(const json& j) {
    if (j.is_number()) {
        const double v = j.get<double>();
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite quantity");
        return {Kind::Constant, v};
    }
    if (!j.is_string()) throw std::invalid_argument("quantity must be a number or string, got " + j.dump());
    std::string s = j.get<std::string>();
    s.erase(std::remove(s.begin(), s.end(), ' '), s.end());
    if (s == "unbounded" || s == "inf") return {Kind::Unbounded, 0.0};
    if (s == "n") return {Kind::Power, 1.0};
    try {
        std::size_t used = 0;
        if (s.rfind("n^", 0) == 0) {
            const double c = std::stod(s.substr(2), &used);
            if (used == s.size() - 2 && std::isfinite(c)) return {Kind::Power, c};
        } else {
            const double v = std::stod(s, &used);
            if (used == s.size() && std::isfinite(v)) return {Kind::Constant, v};
        }
    } catch (const std::logic_error&) {
    }
    throw std::invalid_argument("cannot parse quantity '" + s + "' (expected number, n, n^c or unbounded)");
}

std::optional<std::int64_t> Quantity::resolve(std::int64_t n) const {
    switch (kind) {
        case Kind::Constant:
            return static_cast<std::int64_t>(std::llround(value));
        case Kind::Power:
            return static_cast<std::int64_t>(std::ceil(std::pow(static_cast<double>(n), value) - 1e-9));
        case Kind::Unbounded:
            break;
    }
    return std::nullopt;
}

std::string Quantity::to_string() const {
    switch (kind) {
        case Kind::Constant:
            return format_number(value);
        case Kind::Power:
            return value == 1.0 ? "n" : "n^" + format_number(value);
        case Kind::Unbounded:
            break;
    }
    return "unbounded";
}

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string format_radius(const StrategyConfig& cfg) {
    if (cfg.kind == StrategyKind::NearestReplica) return "na";
    return cfg.radius ? std::to_string(*cfg.radius) : "inf";
}

// ---------------------------------------------------------------------------
// Spec parsing

namespace {

std::vector<Quantity> parse_sweep(const json& j) {
    std::vector<Quantity> out;
    if (j.is_array()) {
        for (const auto& e : j) out.push_back(Quantity::parse(e));
    } else {
        out.push_back(Quantity::parse(j));
    }
    return out;
}

template <class T>
std::vector<T> as_list(const json& j) {
    if (j.is_array()) return j.get<std::vector<T>>();
    return {j.get<T>()};
}

bool is_integral(double v) { return std::floor(v) == v; }

}  // namespace

ExperimentSpec parse_spec(const json& j) {
    if (!j.is_object()) throw std::invalid_argument("experiment spec must be a JSON object");
    static const std::vector<std::string> known{"name",       "geometry",  "K",           "M",
                                                "popularity", "strategy",  "n_requests",  "replications",
                                                "base_seed",  "budget",    "record_runtime", "outputs",
                                                "description"};
    for (const auto& [key, _] : j.items())
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw std::invalid_argument("unknown spec field '" + key + "'");

    ExperimentSpec s;
    try {
        s.name = j.value("name", std::string("experiment"));

        const json& geo = j.at("geometry");
        s.wrap = geo.value("wrap", true);
        if (geo.contains("n") == geo.contains("side"))
            throw std::invalid_argument("geometry needs exactly one of 'n' or 'side'");
        if (geo.contains("n")) {
            s.nodes = as_list<std::int64_t>(geo.at("n"));
        } else {
            for (auto side : as_list<std::int64_t>(geo.at("side"))) s.nodes.push_back(side * side);
        }

        s.library_sizes = parse_sweep(j.at("K"));
        s.cache_sizes = parse_sweep(j.at("M"));

        if (j.contains("popularity")) {
            const json& pop = j.at("popularity");
            s.popularity = parse_popularity_kind(pop.value("kind", std::string("uniform")));
            if (s.popularity == PopularityKind::Zipf) s.gammas = as_list<double>(pop.at("gamma"));
        }

        if (j.contains("strategy")) {
            const json& st = j.at("strategy");
            s.strategies.clear();
            for (const auto& k : as_list<std::string>(st.value("kind", json("nearest"))))
                s.strategies.push_back(parse_strategy_kind(k));
            if (st.contains("radius")) s.radii = parse_sweep(st.at("radius"));
            s.fallback = parse_fallback(st.value("fallback", std::string("nearest_global")));
        }

        if (j.contains("n_requests")) s.n_requests = Quantity::parse(j.at("n_requests"));
        const auto reps = j.value("replications", std::int64_t{1});
        if (reps < 1) throw std::invalid_argument("replications must be >= 1");
        s.replications = static_cast<std::uint32_t>(reps);
        s.base_seed = j.value("base_seed", std::uint64_t{1});
        s.budget = j.value("budget", s.budget);
        s.record_runtime = j.value("record_runtime", false);

        if (j.contains("outputs")) {
            const json& out = j.at("outputs");
            s.csv_path = out.value("csv", std::string());
            s.aggregate_path = out.value("aggregate_csv", std::string());
            s.svg_path = out.value("svg", std::string());
            if (out.contains("plot")) s.plot = out.at("plot");
        }
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("malformed experiment spec: ") + e.what());
    }
    s.validate();
    return s;
}

ExperimentSpec load_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open spec file " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::invalid_argument("spec file " + path.string() + " is not valid JSON: " + e.what());
    }
    return parse_spec(j);
}

void ExperimentSpec::validate() const {
    if (replications < 1) throw std::invalid_argument("replications must be >= 1");
    if (nodes.empty()) throw std::invalid_argument("geometry sweep is empty");
    if (library_sizes.empty()) throw std::invalid_argument("K sweep is empty");
    if (cache_sizes.empty()) throw std::invalid_argument("M sweep is empty");
    if (gammas.empty()) throw std::invalid_argument("gamma sweep is empty");
    if (strategies.empty()) throw std::invalid_argument("strategy list is empty");
    for (auto n : nodes) TorusGeometry::from_nodes(n, wrap);
    for (const auto& q : library_sizes)
        if (q.kind == Quantity::Kind::Unbounded || (q.kind == Quantity::Kind::Constant && (q.value < 1 || !is_integral(q.value))))
            throw std::invalid_argument("K must be a positive integer or n^c rule");
    for (const auto& q : cache_sizes)
        if (q.kind == Quantity::Kind::Unbounded || (q.kind == Quantity::Kind::Constant && (q.value < 1 || !is_integral(q.value))))
            throw std::invalid_argument("M must be a positive integer or n^c rule");
    for (const auto& q : radii)
        if (q.kind == Quantity::Kind::Constant && (q.value < 1 || !is_integral(q.value)))
            throw std::invalid_argument("radius must be a positive integer, n^c rule or 'unbounded'");
    if (n_requests.kind == Quantity::Kind::Unbounded ||
        (n_requests.kind == Quantity::Kind::Constant && (n_requests.value < 0 || !is_integral(n_requests.value))))
        throw std::invalid_argument("n_requests must be a non-negative integer or n^c rule");
    for (double g : gammas)
        if (!(g >= 0.0) || !std::isfinite(g)) throw std::invalid_argument("gamma must be >= 0");
    const std::uint64_t total = static_cast<std::uint64_t>(expand_grid(*this).size()) * replications;
    if (total > budget)
        throw std::invalid_argument("experiment needs " + std::to_string(total) + " runs, budget is " +
                                    std::to_string(budget));
}

std::vector<CellConfig> expand_grid(const ExperimentSpec& spec) {
    std::vector<CellConfig> grid;
    const std::vector<Quantity> unbounded{Quantity{Quantity::Kind::Unbounded, 0.0}};
    const auto& radii = spec.radii.empty() ? unbounded : spec.radii;
    auto checked_u32 = [](std::int64_t v, const char* what) {
        if (v < 0 || v > UINT32_MAX) throw std::invalid_argument(std::string(what) + " out of range");
        return static_cast<std::uint32_t>(v);
    };
    for (auto n : spec.nodes)
        for (const auto& kq : spec.library_sizes)
            for (const auto& mq : spec.cache_sizes)
                for (double gamma : spec.gammas)
                    for (StrategyKind kind : spec.strategies) {
                        CellConfig c;
                        c.n = checked_u32(n, "n");
                        c.K = checked_u32(*kq.resolve(n), "K");
                        c.M = checked_u32(*mq.resolve(n), "M");
                        if (c.K < 1 || c.M < 1) throw std::invalid_argument("K and M must resolve to >= 1");
                        c.gamma = spec.popularity == PopularityKind::Zipf ? gamma : 0.0;
                        c.n_requests = checked_u32(*spec.n_requests.resolve(n), "n_requests");
                        c.strategy.kind = kind;
                        c.strategy.fallback = spec.fallback;
                        if (kind == StrategyKind::NearestReplica) {
                            grid.push_back(c);
                            continue;
                        }
                        for (const auto& rq : radii) {
                            const auto r = rq.resolve(n);
                            if (r) c.strategy.radius = static_cast<int>(std::max<std::int64_t>(1, *r));
                            else c.strategy.radius.reset();
                            grid.push_back(c);
                        }
                    }
    return grid;
}

// ---------------------------------------------------------------------------
// Execution

unsigned resolve_thread_count(unsigned requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("CACHELB_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

namespace {

// Grid points that share (n, K, M, gamma, n_requests) share one placement and
// stream per replication.
struct Instance {
    std::size_t first_config = 0;
    std::size_t config_count = 0;
};

bool same_instance(const CellConfig& a, const CellConfig& b) {
    return a.n == b.n && a.K == b.K && a.M == b.M && a.gamma == b.gamma && a.n_requests == b.n_requests;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec, const RunOptions& options) {
    spec.validate();
    ExperimentResult result;
    result.configs = expand_grid(spec);
    const std::uint32_t reps = spec.replications;
    result.runs.resize(result.configs.size() * reps);

    std::vector<Instance> instances;
    for (std::size_t c = 0; c < result.configs.size(); ++c) {
        if (instances.empty() || !same_instance(result.configs[instances.back().first_config], result.configs[c]))
            instances.push_back({c, 0});
        ++instances.back().config_count;
    }

    const std::size_t units = instances.size() * reps;
    std::atomic<std::size_t> next{0};
    std::atomic<std::uint64_t> violations{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};

    auto worker = [&] {
        LoadState state(0);
        for (std::size_t unit = next++; unit < units && !failed; unit = next++) {
            try {
                const Instance& inst = instances[unit / reps];
                const auto rep = static_cast<std::uint32_t>(unit % reps);
                const CellConfig& base = result.configs[inst.first_config];
                const std::uint64_t run_seed = derive_seed(spec.base_seed, stream::replication, rep);

                const TorusGeometry geo = TorusGeometry::from_nodes(base.n, spec.wrap);
                const PopularityProfile profile = make_profile(base.K, spec.popularity, base.gamma);
                const Placement placement =
                    place(base.n, base.M, profile, derive_seed(run_seed, stream::placement));
                const RequestStream requests =
                    generate(base.n_requests, base.n, profile, derive_seed(run_seed, stream::workload));

                for (std::size_t k = 0; k < inst.config_count; ++k) {
                    const std::size_t c = inst.first_config + k;
                    const CellConfig& cfg = result.configs[c];
                    MetricsRecord m = run(requests, placement, geo, cfg.strategy,
                                          derive_seed(run_seed, stream::strategy), state);
                    m.gamma = cfg.gamma;
                    m.seed = run_seed;
                    std::uint64_t total = 0;
                    for (auto t : state.loads) total += t;
                    if (m.served + m.rejected != m.requests || total != m.served) ++violations;
                    result.runs[c * reps + rep] = std::move(m);
                }
            } catch (...) {
                if (!failed.exchange(true)) failure = std::current_exception();
            }
        }
    };

    const unsigned threads = std::min<std::size_t>(resolve_thread_count(options.threads), std::max<std::size_t>(units, 1));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
    result.conservation_violations = violations;

    // Reduction in cell order, independent of scheduling.
    for (std::size_t c = 0; c < result.configs.size(); ++c) {
        AggregateRow row;
        row.config = result.configs[c];
        row.runs = reps;
        double sl = 0, sl2 = 0, sc = 0, sc2 = 0, sf = 0, sr = 0;
        for (std::uint32_t rep = 0; rep < reps; ++rep) {
            const MetricsRecord& m = result.runs[c * reps + rep];
            sl += m.max_load;
            sl2 += static_cast<double>(m.max_load) * m.max_load;
            sc += m.comm_cost;
            sc2 += m.comm_cost * m.comm_cost;
            sf += static_cast<double>(m.fallbacks);
            sr += static_cast<double>(m.rejected);
        }
        const double k = reps;
        row.mean_max_load = sl / k;
        row.mean_comm_cost = sc / k;
        row.mean_fallbacks = sf / k;
        row.mean_rejected = sr / k;
        if (reps > 1) {
            const double var_l = std::max(0.0, (sl2 - sl * sl / k) / (k - 1));
            const double var_c = std::max(0.0, (sc2 - sc * sc / k) / (k - 1));
            row.se_max_load = std::sqrt(var_l / k);
            row.se_comm_cost = std::sqrt(var_c / k);
        }
        result.aggregates.push_back(row);
    }
    return result;
}

// ---------------------------------------------------------------------------
// CSV output

void write_runs_csv(const ExperimentResult& result, bool record_runtime, std::ostream& out) {
    out << kRunsCsvHeader << '\n';
    for (const MetricsRecord& m : result.runs) {
        out << to_string(m.strategy.kind) << ',' << m.n << ',' << m.K << ',' << m.M << ','
            << format_radius(m.strategy) << ',' << format_number(m.gamma) << ',' << m.seed << ','
            << m.max_load << ',' << format_number(m.comm_cost) << ',' << m.served << ',' << m.fallbacks << ','
            << m.rejected << ',' << (record_runtime ? format_number(m.runtime_ms) : "0") << '\n';
    }
}

void write_aggregate_csv(const ExperimentResult& result, std::ostream& out) {
    out << "strategy,n,K,M,r,gamma,runs,mean_max_load,se_max_load,ci95_low_max_load,ci95_high_max_load,"
           "mean_comm_cost,se_comm_cost,ci95_low_comm_cost,ci95_high_comm_cost,mean_fallbacks,mean_rejected\n";
    for (const AggregateRow& a : result.aggregates) {
        const auto& c = a.config;
        out << to_string(c.strategy.kind) << ',' << c.n << ',' << c.K << ',' << c.M << ','
            << format_radius(c.strategy) << ',' << format_number(c.gamma) << ',' << a.runs << ','
            << format_number(a.mean_max_load) << ',' << format_number(a.se_max_load) << ','
            << format_number(a.mean_max_load - 1.96 * a.se_max_load) << ','
            << format_number(a.mean_max_load + 1.96 * a.se_max_load) << ',' << format_number(a.mean_comm_cost)
            << ',' << format_number(a.se_comm_cost) << ',' << format_number(a.mean_comm_cost - 1.96 * a.se_comm_cost)
            << ',' << format_number(a.mean_comm_cost + 1.96 * a.se_comm_cost) << ','
            << format_number(a.mean_fallbacks) << ',' << format_number(a.mean_rejected) << '\n';
    }
}

}  // namespace cachelb
