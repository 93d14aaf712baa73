#include "cachelb/strategies.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <stdexcept>

namespace cachelb {

std::string to_string(StrategyKind kind) {
    return kind == StrategyKind::NearestReplica ? "nearest" : "two_choices";
}

std::string to_string(Fallback fallback) {
    return fallback == Fallback::NearestGlobal ? "nearest_global" : "reject";
}

StrategyKind parse_strategy_kind(const std::string& s) {
    if (s == "nearest" || s == "nearest_replica") return StrategyKind::NearestReplica;
    if (s == "two_choices" || s == "two_choice") return StrategyKind::TwoChoices;
    throw std::invalid_argument("unknown strategy '" + s + "' (expected nearest|two_choices)");
}

Fallback parse_fallback(const std::string& s) {
    if (s == "nearest_global") return Fallback::NearestGlobal;
    if (s == "reject") return Fallback::Reject;
    throw std::invalid_argument("unknown fallback '" + s + "' (expected nearest_global|reject)");
}

void StrategyConfig::validate() const {
    if (radius && *radius < 1) throw std::invalid_argument("radius must be >= 1 when bounded");
}

namespace {

// Expected cost of a ring scan to the nearest holder is roughly n / replicas
// probes; a replica-list scan costs one probe per replica.
bool prefer_index_for_nearest(std::size_t replicas, std::uint32_t n) {
    return replicas * replicas <= 4ULL * n;
}

}  // namespace

NearestSet nearest_holders(NodeId origin, FileId file, const Placement& p,
                           const TorusGeometry& geo, SearchRoute route) {
    NearestSet out;
    const auto replicas = p.replicas(file);
    if (replicas.empty()) return out;

    if (route == SearchRoute::Auto)
        route = prefer_index_for_nearest(replicas.size(), p.node_count()) ? SearchRoute::ReplicaIndex
                                                                          : SearchRoute::RingScan;

    if (route == SearchRoute::ReplicaIndex) {
        int best = -1;
        for (NodeId v : replicas) {
            const int d = geo.distance(origin, v);
            if (best < 0 || d < best) {
                best = d;
                out.nodes.clear();
            }
            if (d == best) out.nodes.push_back(v);
        }
        out.distance = best;
        return out;
    }

    const int ecc = geo.eccentricity(origin);
    for (int d = 0; d <= ecc; ++d) {
        geo.for_each_at_distance(origin, d, [&](NodeId v) {
            if (p.holds(v, file)) out.nodes.push_back(v);
        });
        if (!out.nodes.empty()) {
            std::sort(out.nodes.begin(), out.nodes.end());
            out.distance = d;
            return out;
        }
    }
    throw std::logic_error("nearest_holders: replica index and cache contents disagree");
}

std::vector<NodeId> holders_within(NodeId origin, FileId file, std::optional<int> radius,
                                   const Placement& p, const TorusGeometry& geo,
                                   SearchRoute route) {
    const auto replicas = p.replicas(file);
    if (!radius) return {replicas.begin(), replicas.end()};

    const int r = std::min(*radius, geo.eccentricity(origin));
    if (route == SearchRoute::Auto) {
        const std::uint64_t area =
            std::min<std::uint64_t>(2ULL * r * (r + 1) + 1, p.node_count());
        route = replicas.size() <= area ? SearchRoute::ReplicaIndex : SearchRoute::RingScan;
    }

    std::vector<NodeId> out;
    if (route == SearchRoute::ReplicaIndex) {
        for (NodeId v : replicas)
            if (geo.distance(origin, v) <= r) out.push_back(v);
        return out;
    }
    for (int d = 0; d <= r; ++d)
        geo.for_each_at_distance(origin, d, [&](NodeId v) {
            if (p.holds(v, file)) out.push_back(v);
        });
    std::sort(out.begin(), out.end());
    return out;
}

std::optional<Assignment> nearest_replica_assign(const Request& req, const Placement& p,
                                                 const TorusGeometry& geo, LoadState& state,
                                                 Rng& rng, SearchRoute route) {
    const NearestSet best = nearest_holders(req.origin, req.file, p, geo, route);
    if (best.nodes.empty()) {
        ++state.rejected;
        return std::nullopt;
    }
    const NodeId server =
        best.nodes.size() == 1 ? best.nodes.front() : best.nodes[rng.uniform_index(best.nodes.size())];
    assert(p.holds(server, req.file));
    state.assign(server, best.distance);
    return Assignment{server, best.distance};
}

std::optional<Assignment> two_choice_assign(const Request& req, const Placement& p,
                                            const TorusGeometry& geo, const StrategyConfig& cfg,
                                            LoadState& state, Rng& rng, SearchRoute route) {
    if (cfg.kind != StrategyKind::TwoChoices)
        throw std::invalid_argument("two_choice_assign requires a TwoChoices config");

    const auto replicas = p.replicas(req.file);
    if (replicas.empty()) {
        ++state.rejected;
        return std::nullopt;
    }

    std::vector<NodeId> bounded;
    std::span<const NodeId> candidates = replicas;
    if (cfg.radius) {
        bounded = holders_within(req.origin, req.file, cfg.radius, p, geo, route);
        candidates = bounded;
    }

    if (candidates.empty()) {
        if (cfg.fallback == Fallback::Reject) {
            ++state.rejected;
            return std::nullopt;
        }
        ++state.fallbacks;
        return nearest_replica_assign(req, p, geo, state, rng, route);
    }

    NodeId server = candidates.front();
    if (candidates.size() >= 2) {
        const auto a = rng.uniform_index(candidates.size());
        auto b = rng.uniform_index(candidates.size() - 1);
        if (b >= a) ++b;
        const NodeId first = candidates[a];
        const NodeId second = candidates[b];
        const auto la = state.loads[first.index];
        const auto lb = state.loads[second.index];
        if (la != lb)
            server = la < lb ? first : second;
        else
            server = rng.uniform_index(2) == 0 ? first : second;
    }
    assert(p.holds(server, req.file));
    const int hops = geo.distance(req.origin, server);
    state.assign(server, hops);
    return Assignment{server, hops};
}

MetricsRecord run(const RequestStream& stream, const Placement& p, const TorusGeometry& geo,
                  const StrategyConfig& cfg, std::uint64_t seed, LoadState& state) {
    cfg.validate();
    if (p.node_count() != geo.size() || stream.node_count != geo.size())
        throw std::invalid_argument("run: stream, placement and geometry disagree on n");

    const auto start = std::chrono::steady_clock::now();
    state = LoadState(geo.size());
    Rng rng(seed);
    for (const Request& req : stream.requests) {
        if (req.file < 1 || req.file > p.library_size())
            throw std::invalid_argument("run: request file id outside [1, K]");
        if (!geo.contains(req.origin)) throw std::invalid_argument("run: request origin outside torus");
        if (cfg.kind == StrategyKind::NearestReplica)
            nearest_replica_assign(req, p, geo, state, rng);
        else
            two_choice_assign(req, p, geo, cfg, state, rng);
    }
    const auto stop = std::chrono::steady_clock::now();

    MetricsRecord m;
    m.strategy = cfg;
    m.n = geo.size();
    m.K = p.library_size();
    m.M = p.cache_size();
    m.seed = seed;
    m.requests = stream.size();
    m.served = state.served;
    m.fallbacks = state.fallbacks;
    m.rejected = state.rejected;
    m.max_load = state.loads.empty() ? 0 : *std::max_element(state.loads.begin(), state.loads.end());
    m.comm_cost = state.served == 0 ? 0.0
                                    : static_cast<double>(state.hop_sum) / static_cast<double>(state.served);
    m.load_histogram.assign(m.max_load + 1, 0);
    for (auto t : state.loads) ++m.load_histogram[t];
    m.runtime_ms = std::chrono::duration<double, std::milli>(stop - start).count();
    return m;
}

MetricsRecord run(const RequestStream& stream, const Placement& p, const TorusGeometry& geo,
                  const StrategyConfig& cfg, std::uint64_t seed) {
    LoadState state(0);
    return run(stream, p, geo, cfg, seed, state);
}

}  // namespace cachelb
