#include "cachelb/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <ostream>
#include <string>

#include "cachelb/analysis.hpp"
#include "cachelb/strategies.hpp"

namespace cachelb {

namespace {

bool geometry_matches_bfs() {
    for (int side = 3; side <= 9; ++side)
        for (bool wrap : {true, false}) {
            const TorusGeometry geo(side, wrap);
            for (std::uint32_t u = 0; u < geo.size(); ++u) {
                const auto bfs = bfs_distance_oracle(NodeId(u), geo);
                for (std::uint32_t v = 0; v < geo.size(); ++v)
                    if (geo.distance(NodeId(u), NodeId(v)) != bfs[v]) return false;
                for (int r = 0; r <= 2 * side; ++r) {
                    std::size_t expect = 0;
                    for (int d : bfs) expect += d <= r;
                    if (geo.ball(NodeId(u), r).size() != expect) return false;
                    if (wrap && 2 * r < side && expect != static_cast<std::size_t>(2 * r * (r + 1) + 1)) return false;
                }
            }
        }
    return true;
}

bool voronoi_matches_argmin() {
    const TorusGeometry geo(8);
    const auto profile = make_profile(6, PopularityKind::Uniform);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const Placement p = place(geo.size(), 1, profile, seed);
        Rng rng(seed, stream::voronoi);
        for (FileId f = 1; f <= 6; ++f) {
            if (p.replicas(f).empty()) continue;
            const auto t = voronoi(f, p, geo, rng);
            for (std::uint32_t v = 0; v < geo.size(); ++v) {
                int best = 1 << 30;
                for (NodeId c : p.replicas(f)) best = std::min(best, geo.distance(NodeId(v), c));
                if (!p.holds(t.owner[v], f) || geo.distance(NodeId(v), t.owner[v]) != best) return false;
            }
            if (std::accumulate(t.cell_sizes.begin(), t.cell_sizes.end(), 0U) != geo.size()) return false;
        }
    }
    return true;
}

bool nearest_assignments_minimal() {
    const TorusGeometry geo(10);
    const auto profile = make_profile(8, PopularityKind::Zipf, 0.8);
    const Placement p = place(geo.size(), 2, profile, 11);
    const RequestStream s = generate(1000, geo.size(), profile, 12);
    LoadState state(geo.size());
    Rng rng(13);
    for (const Request& r : s.requests) {
        const auto a = nearest_replica_assign(r, p, geo, state, rng);
        if (!a) {
            if (!p.replicas(r.file).empty()) return false;
            continue;
        }
        if (!p.holds(a->server, r.file)) return false;
        for (NodeId v : p.replicas(r.file))
            if (geo.distance(r.origin, v) < a->hops) return false;
    }
    return state.served + state.rejected == s.size();
}

bool search_routes_agree() {
    const TorusGeometry geo(12);
    const auto profile = make_profile(20, PopularityKind::Uniform);
    const Placement p = place(geo.size(), 3, profile, 5);
    for (std::uint32_t u = 0; u < geo.size(); u += 7)
        for (FileId f = 1; f <= 20; ++f) {
            const auto a = nearest_holders(NodeId(u), f, p, geo, SearchRoute::RingScan);
            const auto b = nearest_holders(NodeId(u), f, p, geo, SearchRoute::ReplicaIndex);
            if (a.nodes != b.nodes || a.distance != b.distance) return false;
            for (int r : {1, 3, 6}) {
                if (holders_within(NodeId(u), f, r, p, geo, SearchRoute::RingScan) !=
                    holders_within(NodeId(u), f, r, p, geo, SearchRoute::ReplicaIndex))
                    return false;
            }
        }
    return true;
}

bool config_graph_routes_agree() {
    const TorusGeometry geo(10);
    const Placement p = place(geo.size(), 3, make_profile(40, PopularityKind::Uniform), 9);
    for (int r : {1, 2, 4}) {
        const auto a = build_config_graph(p, geo, r, GraphRoute::BallScan);
        const auto b = build_config_graph(p, geo, r, GraphRoute::ReplicaIndex);
        if (a.edge_count() != b.edge_count()) return false;
        for (std::uint32_t u = 0; u < geo.size(); ++u) {
            const auto na = a.neighbors(NodeId(u));
            const auto nb = b.neighbors(NodeId(u));
            if (!std::equal(na.begin(), na.end(), nb.begin(), nb.end())) return false;
        }
    }
    return true;
}

bool pmf_normalised() {
    for (std::uint32_t K : {1U, 7U, 100U, 5000U})
        for (double g : {0.0, 0.5, 1.0, 2.5}) {
            const auto p = make_profile(K, g == 0.0 ? PopularityKind::Uniform : PopularityKind::Zipf, g);
            const double sum = std::accumulate(p.pmf().begin(), p.pmf().end(), 0.0);
            if (std::abs(sum - 1.0) > 1e-12) return false;
        }
    return true;
}

}  // namespace

bool run_selftest(std::ostream& log) {
    const std::pair<const char*, std::function<bool()>> checks[] = {
        {"geometry distance/ball vs BFS", geometry_matches_bfs},
        {"voronoi owners are nearest holders", voronoi_matches_argmin},
        {"nearest-replica minimality audit", nearest_assignments_minimal},
        {"candidate search routes agree", search_routes_agree},
        {"configuration graph routes agree", config_graph_routes_agree},
        {"popularity pmf normalisation", pmf_normalised},
    };
    bool all = true;
    for (const auto& [name, check] : checks) {
        bool ok = false;
        try {
            ok = check();
        } catch (const std::exception& e) {
            log << "error in " << name << ": " << e.what() << '\n';
        }
        log << (ok ? "[ok]   " : "[FAIL] ") << name << '\n';
        all = all && ok;
    }
    return all;
}

}  // namespace cachelb
