#pragma once

// Brute-force reference implementations used by the tests. They deliberately
// avoid the library's geometry shortcuts (analytic diamonds, replica index).

#include <algorithm>
#include <cstdint>
#include <queue>
#include <set>
#include <vector>

#include "cachelb/placement.hpp"
#include "cachelb/rng.hpp"
#include "cachelb/topology.hpp"

namespace oracle {

// Explicit adjacency lists for a side x side lattice.
inline std::vector<std::vector<std::uint32_t>> lattice_adjacency(int side, bool wrap) {
    const std::uint32_t n = static_cast<std::uint32_t>(side) * side;
    std::vector<std::vector<std::uint32_t>> adj(n);
    auto link = [&](int x, int y, int nx, int ny) {
        if (wrap) {
            nx = (nx + side) % side;
            ny = (ny + side) % side;
        } else if (nx < 0 || ny < 0 || nx >= side || ny >= side) {
            return;
        }
        const auto u = static_cast<std::uint32_t>(y * side + x);
        const auto v = static_cast<std::uint32_t>(ny * side + nx);
        if (u != v) adj[u].push_back(v);
    };
    for (int y = 0; y < side; ++y)
        for (int x = 0; x < side; ++x) {
            link(x, y, x + 1, y);
            link(x, y, x - 1, y);
            link(x, y, x, y + 1);
            link(x, y, x, y - 1);
        }
    return adj;
}

inline std::vector<int> bfs(const std::vector<std::vector<std::uint32_t>>& adj, std::uint32_t src) {
    std::vector<int> dist(adj.size(), -1);
    std::queue<std::uint32_t> q;
    dist[src] = 0;
    q.push(src);
    while (!q.empty()) {
        const auto u = q.front();
        q.pop();
        for (auto v : adj[u])
            if (dist[v] < 0) {
                dist[v] = dist[u] + 1;
                q.push(v);
            }
    }
    return dist;
}

// All-pairs distances, row-major.
inline std::vector<std::vector<int>> all_pairs(int side, bool wrap) {
    const auto adj = lattice_adjacency(side, wrap);
    std::vector<std::vector<int>> d;
    d.reserve(adj.size());
    for (std::uint32_t u = 0; u < adj.size(); ++u) d.push_back(bfs(adj, u));
    return d;
}

// Holders found by scanning every node's slots (not the replica index).
inline std::vector<std::uint32_t> holders(const cachelb::Placement& p, cachelb::FileId f) {
    std::vector<std::uint32_t> out;
    for (std::uint32_t u = 0; u < p.node_count(); ++u) {
        auto s = p.slots(cachelb::NodeId(u));
        if (std::find(s.begin(), s.end(), f) != s.end()) out.push_back(u);
    }
    return out;
}

struct Nearest {
    std::vector<std::uint32_t> nodes;
    int distance = -1;
};

inline Nearest nearest(const std::vector<int>& dist_from_origin, const std::vector<std::uint32_t>& hs) {
    Nearest out;
    for (auto h : hs) {
        const int d = dist_from_origin[h];
        if (out.distance < 0 || d < out.distance) {
            out.distance = d;
            out.nodes = {h};
        } else if (d == out.distance) {
            out.nodes.push_back(h);
        }
    }
    return out;
}

// Classical two-choice balls into bins: every bin is eligible. Draws follow
// the same consumption schedule as the library (pair index, shifted second
// index, one extra coin on equal loads) so the two can share a seed.
inline std::uint32_t two_choice_max_load(std::uint32_t bins, std::uint32_t balls, std::uint64_t seed) {
    cachelb::Rng rng(seed);
    std::vector<std::uint32_t> load(bins, 0);
    for (std::uint32_t i = 0; i < balls; ++i) {
        if (bins == 1) {
            ++load[0];
            continue;
        }
        const auto a = rng.uniform_index(bins);
        auto b = rng.uniform_index(bins - 1);
        if (b >= a) ++b;
        std::uint64_t pick;
        if (load[a] != load[b])
            pick = load[a] < load[b] ? a : b;
        else
            pick = rng.uniform_index(2) == 0 ? a : b;
        ++load[pick];
    }
    return *std::max_element(load.begin(), load.end());
}

// Configuration-graph edges by testing every pair directly.
inline std::set<std::pair<std::uint32_t, std::uint32_t>> config_edges(const cachelb::Placement& p,
                                                                      const cachelb::TorusGeometry& geo,
                                                                      int r) {
    std::set<std::pair<std::uint32_t, std::uint32_t>> edges;
    const std::uint32_t n = p.node_count();
    for (std::uint32_t u = 0; u < n; ++u)
        for (std::uint32_t v = u + 1; v < n; ++v) {
            if (geo.distance(cachelb::NodeId(u), cachelb::NodeId(v)) > 2 * r) continue;
            auto a = p.slots(cachelb::NodeId(u));
            auto b = p.slots(cachelb::NodeId(v));
            bool shared = false;
            for (auto f : a)
                if (std::find(b.begin(), b.end(), f) != b.end()) shared = true;
            if (shared) edges.emplace(u, v);
        }
    return edges;
}

}  // namespace oracle
