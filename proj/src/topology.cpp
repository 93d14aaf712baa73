#include "cachelb/topology.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>
#include <string>

namespace cachelb {

TorusGeometry::TorusGeometry(int side, bool wrap) : side_(side), wrap_(wrap) {
    if (side < 2) throw std::invalid_argument("side must be >= 2, got " + std::to_string(side));
    if (side > 65535) throw std::invalid_argument("side too large: " + std::to_string(side));
}

TorusGeometry TorusGeometry::from_nodes(std::int64_t n, bool wrap) {
    if (n < 4) throw std::invalid_argument("n must be >= 4, got " + std::to_string(n));
    auto side = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(n))));
    while (side * side > n) --side;
    while ((side + 1) * (side + 1) <= n) ++side;
    if (side * side != n)
        throw std::invalid_argument("n must be a perfect square, got " + std::to_string(n));
    return TorusGeometry(static_cast<int>(side), wrap);
}

int TorusGeometry::eccentricity(NodeId u) const noexcept {
    if (wrap_) return 2 * (side_ / 2);
    const Coord c = coord(u);
    return std::max(c.x, side_ - 1 - c.x) + std::max(c.y, side_ - 1 - c.y);
}

std::vector<NodeId> TorusGeometry::ring(NodeId u, int d) const {
    std::vector<NodeId> out;
    for_each_at_distance(u, d, [&](NodeId v) { out.push_back(v); });
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<NodeId> TorusGeometry::ball(NodeId u, int r) const {
    std::vector<NodeId> out;
    const int rmax = std::min(r, eccentricity(u));
    for (int d = 0; d <= rmax; ++d)
        for_each_at_distance(u, d, [&](NodeId v) { out.push_back(v); });
    std::sort(out.begin(), out.end());
    return out;
}

std::uint64_t TorusGeometry::ball_size(NodeId u, int r) const {
    if (r < 0) return 0;
    const Coord c = coord(u);
    int xlo, xhi, ylo, yhi;
    offset_range(c.x, xlo, xhi);
    offset_range(c.y, ylo, yhi);
    std::uint64_t total = 0;
    for (int dx = std::max(xlo, -r); dx <= std::min(xhi, r); ++dx) {
        const int rem = r - std::abs(dx);
        total += static_cast<std::uint64_t>(std::min(yhi, rem) - std::max(ylo, -rem) + 1);
    }
    return total;
}

std::vector<NodeId> TorusGeometry::neighbors(NodeId u) const {
    std::vector<NodeId> out;
    const Coord c = coord(u);
    auto push = [&](int x, int y) {
        if (wrap_) {
            out.push_back(node(wrap_coord(x), wrap_coord(y)));
        } else if (x >= 0 && x < side_ && y >= 0 && y < side_) {
            out.push_back(node(x, y));
        }
    };
    push(c.x - 1, c.y);
    push(c.x + 1, c.y);
    push(c.x, c.y - 1);
    push(c.x, c.y + 1);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<int> bfs_distance_oracle(NodeId u, const TorusGeometry& geo) {
    if (geo.side() > 64)
        throw std::invalid_argument("bfs_distance_oracle is limited to side <= 64");
    std::vector<int> dist(geo.size(), -1);
    std::deque<NodeId> queue{u};
    dist[u.index] = 0;
    while (!queue.empty()) {
        const NodeId v = queue.front();
        queue.pop_front();
        for (NodeId w : geo.neighbors(v)) {
            if (dist[w.index] >= 0) continue;
            dist[w.index] = dist[v.index] + 1;
            queue.push_back(w);
        }
    }
    return dist;
}

}  // namespace cachelb
