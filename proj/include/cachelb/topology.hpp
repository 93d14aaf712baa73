#pragma once

#include <cstdint>
#include <compare>
#include <functional>
#include <vector>

namespace cachelb {

struct NodeId {
    std::uint32_t index = 0;

    constexpr NodeId() = default;
    constexpr explicit NodeId(std::uint32_t i) : index(i) {}

    friend constexpr auto operator<=>(NodeId, NodeId) = default;
};

struct Coord {
    int x = 0;
    int y = 0;
    friend constexpr bool operator==(Coord, Coord) = default;
};

// sqrt(n) x sqrt(n) lattice, with wraparound (torus) or bounded (grid).
// Node index = y * side + x.
class TorusGeometry {
public:
    explicit TorusGeometry(int side, bool wrap = true);

    // Throws std::invalid_argument unless n is a perfect square >= 4.
    static TorusGeometry from_nodes(std::int64_t n, bool wrap = true);

    int side() const noexcept { return side_; }
    bool wrap() const noexcept { return wrap_; }
    std::uint32_t size() const noexcept { return static_cast<std::uint32_t>(side_) * side_; }

    bool contains(NodeId u) const noexcept { return u.index < size(); }
    Coord coord(NodeId u) const noexcept {
        return {static_cast<int>(u.index % side_), static_cast<int>(u.index / side_)};
    }
    NodeId node(Coord c) const noexcept {
        return NodeId(static_cast<std::uint32_t>(c.y * side_ + c.x));
    }
    NodeId node(int x, int y) const noexcept { return node(Coord{x, y}); }

    int axis_distance(int a, int b) const noexcept {
        int d = a > b ? a - b : b - a;
        if (wrap_ && side_ - d < d) d = side_ - d;
        return d;
    }

    int distance(NodeId u, NodeId v) const noexcept {
        const Coord a = coord(u), b = coord(v);
        return axis_distance(a.x, b.x) + axis_distance(a.y, b.y);
    }

    // Largest distance attained from any node (torus) / from u (grid).
    int eccentricity(NodeId u) const noexcept;

    // Calls fn(NodeId) once for every node at distance exactly d from u.
    // O(d) work, no allocation; order is deterministic but not sorted.
    template <class Fn>
    void for_each_at_distance(NodeId u, int d, Fn&& fn) const;

    // Nodes at distance exactly d, ascending index.
    std::vector<NodeId> ring(NodeId u, int d) const;

    // Ball of radius r around u: nodes at distance <= r, including u, ascending index.
    std::vector<NodeId> ball(NodeId u, int r) const;

    // Ball size without materializing the set.
    std::uint64_t ball_size(NodeId u, int r) const;

    // 4-neighbourhood (deduplicated for side 2 tori).
    std::vector<NodeId> neighbors(NodeId u) const;

private:
    // Offsets along one axis relative to coordinate c, as a closed range
    // [lo, hi] in which every reachable coordinate appears exactly once and
    // |offset| is the axis distance.
    void offset_range(int c, int& lo, int& hi) const noexcept {
        if (wrap_) {
            lo = -((side_ - 1) / 2);
            hi = side_ / 2;
        } else {
            lo = -c;
            hi = side_ - 1 - c;
        }
    }

    int wrap_coord(int c) const noexcept {
        c %= side_;
        return c < 0 ? c + side_ : c;
    }

    int side_;
    bool wrap_;
};

template <class Fn>
void TorusGeometry::for_each_at_distance(NodeId u, int d, Fn&& fn) const {
    if (d < 0) return;
    const Coord c = coord(u);
    int xlo, xhi, ylo, yhi;
    offset_range(c.x, xlo, xhi);
    offset_range(c.y, ylo, yhi);
    const int from = xlo > -d ? xlo : -d;
    const int to = xhi < d ? xhi : d;
    for (int dx = from; dx <= to; ++dx) {
        const int rem = d - (dx < 0 ? -dx : dx);
        const int x = wrap_coord(c.x + dx);
        if (rem == 0) {
            fn(node(x, c.y));
            continue;
        }
        if (-rem >= ylo) fn(node(x, wrap_coord(c.y - rem)));
        if (rem <= yhi) fn(node(x, wrap_coord(c.y + rem)));
    }
}

// Breadth-first distances from u over the 4-neighbour adjacency. Test oracle
// only: throws std::invalid_argument for side > 64.
std::vector<int> bfs_distance_oracle(NodeId u, const TorusGeometry& geo);

}  // namespace cachelb

template <>
struct std::hash<cachelb::NodeId> {
    std::size_t operator()(cachelb::NodeId u) const noexcept { return u.index; }
};
