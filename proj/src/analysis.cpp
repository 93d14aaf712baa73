#include "cachelb/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace cachelb {

// ---------------------------------------------------------------------------
// Voronoi

std::uint32_t VoronoiTessellation::cell_size(NodeId center) const {
    const auto it = std::lower_bound(centers.begin(), centers.end(), center);
    if (it == centers.end() || *it != center) return 0;
    return cell_sizes[static_cast<std::size_t>(it - centers.begin())];
}

VoronoiTessellation voronoi(FileId file, const Placement& p, const TorusGeometry& geo, Rng& rng) {
    if (p.node_count() != geo.size())
        throw std::invalid_argument("voronoi: placement and geometry disagree on n");
    if (file < 1 || file > p.library_size()) throw std::invalid_argument("voronoi: file outside [1, K]");
    const auto holders = p.replicas(file);
    if (holders.empty()) throw UnservableFile(file);

    const std::uint32_t n = geo.size();
    VoronoiTessellation t;
    t.file = file;
    t.centers.assign(holders.begin(), holders.end());
    t.distance.assign(n, -1);

    // nearest[v]: ascending centres at distance t.distance[v]. A node's set is
    // the union of the sets of its neighbours one layer closer.
    std::vector<std::vector<NodeId>> nearest(n);
    std::vector<NodeId> frontier;
    for (NodeId c : holders) {
        t.distance[c.index] = 0;
        nearest[c.index] = {c};
        frontier.push_back(c);
    }
    std::vector<NodeId> next;
    std::vector<NodeId> merged;
    for (int layer = 1; !frontier.empty(); ++layer) {
        next.clear();
        for (NodeId v : frontier)
            geo.for_each_at_distance(v, 1, [&](NodeId w) {
                if (t.distance[w.index] < 0) {
                    t.distance[w.index] = layer;
                    next.push_back(w);
                }
            });
        for (NodeId w : next) {
            auto& set = nearest[w.index];
            geo.for_each_at_distance(w, 1, [&](NodeId v) {
                if (t.distance[v.index] != layer - 1) return;
                merged.clear();
                std::set_union(set.begin(), set.end(), nearest[v.index].begin(),
                               nearest[v.index].end(), std::back_inserter(merged));
                set.swap(merged);
            });
        }
        frontier.swap(next);
    }

    t.owner.resize(n);
    for (std::uint32_t v = 0; v < n; ++v) {
        const auto& set = nearest[v];
        t.owner[v] = set.size() == 1 ? set.front() : set[rng.uniform_index(set.size())];
    }

    t.cell_sizes.assign(t.centers.size(), 0);
    for (NodeId o : t.owner) {
        const auto it = std::lower_bound(t.centers.begin(), t.centers.end(), o);
        ++t.cell_sizes[static_cast<std::size_t>(it - t.centers.begin())];
    }
    return t;
}

namespace {

// Number of lattice lines spanned by the shortest arc (or interval) covering
// every coordinate in `coords`.
int covering_span(std::vector<int>& coords, int side, bool wrap) {
    std::sort(coords.begin(), coords.end());
    coords.erase(std::unique(coords.begin(), coords.end()), coords.end());
    if (coords.empty()) return 0;
    if (!wrap) return coords.back() - coords.front() + 1;
    int max_gap = coords.front() + side - coords.back();
    for (std::size_t i = 1; i < coords.size(); ++i) max_gap = std::max(max_gap, coords[i] - coords[i - 1]);
    return side - max_gap + 1;
}

}  // namespace

int bounding_box_side(std::span<const NodeId> nodes, const TorusGeometry& geo) {
    std::vector<int> xs, ys;
    xs.reserve(nodes.size());
    ys.reserve(nodes.size());
    for (NodeId v : nodes) {
        const Coord c = geo.coord(v);
        xs.push_back(c.x);
        ys.push_back(c.y);
    }
    return std::max(covering_span(xs, geo.side(), geo.wrap()), covering_span(ys, geo.side(), geo.wrap()));
}

std::vector<CellStats> max_cell_stats(const Placement& p, const TorusGeometry& geo, Rng& rng,
                                      std::span<const FileId> files) {
    std::vector<CellStats> out;
    out.reserve(files.size());
    for (FileId f : files) {
        const VoronoiTessellation t = voronoi(f, p, geo, rng);

        // Group members by cell: offsets follow t.centers order.
        std::vector<std::uint64_t> offsets(t.centers.size() + 1, 0);
        for (std::size_t i = 0; i < t.centers.size(); ++i) offsets[i + 1] = offsets[i] + t.cell_sizes[i];
        std::vector<NodeId> members(geo.size());
        std::vector<std::uint64_t> cursor(offsets.begin(), offsets.end() - 1);
        for (std::uint32_t v = 0; v < geo.size(); ++v) {
            const auto it = std::lower_bound(t.centers.begin(), t.centers.end(), t.owner[v]);
            const auto cell = static_cast<std::size_t>(it - t.centers.begin());
            members[cursor[cell]++] = NodeId(v);
        }

        CellStats s;
        s.file = f;
        s.cell_count = static_cast<std::uint32_t>(t.centers.size());
        std::size_t largest = 0;
        for (std::size_t i = 0; i < t.centers.size(); ++i) {
            const std::span<const NodeId> cell(members.data() + offsets[i], members.data() + offsets[i + 1]);
            s.max_bbox_side = std::max(s.max_bbox_side, bounding_box_side(cell, geo));
            if (t.cell_sizes[i] > t.cell_sizes[largest]) largest = i;
        }
        s.max_cell_size = t.cell_sizes[largest];
        s.largest_center = t.centers[largest];
        const std::span<const NodeId> cell(members.data() + offsets[largest],
                                           members.data() + offsets[largest + 1]);
        s.largest_bbox_side = bounding_box_side(cell, geo);
        for (NodeId v : cell) s.largest_radius = std::max(s.largest_radius, geo.distance(v, s.largest_center));
        out.push_back(s);
    }
    return out;
}

void write_csv(const VoronoiTessellation& t, const TorusGeometry& geo, std::ostream& out) {
    out << "node,x,y,owner,owner_x,owner_y,distance\n";
    for (std::uint32_t v = 0; v < t.owner.size(); ++v) {
        const Coord c = geo.coord(NodeId(v));
        const Coord o = geo.coord(t.owner[v]);
        out << v << ',' << c.x << ',' << c.y << ',' << t.owner[v].index << ',' << o.x << ',' << o.y << ','
            << t.distance[v] << '\n';
    }
}

// ---------------------------------------------------------------------------
// Configuration graph

ConfigGraph::ConfigGraph(std::uint32_t n, std::vector<std::pair<NodeId, NodeId>> edges) : n_(n) {
    for (auto& [u, v] : edges) {
        if (u == v) throw std::invalid_argument("ConfigGraph: self-loop");
        if (u.index >= n || v.index >= n) throw std::invalid_argument("ConfigGraph: node out of range");
        if (v < u) std::swap(u, v);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
    for (const auto& [u, v] : edges) {
        ++offsets_[u.index + 1];
        ++offsets_[v.index + 1];
    }
    for (std::uint32_t i = 0; i < n; ++i) offsets_[i + 1] += offsets_[i];
    neighbors_.resize(offsets_.back());
    std::vector<std::uint64_t> cursor(offsets_.begin(), offsets_.end() - 1);
    for (const auto& [u, v] : edges) {
        neighbors_[cursor[u.index]++] = v;
        neighbors_[cursor[v.index]++] = u;
    }
    for (std::uint32_t i = 0; i < n; ++i)
        std::sort(neighbors_.begin() + static_cast<std::ptrdiff_t>(offsets_[i]),
                  neighbors_.begin() + static_cast<std::ptrdiff_t>(offsets_[i + 1]));
}

std::vector<std::uint32_t> ConfigGraph::degrees() const {
    std::vector<std::uint32_t> d(n_);
    for (std::uint32_t u = 0; u < n_; ++u) d[u] = degree(NodeId(u));
    return d;
}

bool ConfigGraph::adjacent(NodeId u, NodeId v) const {
    auto nb = neighbors(u);
    return std::binary_search(nb.begin(), nb.end(), v);
}

namespace {

bool shares_file(std::span<const FileId> a, std::span<const FileId> b) {
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
        if (*i < *j)
            ++i;
        else if (*j < *i)
            ++j;
        else
            return true;
    }
    return false;
}

}  // namespace

ConfigGraph build_config_graph(const Placement& p, const TorusGeometry& geo, int r, GraphRoute route) {
    if (r < 1) throw std::invalid_argument("build_config_graph: r must be >= 1");
    if (p.node_count() != geo.size())
        throw std::invalid_argument("build_config_graph: placement and geometry disagree on n");
    const std::uint32_t n = geo.size();
    const int reach = 2 * r;

    if (route == GraphRoute::Auto) {
        std::uint64_t pair_work = 0;
        for (FileId f = 1; f <= p.library_size(); ++f) {
            const std::uint64_t s = p.replicas(f).size();
            pair_work += s * s / 2;
        }
        const std::uint64_t scan_work = static_cast<std::uint64_t>(n) * geo.ball_size(NodeId(0), reach);
        route = pair_work <= scan_work ? GraphRoute::ReplicaIndex : GraphRoute::BallScan;
    }

    std::vector<std::pair<NodeId, NodeId>> edges;
    if (route == GraphRoute::ReplicaIndex) {
        for (FileId f = 1; f <= p.library_size(); ++f) {
            const auto s = p.replicas(f);
            for (std::size_t i = 0; i < s.size(); ++i)
                for (std::size_t j = i + 1; j < s.size(); ++j)
                    if (geo.distance(s[i], s[j]) <= reach) edges.emplace_back(s[i], s[j]);
        }
    } else {
        for (std::uint32_t u = 0; u < n; ++u) {
            const NodeId a(u);
            const int rmax = std::min(reach, geo.eccentricity(a));
            for (int d = 1; d <= rmax; ++d)
                geo.for_each_at_distance(a, d, [&](NodeId b) {
                    if (a < b && shares_file(p.distinct_files(a), p.distinct_files(b))) edges.emplace_back(a, b);
                });
        }
    }
    return ConfigGraph(n, std::move(edges));
}

void write_degree_histogram_csv(const ConfigGraph& g, std::ostream& out) {
    const auto deg = g.degrees();
    const std::uint32_t top = deg.empty() ? 0 : *std::max_element(deg.begin(), deg.end());
    std::vector<std::uint64_t> hist(static_cast<std::size_t>(top) + 1, 0);
    for (auto d : deg) ++hist[d];
    out << "degree,count\n";
    for (std::uint32_t d = 0; d <= top; ++d)
        if (hist[d] != 0) out << d << ',' << hist[d] << '\n';
}

// ---------------------------------------------------------------------------
// Goodness

GoodnessReport goodness_check(const Placement& p, double alpha) {
    if (!(alpha > 0.0 && alpha < 0.5)) throw std::invalid_argument("goodness_check: alpha must lie in (0, 1/2)");
    const double delta = (1.0 - alpha) / 3.0;
    const auto mu = static_cast<std::uint32_t>(std::ceil(5.0 / (1.0 - 2.0 * alpha)));
    return goodness_check(p, delta, mu);
}

GoodnessReport goodness_check(const Placement& p, double delta, std::uint32_t mu) {
    GoodnessReport rep;
    rep.delta = delta;
    rep.mu = mu;
    const double min_distinct = delta * p.cache_size();
    for (std::uint32_t u = 0; u < p.node_count(); ++u)
        if (distinct_count(NodeId(u), p) < min_distinct) rep.sparse_nodes.push_back(NodeId(u));

    // Each overlapping pair is examined once: under the smallest file they
    // share.
    for (FileId f = 1; f <= p.library_size(); ++f) {
        const auto s = p.replicas(f);
        for (std::size_t i = 0; i < s.size(); ++i) {
            const auto a = p.distinct_files(s[i]);
            for (std::size_t j = i + 1; j < s.size(); ++j) {
                const auto b = p.distinct_files(s[j]);
                auto ia = a.begin();
                auto ib = b.begin();
                std::uint32_t shared = 0;
                bool first = true;
                bool owner = true;
                while (ia != a.end() && ib != b.end()) {
                    if (*ia < *ib) {
                        ++ia;
                    } else if (*ib < *ia) {
                        ++ib;
                    } else {
                        if (first && *ia != f) {
                            owner = false;
                            break;
                        }
                        first = false;
                        ++shared;
                        ++ia;
                        ++ib;
                    }
                }
                if (owner && shared >= mu) rep.heavy_pairs.push_back({s[i], s[j], shared});
            }
        }
    }
    std::sort(rep.heavy_pairs.begin(), rep.heavy_pairs.end(),
              [](const PairViolation& x, const PairViolation& y) {
                  return x.u != y.u ? x.u < y.u : x.v < y.v;
              });
    rep.pass = rep.sparse_nodes.empty() && rep.heavy_pairs.empty();
    return rep;
}

// ---------------------------------------------------------------------------
// Cost predictors

double predicted_cost(const PopularityProfile& profile, std::uint32_t M) {
    if (M < 1) throw std::invalid_argument("predicted_cost: M must be >= 1");
    double total = 0.0;
    for (double pj : profile.pmf()) {
        if (pj <= 0.0) continue;
        const double hit = -std::expm1(static_cast<double>(M) * std::log1p(-pj));
        total += pj / std::sqrt(hit);
    }
    return total;
}

CostRegime cost_regime(std::uint32_t K, std::uint32_t M, double gamma) {
    if (!(gamma >= 0.0)) throw std::invalid_argument("cost_regime: gamma must be >= 0");
    if (K < 1 || M < 1) throw std::invalid_argument("cost_regime: K and M must be >= 1");
    constexpr double eps = 1e-12;
    const double k = K;
    const double sqrt_m = std::sqrt(static_cast<double>(M));
    const double log_k = std::log(k);

    CostRegime out;
    if (gamma < eps) {
        out = {"uniform", std::sqrt(k / M)};
    } else if (gamma < 1.0 - eps) {
        out = {"0<gamma<1", std::sqrt(k / M)};
    } else if (gamma <= 1.0 + eps) {
        out = {"gamma=1", K > 1 ? std::sqrt(k / (M * log_k)) : 1.0 / sqrt_m};
    } else if (gamma < 2.0 - eps) {
        out = {"1<gamma<2", std::pow(k, 1.0 - gamma / 2.0) / sqrt_m};
    } else if (gamma <= 2.0 + eps) {
        out = {"gamma=2", K > 1 ? log_k / sqrt_m : 1.0 / sqrt_m};
    } else {
        out = {"gamma>2", 1.0 / sqrt_m};
    }
    return out;
}

}  // namespace cachelb
