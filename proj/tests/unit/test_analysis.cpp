#include "doctest.h"

#include <cmath>
#include <numeric>
#include <sstream>

#include "cachelb/analysis.hpp"
#include "oracles.hpp"

using namespace cachelb;

namespace {

Placement with_holders(const TorusGeometry& geo, std::vector<NodeId> holders) {
    std::vector<FileId> slots(geo.size(), 2);
    for (NodeId h : holders) slots[h.index] = 1;
    return Placement(geo.size(), 1, 2, std::move(slots));
}

}  // namespace

TEST_CASE("voronoi: one holder owns everything") {
    const TorusGeometry geo(6);
    const auto p = with_holders(geo, {geo.node(2, 3)});
    Rng rng(1);
    const auto t = voronoi(1, p, geo, rng);
    REQUIRE(t.centers.size() == 1);
    CHECK(t.cell_sizes == std::vector<std::uint32_t>{36});
    for (std::uint32_t v = 0; v < 36; ++v) {
        CHECK(t.owner[v] == geo.node(2, 3));
        CHECK(t.distance[v] == geo.distance(NodeId(v), geo.node(2, 3)));
    }
}

TEST_CASE("voronoi: two antipodal holders on the 4x4 torus") {
    const TorusGeometry geo(4);
    const NodeId a = geo.node(0, 0), b = geo.node(2, 2);
    const auto p = with_holders(geo, {a, b});
    double sum_a = 0;
    const int seeds = 4000;
    for (int s = 0; s < seeds; ++s) {
        Rng rng(s);
        const auto t = voronoi(1, p, geo, rng);
        CHECK(t.cell_sizes[0] + t.cell_sizes[1] == 16);
        CHECK(t.owner[a.index] == a);
        CHECK(t.owner[b.index] == b);
        sum_a += t.cell_size(a);
    }
    CHECK(sum_a / seeds == doctest::Approx(8.0).epsilon(0.01));
}

TEST_CASE("voronoi owners are nearest holders (brute force)") {
    for (int side : {5, 8, 12}) {
        for (bool wrap : {true, false}) {
            const TorusGeometry geo(side, wrap);
            const auto d = oracle::all_pairs(side, wrap);
            const auto p = place(geo.size(), 2, make_profile(10, PopularityKind::Uniform), side);
            Rng rng(side * 3 + wrap);
            bool ok = true;
            for (FileId f = 1; f <= 10; ++f) {
                const auto hs = oracle::holders(p, f);
                if (hs.empty()) {
                    CHECK_THROWS_AS(voronoi(f, p, geo, rng), UnservableFile);
                    continue;
                }
                const auto t = voronoi(f, p, geo, rng);
                if (std::accumulate(t.cell_sizes.begin(), t.cell_sizes.end(), 0u) != geo.size()) ok = false;
                for (std::uint32_t v = 0; v < geo.size(); ++v) {
                    const auto best = oracle::nearest(d[v], hs);
                    if (t.distance[v] != best.distance) ok = false;
                    if (std::find(best.nodes.begin(), best.nodes.end(), t.owner[v].index) == best.nodes.end()) ok = false;
                }
                for (auto h : hs)
                    if (t.owner[h] != NodeId(h)) ok = false;
            }
            CHECK(ok);
        }
    }
}

TEST_CASE("voronoi tie-break is uniform") {
    const TorusGeometry geo(5);
    const auto p = with_holders(geo, {geo.node(0, 1), geo.node(1, 0)});
    int first = 0;
    const int seeds = 10000;
    Rng rng(12);
    for (int s = 0; s < seeds; ++s) {
        const auto t = voronoi(1, p, geo, rng);
        if (t.owner[geo.node(0, 0).index] == geo.node(0, 1)) ++first;
    }
    CHECK(double(first) / seeds == doctest::Approx(0.5).epsilon(0.06));
}

TEST_CASE("bounding boxes") {
    const TorusGeometry t(10), g(10, false);
    const std::vector<NodeId> one{t.node(3, 3)};
    CHECK(bounding_box_side(one, t) == 1);
    const std::vector<NodeId> wrapped{t.node(0, 0), t.node(9, 0)};
    CHECK(bounding_box_side(wrapped, t) == 2);
    CHECK(bounding_box_side(wrapped, g) == 10);
    const std::vector<NodeId> tall{t.node(1, 1), t.node(2, 5)};
    CHECK(bounding_box_side(tall, t) == 5);
}

TEST_CASE("max_cell_stats") {
    const TorusGeometry geo(9);
    {
        const Placement p(81, 1, 1, std::vector<FileId>(81, 1));
        Rng rng(1);
        const std::vector<FileId> files{1};
        const auto st = max_cell_stats(p, geo, rng, files);
        CHECK(st[0].max_cell_size == 1);
        CHECK(st[0].cell_count == 81);
    }
    {
        const auto p = with_holders(geo, {geo.node(4, 4)});
        Rng rng(1);
        const std::vector<FileId> files{1};
        const auto st = max_cell_stats(p, geo, rng, files);
        CHECK(st[0].max_cell_size == 81);
        CHECK(st[0].largest_bbox_side == 9);
        CHECK(st[0].largest_radius == 8);
    }
    const TorusGeometry big(30);
    const auto p = place(big.size(), 3, make_profile(25, PopularityKind::Uniform), 4);
    std::vector<FileId> files;
    for (FileId f = 1; f <= 25; ++f)
        if (!p.replicas(f).empty()) files.push_back(f);
    Rng rng(2);
    for (const auto& s : max_cell_stats(p, big, rng, files)) {
        CHECK(s.largest_bbox_side <= 2 * s.largest_radius + 1);
        CHECK(s.max_bbox_side >= s.largest_bbox_side);
        CHECK(s.cell_count == p.replicas(s.file).size());
    }
}

TEST_CASE("config graph: small cases") {
    const TorusGeometry t2(2);
    const Placement all(4, 1, 1, {1, 1, 1, 1});
    const auto g = build_config_graph(all, t2, 1);
    CHECK(g.edge_count() == 6);
    for (std::uint32_t u = 0; u < 4; ++u) CHECK(g.degree(NodeId(u)) == 3);

    const TorusGeometry t3(3);
    std::vector<FileId> slots;
    for (std::uint32_t u = 0; u < 9; ++u) slots.push_back(u + 1);
    const Placement disjoint(9, 1, 9, slots);
    CHECK(build_config_graph(disjoint, t3, 5).edge_count() == 0);

    CHECK_THROWS_AS(build_config_graph(all, t2, 0), std::invalid_argument);
}

TEST_CASE("config graph matches the pairwise oracle") {
    for (int side : {6, 10, 13}) {
        for (bool wrap : {true, false}) {
            const TorusGeometry geo(side, wrap);
            const auto p = place(geo.size(), 3, make_profile(40, PopularityKind::Zipf, 0.5), side + wrap);
            for (int r : {1, 2, 4}) {
                const auto expect = oracle::config_edges(p, geo, r);
                for (auto route : {GraphRoute::Auto, GraphRoute::BallScan, GraphRoute::ReplicaIndex}) {
                    const auto g = build_config_graph(p, geo, r, route);
                    std::set<std::pair<std::uint32_t, std::uint32_t>> got;
                    bool symmetric = true;
                    std::uint64_t degree_sum = 0;
                    for (std::uint32_t u = 0; u < geo.size(); ++u) {
                        degree_sum += g.degree(NodeId(u));
                        for (NodeId v : g.neighbors(NodeId(u))) {
                            if (v == NodeId(u)) symmetric = false;
                            if (!g.adjacent(v, NodeId(u))) symmetric = false;
                            if (u < v.index) got.emplace(u, v.index);
                        }
                    }
                    CHECK(symmetric);
                    CHECK(got == expect);
                    CHECK(g.edge_count() == expect.size());
                    CHECK(degree_sum == 2 * g.edge_count());
                }
            }
        }
    }
}

TEST_CASE("degree histogram csv") {
    const TorusGeometry t2(2);
    const Placement all(4, 1, 1, {1, 1, 1, 1});
    std::ostringstream out;
    write_degree_histogram_csv(build_config_graph(all, t2, 1), out);
    CHECK(out.str() == "degree,count\n3,4\n");
}

TEST_CASE("goodness: forced failures") {
    // alpha = 0.3: delta = 7/30, mu = 13
    const Placement one_file(2, 6, 10, {4, 4, 4, 4, 4, 4, 1, 2, 3, 5, 6, 7});
    const auto rep = goodness_check(one_file, 0.3);
    CHECK(rep.delta == doctest::Approx(0.7 / 3.0));
    CHECK(rep.mu == 13);
    CHECK_FALSE(rep.pass);
    CHECK(rep.sparse_nodes == std::vector<NodeId>{NodeId(0)});

    // two nodes with the same mu distinct files; alpha = 0.05 gives mu = 6
    const Placement twins(2, 6, 10, {1, 2, 3, 4, 5, 6, 6, 5, 4, 3, 2, 1});
    const auto rep2 = goodness_check(twins, 0.05);
    CHECK(rep2.mu == 6);
    CHECK_FALSE(rep2.pass);
    REQUIRE(rep2.heavy_pairs.size() == 1);
    CHECK(rep2.heavy_pairs[0].shared == 6);

    CHECK_THROWS_AS(goodness_check(twins, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(goodness_check(twins, 0.5), std::invalid_argument);
}

TEST_CASE("goodness agrees with an all-pairs scan") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto p = place(144, 6, make_profile(20, PopularityKind::Uniform), seed);
        const double delta = 0.6;
        const std::uint32_t mu = 4;
        const auto rep = goodness_check(p, delta, mu);
        std::vector<NodeId> sparse;
        std::set<std::pair<std::uint32_t, std::uint32_t>> heavy;
        for (std::uint32_t u = 0; u < 144; ++u) {
            if (distinct_count(NodeId(u), p) < delta * 6) sparse.push_back(NodeId(u));
            for (std::uint32_t v = u + 1; v < 144; ++v)
                if (overlap(NodeId(u), NodeId(v), p).count >= mu) heavy.emplace(u, v);
        }
        std::set<std::pair<std::uint32_t, std::uint32_t>> got;
        for (const auto& pv : rep.heavy_pairs) got.emplace(std::min(pv.u.index, pv.v.index), std::max(pv.u.index, pv.v.index));
        CHECK(rep.sparse_nodes == sparse);
        CHECK(got == heavy);
        CHECK(rep.heavy_pairs.size() == heavy.size());
        CHECK(rep.pass == (sparse.empty() && heavy.empty()));
    }
}

TEST_CASE("goodness overlap clause is vacuous when mu exceeds M") {
    const auto p = place(400, 5, make_profile(3, PopularityKind::Uniform), 9);
    const auto rep = goodness_check(p, 1e-6, 6);
    CHECK(rep.heavy_pairs.empty());
}

TEST_CASE("predicted_cost") {
    const auto u100 = make_profile(100, PopularityKind::Uniform);
    CHECK(predicted_cost(u100, 1) == doctest::Approx(10.0).epsilon(1e-12));
    // 1 / sqrt(1 - 0.99^100)
    CHECK(predicted_cost(u100, 100) == doctest::Approx(1.2559323).epsilon(1e-6));

    for (std::uint32_t K : {10u, 100u, 1000u}) {
        const auto prof = make_profile(K, PopularityKind::Uniform);
        double prev = INFINITY;
        for (std::uint32_t M = 1; M <= K; ++M) {
            const double c = predicted_cost(prof, M);
            CHECK(c < prev);
            prev = c;
        }
    }

    for (std::uint32_t K : {100u, 1000u, 10000u, 100000u}) {
        const auto prof = make_profile(K, PopularityKind::Uniform);
        for (std::uint32_t M = 1; M <= K / 10; M = M * 3 + 1) {
            const double ratio = predicted_cost(prof, M) / std::sqrt(double(K) / M);
            CHECK(ratio >= 0.9);
            CHECK(ratio <= 1.1);
        }
        const double ratio = predicted_cost(prof, K / 10) / std::sqrt(10.0);
        CHECK(ratio >= 0.9);
        CHECK(ratio <= 1.1);
    }
}

TEST_CASE("cost_regime") {
    const auto half = cost_regime(400, 4, 0.5);
    CHECK(half.label == "0<gamma<1");
    CHECK(half.leading_term == doctest::Approx(10.0));

    const auto two = cost_regime(400, 4, 2.0);
    CHECK(two.label == "gamma=2");
    CHECK(two.leading_term == doctest::Approx(std::log(400.0) / 2.0));

    const auto three = cost_regime(400, 4, 3.0);
    CHECK(three.label == "gamma>2");
    CHECK(three.leading_term == doctest::Approx(0.5));
    CHECK(cost_regime(100000, 4, 3.0).leading_term == three.leading_term);

    CHECK(cost_regime(400, 4, 0.0).label == "uniform");
    CHECK(cost_regime(400, 4, 1.0).leading_term == doctest::Approx(std::sqrt(400.0 / (4 * std::log(400.0)))));
    CHECK(cost_regime(400, 4, 1.5).leading_term == doctest::Approx(std::pow(400.0, 0.25) / 2.0));
    CHECK(cost_regime(400, 4, 1.5).label == "1<gamma<2");
}
