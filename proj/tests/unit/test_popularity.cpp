#include "doctest.h"

#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "cachelb/placement.hpp"
#include "cachelb/popularity.hpp"
#include "cachelb/rng.hpp"
#include "oracles.hpp"

using namespace cachelb;

TEST_CASE("hash and engine reference vectors") {
    CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(derive_seed(1, "x", 0) != derive_seed(1, "y", 0));
    CHECK(derive_seed(1, "x", 0) != derive_seed(1, "x", 1));

    // mt19937_64 default seed: 10000th output
    Rng rng(5489);
    std::uint64_t v = 0;
    for (int i = 0; i < 10000; ++i) v = rng.next_u64();
    CHECK(v == 9981545732273789042ULL);
}

TEST_CASE("uniform_index is in range and unbiased") {
    Rng rng(7);
    std::vector<int> hist(3, 0);
    for (int i = 0; i < 300000; ++i) ++hist[rng.uniform_index(3)];
    for (int h : hist) CHECK(std::abs(h - 100000) < 1500);
    for (int i = 0; i < 1000; ++i) {
        const double u = rng.uniform01();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("make_profile examples") {
    const auto u4 = make_profile(4, PopularityKind::Uniform);
    CHECK(u4.pmf() == std::vector<double>{0.25, 0.25, 0.25, 0.25});

    const auto z2 = make_profile(2, PopularityKind::Zipf, 1.0);
    CHECK(z2.pmf()[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(z2.pmf()[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

    const auto z0 = make_profile(4, PopularityKind::Zipf, 0.0);
    CHECK(z0.pmf() == u4.pmf());

    CHECK_THROWS_AS(make_profile(0, PopularityKind::Uniform), std::invalid_argument);
    CHECK_THROWS_AS(make_profile(5, PopularityKind::Zipf, -0.5), std::invalid_argument);
    CHECK_THROWS_AS(make_profile(5, PopularityKind::Zipf, NAN), std::invalid_argument);
    CHECK_THROWS_AS(parse_popularity_kind("pareto"), std::invalid_argument);
}

TEST_CASE("pmf normalisation and Zipf monotonicity") {
    for (std::uint32_t K : {1u, 2u, 7u, 100u, 4096u, 100000u}) {
        for (double g : {0.0, 0.5, 0.8, 1.0, 1.5, 2.0, 2.5, 4.0}) {
            const auto p = make_profile(K, PopularityKind::Zipf, g);
            // compensated sum, so the check measures the pmf and not this loop
            long double sum = 0, carry = 0;
            for (double v : p.pmf()) {
                const long double y = v - carry;
                const long double t = sum + y;
                carry = (t - sum) - y;
                sum = t;
            }
            CHECK(std::abs(static_cast<double>(sum) - 1.0) <= 1e-12);
            CHECK(std::is_sorted(p.pmf().rbegin(), p.pmf().rend()));
            const double lambda = harmonic_lambda(K, g);
            CHECK(p.pmf()[0] == doctest::Approx(1.0 / lambda).epsilon(1e-12));
        }
    }
}

TEST_CASE("harmonic_lambda") {
    CHECK(harmonic_lambda(7, 0.0) == 7.0);
    CHECK(harmonic_lambda(4, 1.0) == doctest::Approx(25.0 / 12.0).epsilon(1e-15));
    double prev = 0.0;
    const double limit = M_PI * M_PI / 6.0;
    for (std::uint32_t K = 1; K <= 1u << 20; K *= 2) {
        const double v = harmonic_lambda(K, 2.0);
        CHECK(v > prev);
        CHECK(v < limit);
        prev = v;
    }
    CHECK(prev == doctest::Approx(limit).epsilon(1e-5));
}

TEST_CASE("place: single-file library") {
    const auto p = place(4, 3, make_profile(1, PopularityKind::Uniform), 11);
    for (FileId f : p.all_slots()) CHECK(f == 1);
    const auto r = p.replicas(1);
    CHECK(std::vector<NodeId>(r.begin(), r.end()) ==
          std::vector<NodeId>{NodeId(0), NodeId(1), NodeId(2), NodeId(3)});
    CHECK(p.all_slots().size() == 12);
}

TEST_CASE("place: per-file replica counts at M=1 are near n/K") {
    const std::uint32_t n = 1'000'000, K = 10;
    const auto p = place(n, 1, make_profile(K, PopularityKind::Uniform), 3);
    std::uint64_t total = 0;
    for (FileId f = 1; f <= K; ++f) {
        const double c = static_cast<double>(p.replicas(f).size());
        total += p.replicas(f).size();
        CHECK(std::abs(c - n / double(K)) <= 0.05 * n / K);
    }
    CHECK(total == n);
}

TEST_CASE("place: empirical frequencies inside the 4-sigma band") {
    const std::uint32_t n = 10000, M = 100, K = 50;
    for (auto [kind, g] : {std::pair{PopularityKind::Uniform, 0.0}, std::pair{PopularityKind::Zipf, 0.8}}) {
        const auto prof = make_profile(K, kind, g);
        const auto p = place(n, M, prof, 99);
        std::vector<double> count(K, 0.0);
        for (FileId f : p.all_slots()) count[f - 1] += 1;
        const double total = double(n) * M;
        for (std::uint32_t i = 0; i < K; ++i) {
            const double pi = prof.pmf()[i];
            const double band = 5.0 * std::sqrt(pi * (1 - pi) / total) * 4.0;
            CHECK(std::abs(count[i] / total - pi) <= band);
        }
    }
}

TEST_CASE("place is deterministic and the replica index matches the slots") {
    const auto prof = make_profile(30, PopularityKind::Zipf, 1.2);
    const auto a = place(400, 7, prof, 1234);
    const auto b = place(400, 7, prof, 1234);
    const auto c = place(400, 7, prof, 1235);
    CHECK(a == b);
    CHECK_FALSE(a == c);

    for (FileId f = 1; f <= 30; ++f) {
        std::vector<std::uint32_t> indexed;
        for (NodeId u : a.replicas(f)) indexed.push_back(u.index);
        CHECK(indexed == oracle::holders(a, f));
    }
    std::uint64_t copies = 0;
    for (std::uint32_t u = 0; u < 400; ++u) {
        CHECK(a.slots(NodeId(u)).size() == 7);
        for (FileId f = 1; f <= 30; ++f) {
            auto s = a.slots(NodeId(u));
            CHECK(a.holds(NodeId(u), f) == (std::find(s.begin(), s.end(), f) != s.end()));
        }
        copies += a.slots(NodeId(u)).size();
    }
    CHECK(copies == 400u * 7u);
}

TEST_CASE("distinct_count and overlap") {
    const Placement p(4, 4, 9,
                      {7, 7, 7, 7,   //
                       1, 2, 2, 5,   //
                       1, 2, 2, 2,   //
                       3, 4, 3, 4});
    CHECK(distinct_count(NodeId(0), p) == 1);
    CHECK(distinct_count(NodeId(1), p) == 3);

    const auto disjoint = overlap(NodeId(2), NodeId(3), p);
    CHECK(disjoint.count == 0);
    CHECK(disjoint.files.empty());

    const Placement q(2, 3, 9, {1, 2, 2, 2, 9, 9});
    const auto o = overlap(NodeId(0), NodeId(1), q);
    CHECK(o.count == 1);
    CHECK(o.files == std::vector<FileId>{2});
    CHECK_THROWS_AS(overlap(NodeId(1), NodeId(1), q), std::invalid_argument);

    const auto m1 = place(50, 1, make_profile(5, PopularityKind::Uniform), 5);
    for (std::uint32_t u = 0; u < 50; ++u) CHECK(distinct_count(NodeId(u), m1) == 1);
}

TEST_CASE("overlap never exceeds either distinct count") {
    const std::uint32_t n = 500, M = 20, K = 60;
    const auto p = place(n, M, make_profile(K, PopularityKind::Zipf, 0.7), 17);
    std::mt19937 pick(4);
    std::uniform_int_distribution<std::uint32_t> node(0, n - 1);
    int bad = 0;
    for (int i = 0; i < 10000; ++i) {
        const std::uint32_t u = node(pick);
        std::uint32_t v = node(pick);
        if (u == v) v = (v + 1) % n;
        const auto o = overlap(NodeId(u), NodeId(v), p);
        const auto tu = distinct_count(NodeId(u), p), tv = distinct_count(NodeId(v), p);
        if (o.count > std::min(tu, tv) || o.count != o.files.size()) ++bad;
        if (tu < 1 || tu > std::min(M, K)) ++bad;
        // brute force intersection of the raw slot lists
        std::set<FileId> su(p.slots(NodeId(u)).begin(), p.slots(NodeId(u)).end());
        std::set<FileId> both;
        for (FileId f : p.slots(NodeId(v)))
            if (su.count(f)) both.insert(f);
        if (std::vector<FileId>(both.begin(), both.end()) != o.files) ++bad;
    }
    CHECK(bad == 0);
}

TEST_CASE("placement validation") {
    CHECK_THROWS_AS(Placement(2, 2, 3, {1, 2, 3}), std::invalid_argument);
    CHECK_THROWS_AS(Placement(1, 2, 3, {1, 4}), std::invalid_argument);
    CHECK_THROWS_AS(Placement(1, 1, 3, {0}), std::invalid_argument);
    CHECK_THROWS_AS(place(0, 1, make_profile(2, PopularityKind::Uniform), 1), std::invalid_argument);
    CHECK_THROWS_AS(place(3, 0, make_profile(2, PopularityKind::Uniform), 1), std::invalid_argument);
}

TEST_CASE("snapshots round-trip") {
    const auto p = place(36, 5, make_profile(12, PopularityKind::Zipf, 1.0), 8);

    std::stringstream text;
    save_text(p, text);
    CHECK(text.str().rfind("36 5 12\n", 0) == 0);
    CHECK(load_text(text) == p);

    std::stringstream bin(std::ios::in | std::ios::out | std::ios::binary);
    save_binary(p, bin);
    CHECK(bin.str().substr(0, 8) == "CLBPLC01");
    CHECK(bin.str().size() == 8 + 24 + 36 * 5 * 4);
    CHECK(load_binary(bin) == p);

    std::stringstream junk("2 2 3\n1 2\n");
    CHECK_THROWS(load_text(junk));
}
