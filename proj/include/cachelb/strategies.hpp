#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cachelb/placement.hpp"
#include "cachelb/rng.hpp"
#include "cachelb/topology.hpp"
#include "cachelb/workload.hpp"

namespace cachelb {

enum class StrategyKind { NearestReplica, TwoChoices };
enum class Fallback { NearestGlobal, Reject };

std::string to_string(StrategyKind kind);
std::string to_string(Fallback fallback);
StrategyKind parse_strategy_kind(const std::string& s);
Fallback parse_fallback(const std::string& s);

struct StrategyConfig {
    StrategyKind kind = StrategyKind::NearestReplica;
    // Two-choices search radius; nullopt means unbounded.
    std::optional<int> radius;
    // What two-choices does when no replica lies inside the radius.
    Fallback fallback = Fallback::NearestGlobal;

    // Throws std::invalid_argument for a bounded radius < 1.
    void validate() const;
};

// Per-node counters T_i plus run totals.
struct LoadState {
    explicit LoadState(std::uint32_t n) : loads(n, 0) {}

    std::vector<std::uint32_t> loads;
    std::uint64_t served = 0;
    std::uint64_t fallbacks = 0;
    std::uint64_t rejected = 0;
    std::uint64_t hop_sum = 0;

    void assign(NodeId server, int hops) {
        ++loads[server.index];
        ++served;
        hop_sum += static_cast<std::uint64_t>(hops);
    }
};

struct Assignment {
    NodeId server;
    int hops = 0;
};

// How candidate servers are located. Both routes return the same ascending
// set; Auto picks the cheaper one from the replica count and the search area.
enum class SearchRoute { Auto, RingScan, ReplicaIndex };

struct NearestSet {
    std::vector<NodeId> nodes;  // ascending
    int distance = -1;          // -1 when the file has no replica
};

// All replica holders of `file` at minimum distance from `origin`.
NearestSet nearest_holders(NodeId origin, FileId file, const Placement& p,
                           const TorusGeometry& geo, SearchRoute route = SearchRoute::Auto);

// Holders of `file` inside the radius-r ball around origin (all holders when radius is nullopt),
// ascending, each node once.
std::vector<NodeId> holders_within(NodeId origin, FileId file, std::optional<int> radius,
                                   const Placement& p, const TorusGeometry& geo,
                                   SearchRoute route = SearchRoute::Auto);

// Nearest replica. Ties among equidistant holders take one uniform_index draw (no
// draw when the nearest holder is unique). Returns nullopt and counts a
// rejection when the file has no replica.
std::optional<Assignment> nearest_replica_assign(const Request& req, const Placement& p,
                                                 const TorusGeometry& geo, LoadState& state,
                                                 Rng& rng,
                                                 SearchRoute route = SearchRoute::Auto);

// Two choices within the radius. With c >= 2 candidates an unordered pair is
// drawn as a = uniform_index(c), b = uniform_index(c - 1) shifted past a; the
// less loaded member wins; equal loads take one more uniform_index(2) draw.
std::optional<Assignment> two_choice_assign(const Request& req, const Placement& p,
                                            const TorusGeometry& geo, const StrategyConfig& cfg,
                                            LoadState& state, Rng& rng,
                                            SearchRoute route = SearchRoute::Auto);

struct MetricsRecord {
    StrategyConfig strategy;
    std::uint32_t n = 0;
    std::uint32_t K = 0;
    std::uint32_t M = 0;
    double gamma = 0.0;
    std::uint64_t seed = 0;

    std::uint32_t max_load = 0;
    double comm_cost = 0.0;
    std::uint64_t served = 0;
    std::uint64_t fallbacks = 0;
    std::uint64_t rejected = 0;
    std::uint64_t requests = 0;
    // load_histogram[k] = number of nodes that ended with load k, k = 0..L.
    std::vector<std::uint64_t> load_histogram;
    double runtime_ms = 0.0;
};

// Processes the stream in order. `seed` seeds the tie-break / pair-sampling
// engine. Throws std::invalid_argument when stream, placement and geometry
// disagree on n, or a request names a file outside [1, K].
MetricsRecord run(const RequestStream& stream, const Placement& p, const TorusGeometry& geo,
                  const StrategyConfig& cfg, std::uint64_t seed);

// Same as run() but also hands back the final per-node loads.
MetricsRecord run(const RequestStream& stream, const Placement& p, const TorusGeometry& geo,
                  const StrategyConfig& cfg, std::uint64_t seed, LoadState& final_state);

}  // namespace cachelb
