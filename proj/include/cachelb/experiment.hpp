#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cachelb/strategies.hpp"

#include <json.hpp>

namespace cachelb {

// A sweep entry that may depend on the node count: a constant, a power rule
// "n^c" (rounded up), "n" itself, or "unbounded" (radius only).
struct Quantity {
    enum class Kind { Constant, Power, Unbounded };
    Kind kind = Kind::Constant;
    double value = 0.0;  // constant, or exponent c for Power

    static Quantity parse(const nlohmann::json& j);
    // nullopt for Unbounded.
    std::optional<std::int64_t> resolve(std::int64_t n) const;
    std::string to_string() const;
};

struct ExperimentSpec {
    std::string name;
    std::vector<std::int64_t> nodes;             // n values (perfect squares)
    bool wrap = true;
    std::vector<Quantity> library_sizes;         // K
    std::vector<Quantity> cache_sizes;           // M
    PopularityKind popularity = PopularityKind::Uniform;
    std::vector<double> gammas{0.0};
    std::vector<StrategyKind> strategies{StrategyKind::NearestReplica};
    std::vector<Quantity> radii;                 // two-choices only; empty = unbounded
    Fallback fallback = Fallback::NearestGlobal;
    Quantity n_requests{Quantity::Kind::Power, 1.0};
    std::uint32_t replications = 1;
    std::uint64_t base_seed = 1;
    std::uint64_t budget = 1'000'000;
    bool record_runtime = false;

    std::string csv_path;
    std::string aggregate_path;
    std::string svg_path;
    std::optional<nlohmann::json> plot;

    // Throws std::invalid_argument describing the first problem found.
    void validate() const;
};

ExperimentSpec parse_spec(const nlohmann::json& j);
ExperimentSpec load_spec(const std::filesystem::path& path);

// One concrete point of the sweep grid.
struct CellConfig {
    std::uint32_t n = 0;
    std::uint32_t K = 0;
    std::uint32_t M = 0;
    double gamma = 0.0;
    std::uint32_t n_requests = 0;
    StrategyConfig strategy;
};

// Expands the grid in a fixed order: n, K, M, gamma, strategy, radius.
std::vector<CellConfig> expand_grid(const ExperimentSpec& spec);

struct AggregateRow {
    CellConfig config;
    std::uint32_t runs = 0;
    double mean_max_load = 0, se_max_load = 0;
    double mean_comm_cost = 0, se_comm_cost = 0;
    double mean_fallbacks = 0, mean_rejected = 0;
};

struct ExperimentResult {
    std::vector<CellConfig> configs;
    // runs[c * replications + rep]
    std::vector<MetricsRecord> runs;
    std::vector<AggregateRow> aggregates;
    // Runs where served + rejected != requests or sum of loads != served.
    std::uint64_t conservation_violations = 0;
};

struct RunOptions {
    unsigned threads = 0;  // 0: CACHELB_THREADS or hardware concurrency
};

unsigned resolve_thread_count(unsigned requested);

// Replication `rep` derives run_seed = derive_seed(base_seed, "replication",
// rep); the placement, workload and strategy engines of every grid point in
// that replication use run_seed's "placement" / "workload" / "strategy"
// substreams, so strategies are compared on identical placements and streams.
ExperimentResult run_experiment(const ExperimentSpec& spec, const RunOptions& options = {});

inline constexpr const char* kRunsCsvHeader =
    "strategy,n,K,M,r,gamma,seed,max_load,comm_cost,served,fallbacks,rejected,runtime_ms";

void write_runs_csv(const ExperimentResult& result, bool record_runtime, std::ostream& out);
void write_aggregate_csv(const ExperimentResult& result, std::ostream& out);

std::string format_radius(const StrategyConfig& cfg);
std::string format_number(double v);

}  // namespace cachelb
