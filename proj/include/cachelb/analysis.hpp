#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cachelb/placement.hpp"
#include "cachelb/popularity.hpp"
#include "cachelb/rng.hpp"
#include "cachelb/topology.hpp"

namespace cachelb {

// Raised when an operation needs a replica of a file that nobody caches.
class UnservableFile : public std::runtime_error {
public:
    explicit UnservableFile(FileId f)
        : std::runtime_error("file " + std::to_string(f) + " has no replica"), file_(f) {}
    FileId file() const noexcept { return file_; }

private:
    FileId file_;
};

// ---------------------------------------------------------------------------
// Voronoi tessellation of the lattice by nearest holder of one file.

struct VoronoiTessellation {
    FileId file = 0;
    std::vector<NodeId> owner;               // per node: the centre serving it
    std::vector<int> distance;               // per node: hops to its owner
    std::vector<NodeId> centers;             // holders of the file, ascending
    std::vector<std::uint32_t> cell_sizes;   // aligned with centers

    std::uint32_t cell_size(NodeId center) const;
};

// Multi-source BFS from every holder. Each node carries the set of its
// equidistant nearest holders; owners are then drawn in ascending node order,
// one uniform_index per node with more than one candidate.
VoronoiTessellation voronoi(FileId file, const Placement& p, const TorusGeometry& geo, Rng& rng);

struct CellStats {
    FileId file = 0;
    std::uint32_t cell_count = 0;
    std::uint32_t max_cell_size = 0;
    NodeId largest_center;
    int largest_bbox_side = 0;    // bounding sub-grid side of the largest cell
    int largest_radius = 0;       // max hops from that centre to its members
    int max_bbox_side = 0;        // over every cell of this file
};

// Side of the smallest axis-aligned (torus-aware) sub-grid covering `nodes`.
int bounding_box_side(std::span<const NodeId> nodes, const TorusGeometry& geo);

std::vector<CellStats> max_cell_stats(const Placement& p, const TorusGeometry& geo, Rng& rng,
                                      std::span<const FileId> files);

void write_csv(const VoronoiTessellation& t, const TorusGeometry& geo, std::ostream& out);

// ---------------------------------------------------------------------------
// Configuration graph H: u ~ v iff they share a cached file and d(u, v) <= 2r.

class ConfigGraph {
public:
    ConfigGraph(std::uint32_t n, std::vector<std::pair<NodeId, NodeId>> edges);

    std::uint32_t node_count() const noexcept { return n_; }
    std::uint64_t edge_count() const noexcept { return neighbors_.size() / 2; }
    std::span<const NodeId> neighbors(NodeId u) const {
        return {neighbors_.data() + offsets_[u.index], neighbors_.data() + offsets_[u.index + 1]};
    }
    std::uint32_t degree(NodeId u) const {
        return static_cast<std::uint32_t>(offsets_[u.index + 1] - offsets_[u.index]);
    }
    std::vector<std::uint32_t> degrees() const;
    bool adjacent(NodeId u, NodeId v) const;

private:
    std::uint32_t n_;
    std::vector<std::uint64_t> offsets_;
    std::vector<NodeId> neighbors_;
};

enum class GraphRoute { Auto, BallScan, ReplicaIndex };

// Throws std::invalid_argument for r < 1.
ConfigGraph build_config_graph(const Placement& p, const TorusGeometry& geo, int r,
                               GraphRoute route = GraphRoute::Auto);

// "degree,count" rows for every occupied degree.
void write_degree_histogram_csv(const ConfigGraph& g, std::ostream& out);

// ---------------------------------------------------------------------------
// (delta, mu)-goodness of a placement.

struct PairViolation {
    NodeId u, v;
    std::uint32_t shared = 0;
};

struct GoodnessReport {
    bool pass = true;
    double delta = 0.0;
    std::uint32_t mu = 0;
    std::vector<NodeId> sparse_nodes;          // fewer than delta * M distinct files
    std::vector<PairViolation> heavy_pairs;    // pairs sharing at least mu files
};

// delta = (1 - alpha) / 3, mu = ceil(5 / (1 - 2 alpha)). alpha in (0, 1/2).
GoodnessReport goodness_check(const Placement& p, double alpha);
GoodnessReport goodness_check(const Placement& p, double delta, std::uint32_t mu);

// ---------------------------------------------------------------------------
// Communication-cost predictors for nearest-replica assignment.

// sum_j p_j / sqrt(1 - (1 - p_j)^M), without the unknown constant factor.
double predicted_cost(const PopularityProfile& profile, std::uint32_t M);

struct CostRegime {
    std::string label;
    double leading_term = 0.0;
};

// Uniform / Zipf cost regime by exponent and its leading term at (K, M):
//   gamma = 0       "uniform"    sqrt(K/M)
//   0 < gamma < 1   "0<gamma<1"  sqrt(K/M)
//   gamma = 1       "gamma=1"    sqrt(K / (M ln K))
//   1 < gamma < 2   "1<gamma<2"  K^(1-gamma/2) / sqrt(M)
//   gamma = 2       "gamma=2"    ln K / sqrt(M)
//   gamma > 2       "gamma>2"    1 / sqrt(M)
CostRegime cost_regime(std::uint32_t K, std::uint32_t M, double gamma);

}  // namespace cachelb
