#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "cachelb/popularity.hpp"
#include "cachelb/topology.hpp"

namespace cachelb {

// Cache contents after the placement phase. Every node holds exactly M slots
// drawn with replacement, so a node may hold several copies of one file.
class Placement {
public:
    // slots: n * M file ids in [1, K], node-major. Throws on bad shape/ids.
    Placement(std::uint32_t n, std::uint32_t M, std::uint32_t K, std::vector<FileId> slots);

    std::uint32_t node_count() const noexcept { return n_; }
    std::uint32_t cache_size() const noexcept { return M_; }
    std::uint32_t library_size() const noexcept { return K_; }

    std::span<const FileId> slots(NodeId u) const {
        return {slots_.data() + static_cast<std::size_t>(u.index) * M_, M_};
    }
    const std::vector<FileId>& all_slots() const noexcept { return slots_; }

    // Distinct files at u, ascending.
    std::span<const FileId> distinct_files(NodeId u) const {
        return {distinct_.data() + distinct_offsets_[u.index],
                distinct_.data() + distinct_offsets_[u.index + 1]};
    }

    // Nodes holding at least one copy of `file`, ascending.
    std::span<const NodeId> replicas(FileId file) const {
        return {replica_nodes_.data() + replica_offsets_[file - 1],
                replica_nodes_.data() + replica_offsets_[file]};
    }

    bool holds(NodeId u, FileId file) const;

    friend bool operator==(const Placement& a, const Placement& b) {
        return a.n_ == b.n_ && a.M_ == b.M_ && a.K_ == b.K_ && a.slots_ == b.slots_;
    }

private:
    std::uint32_t n_, M_, K_;
    std::vector<FileId> slots_;
    std::vector<std::uint64_t> distinct_offsets_;
    std::vector<FileId> distinct_;
    std::vector<std::uint64_t> replica_offsets_;
    std::vector<NodeId> replica_nodes_;
};

// Proportional placement: node 0 draws its M files, then node 1, ... each
// draw is one profile.sample() from Rng(seed).
Placement place(std::uint32_t n, std::uint32_t M, const PopularityProfile& profile,
                std::uint64_t seed);

// Number of distinct files cached at u.
std::uint32_t distinct_count(NodeId u, const Placement& p);

struct Overlap {
    std::uint32_t count = 0;
    std::vector<FileId> files;
};

// Shared distinct files of u and v. Throws std::invalid_argument when u == v.
Overlap overlap(NodeId u, NodeId v, const Placement& p);

// Size of the intersection of two ascending ranges.
std::uint32_t overlap_count(std::span<const FileId> a, std::span<const FileId> b);

// Snapshot formats.
//   text:   "n M K\n" followed by n lines of M space-separated file ids.
//   binary: magic "CLBPLC01", then uint64 n, M, K (little endian), then
//           n*M uint32 file ids.
void save_text(const Placement& p, std::ostream& out);
Placement load_text(std::istream& in);
void save_binary(const Placement& p, std::ostream& out);
Placement load_binary(std::istream& in);

}  // namespace cachelb
