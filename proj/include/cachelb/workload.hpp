#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "cachelb/popularity.hpp"
#include "cachelb/topology.hpp"

namespace cachelb {

struct Request {
    std::uint32_t seq = 0;
    NodeId origin;
    FileId file = 0;
};

struct RequestStream {
    std::vector<Request> requests;
    std::uint32_t node_count = 0;
    std::uint64_t seed = 0;

    std::size_t size() const noexcept { return requests.size(); }
    bool empty() const noexcept { return requests.empty(); }
};

// n_requests sequential requests; per request one uniform_index(n_nodes) for
// the origin, then one profile.sample() for the file, from Rng(seed).
RequestStream generate(std::uint32_t n_requests, std::uint32_t n_nodes,
                       const PopularityProfile& profile, std::uint64_t seed);

// D_i for every node.
std::vector<std::uint32_t> per_node_counts(const RequestStream& stream, std::uint32_t n_nodes);

// "seq,origin,file" header plus one row per request.
void write_csv(const RequestStream& stream, std::ostream& out);

}  // namespace cachelb
