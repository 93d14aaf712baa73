#include "cachelb/workload.hpp"

#include <ostream>
#include <stdexcept>

namespace cachelb {

RequestStream generate(std::uint32_t n_requests, std::uint32_t n_nodes,
                       const PopularityProfile& profile, std::uint64_t seed) {
    if (n_nodes == 0) throw std::invalid_argument("generate: n_nodes must be >= 1");
    RequestStream stream;
    stream.node_count = n_nodes;
    stream.seed = seed;
    stream.requests.resize(n_requests);
    Rng rng(seed);
    for (std::uint32_t i = 0; i < n_requests; ++i) {
        auto& r = stream.requests[i];
        r.seq = i;
        r.origin = NodeId(static_cast<std::uint32_t>(rng.uniform_index(n_nodes)));
        r.file = profile.sample(rng);
    }
    return stream;
}

std::vector<std::uint32_t> per_node_counts(const RequestStream& stream, std::uint32_t n_nodes) {
    std::vector<std::uint32_t> counts(n_nodes, 0);
    for (const auto& r : stream.requests) {
        if (r.origin.index >= n_nodes)
            throw std::invalid_argument("per_node_counts: request origin outside node range");
        ++counts[r.origin.index];
    }
    return counts;
}

void write_csv(const RequestStream& stream, std::ostream& out) {
    out << "seq,origin,file\n";
    for (const auto& r : stream.requests) out << r.seq << ',' << r.origin.index << ',' << r.file << '\n';
}

}  // namespace cachelb
