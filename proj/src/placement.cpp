#include "cachelb/placement.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace cachelb {

Placement::Placement(std::uint32_t n, std::uint32_t M, std::uint32_t K, std::vector<FileId> slot_ids)
    : n_(n), M_(M), K_(K), slots_(std::move(slot_ids)) {
    if (n == 0 || M == 0 || K == 0) throw std::invalid_argument("placement needs n, M, K >= 1");
    if (slots_.size() != static_cast<std::size_t>(n) * M)
        throw std::invalid_argument("placement slot count must equal n * M");
    for (FileId f : slots_)
        if (f < 1 || f > K) throw std::invalid_argument("file id out of range [1, K]");

    distinct_offsets_.resize(n + 1, 0);
    distinct_.reserve(slots_.size());
    std::vector<FileId> scratch(M);
    for (std::uint32_t u = 0; u < n; ++u) {
        auto s = slots(NodeId(u));
        scratch.assign(s.begin(), s.end());
        std::sort(scratch.begin(), scratch.end());
        scratch.erase(std::unique(scratch.begin(), scratch.end()), scratch.end());
        distinct_.insert(distinct_.end(), scratch.begin(), scratch.end());
        distinct_offsets_[u + 1] = distinct_.size();
    }

    // Counting sort by file; nodes visited ascending so each replica list comes out sorted.
    replica_offsets_.assign(static_cast<std::size_t>(K) + 1, 0);
    for (FileId f : distinct_) ++replica_offsets_[f];
    for (std::uint32_t j = 1; j <= K; ++j) replica_offsets_[j] += replica_offsets_[j - 1];
    replica_nodes_.resize(distinct_.size());
    std::vector<std::uint64_t> cursor(replica_offsets_.begin(), replica_offsets_.end() - 1);
    for (std::uint32_t u = 0; u < n; ++u)
        for (FileId f : distinct_files(NodeId(u))) replica_nodes_[cursor[f - 1]++] = NodeId(u);
}

bool Placement::holds(NodeId u, FileId file) const {
    auto d = distinct_files(u);
    return std::binary_search(d.begin(), d.end(), file);
}

Placement place(std::uint32_t n, std::uint32_t M, const PopularityProfile& profile,
                std::uint64_t seed) {
    if (n == 0) throw std::invalid_argument("place: n must be >= 1");
    if (M == 0) throw std::invalid_argument("place: M must be >= 1");
    Rng rng(seed);
    std::vector<FileId> slots(static_cast<std::size_t>(n) * M);
    for (auto& s : slots) s = profile.sample(rng);
    return Placement(n, M, profile.library_size(), std::move(slots));
}

std::uint32_t distinct_count(NodeId u, const Placement& p) {
    return static_cast<std::uint32_t>(p.distinct_files(u).size());
}

std::uint32_t overlap_count(std::span<const FileId> a, std::span<const FileId> b) {
    std::uint32_t count = 0;
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
        if (*i < *j) {
            ++i;
        } else if (*j < *i) {
            ++j;
        } else {
            ++count;
            ++i;
            ++j;
        }
    }
    return count;
}

Overlap overlap(NodeId u, NodeId v, const Placement& p) {
    if (u == v) throw std::invalid_argument("overlap is undefined for u == v");
    auto a = p.distinct_files(u);
    auto b = p.distinct_files(v);
    Overlap out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out.files));
    out.count = static_cast<std::uint32_t>(out.files.size());
    return out;
}

void save_text(const Placement& p, std::ostream& out) {
    out << p.node_count() << ' ' << p.cache_size() << ' ' << p.library_size() << '\n';
    for (std::uint32_t u = 0; u < p.node_count(); ++u) {
        bool first = true;
        for (FileId f : p.slots(NodeId(u))) {
            if (!first) out << ' ';
            out << f;
            first = false;
        }
        out << '\n';
    }
}

Placement load_text(std::istream& in) {
    std::uint64_t n = 0, M = 0, K = 0;
    if (!(in >> n >> M >> K)) throw std::runtime_error("placement snapshot: bad header");
    if (n == 0 || M == 0 || K == 0 || n > UINT32_MAX || M > UINT32_MAX || K > UINT32_MAX)
        throw std::runtime_error("placement snapshot: header values out of range");
    std::vector<FileId> slots(n * M);
    for (auto& s : slots) {
        std::uint64_t f = 0;
        if (!(in >> f)) throw std::runtime_error("placement snapshot: truncated body");
        if (f < 1 || f > K) throw std::runtime_error("placement snapshot: file id out of range");
        s = static_cast<FileId>(f);
    }
    return Placement(static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(M),
                     static_cast<std::uint32_t>(K), std::move(slots));
}

namespace {

constexpr std::array<char, 8> kMagic{'C', 'L', 'B', 'P', 'L', 'C', '0', '1'};

template <class T>
void write_le(std::ostream& out, T v) {
    static_assert(std::endian::native == std::endian::little, "big-endian hosts unsupported");
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T read_le(std::istream& in) {
    T v{};
    if (!in.read(reinterpret_cast<char*>(&v), sizeof v))
        throw std::runtime_error("placement snapshot: truncated binary data");
    return v;
}

}  // namespace

void save_binary(const Placement& p, std::ostream& out) {
    out.write(kMagic.data(), kMagic.size());
    write_le<std::uint64_t>(out, p.node_count());
    write_le<std::uint64_t>(out, p.cache_size());
    write_le<std::uint64_t>(out, p.library_size());
    for (FileId f : p.all_slots()) write_le<std::uint32_t>(out, f);
}

Placement load_binary(std::istream& in) {
    std::array<char, 8> magic{};
    if (!in.read(magic.data(), magic.size()) || magic != kMagic)
        throw std::runtime_error("placement snapshot: bad magic");
    const auto n = read_le<std::uint64_t>(in);
    const auto M = read_le<std::uint64_t>(in);
    const auto K = read_le<std::uint64_t>(in);
    if (n == 0 || M == 0 || K == 0 || n > UINT32_MAX || M > UINT32_MAX || K > UINT32_MAX)
        throw std::runtime_error("placement snapshot: header values out of range");
    std::vector<FileId> slots(n * M);
    for (auto& s : slots) {
        s = read_le<std::uint32_t>(in);
        if (s < 1 || s > K) throw std::runtime_error("placement snapshot: file id out of range");
    }
    return Placement(static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(M),
                     static_cast<std::uint32_t>(K), std::move(slots));
}

}  // namespace cachelb
