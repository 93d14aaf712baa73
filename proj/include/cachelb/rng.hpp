#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace cachelb {

// Seed discipline
// ---------------
// A run owns one 64-bit seed. Every consumer (placement, workload, strategy
// tie-breaks, Voronoi tie-breaks, ...) gets its own engine seeded with
// derive_seed(run_seed, label, index), so the number of draws taken by one
// consumer never shifts another consumer's stream.
//
//   derive_seed(base, label, index) =
//       splitmix64(splitmix64(base ^ fnv1a64(label)) + index)
//
// fnv1a64 is the standard 64-bit FNV-1a over the label bytes and splitmix64 is
// Vigna's finalizer (constants 0x9e3779b97f4a7c15, 0xbf58476d1ce4e5b9,
// 0x94d049bb133111eb).

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view s) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

constexpr std::uint64_t derive_seed(std::uint64_t base, std::string_view label,
                                    std::uint64_t index = 0) noexcept {
    return splitmix64(splitmix64(base ^ fnv1a64(label)) + index);
}

// Substream labels used across the library.
namespace stream {
inline constexpr std::string_view replication = "replication";
inline constexpr std::string_view placement = "placement";
inline constexpr std::string_view workload = "workload";
inline constexpr std::string_view strategy = "strategy";
inline constexpr std::string_view voronoi = "voronoi";
}  // namespace stream

// mt19937_64 with distribution code that is fixed here rather than left to
// the standard library, so draws are identical across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    Rng(std::uint64_t base, std::string_view label, std::uint64_t index = 0)
        : engine_(derive_seed(base, label, index)) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform integer in [0, bound), bound > 0. Lemire's multiply-shift with
    // rejection; unbiased.
    std::uint64_t uniform_index(std::uint64_t bound) {
        std::uint64_t x = engine_();
        __uint128_t m = static_cast<__uint128_t>(x) * bound;
        auto low = static_cast<std::uint64_t>(m);
        if (low < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                x = engine_();
                m = static_cast<__uint128_t>(x) * bound;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 engine_;
};

}  // namespace cachelb
