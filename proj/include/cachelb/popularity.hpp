#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cachelb/rng.hpp"

namespace cachelb {

// Files are numbered 1..K by popularity rank.
using FileId = std::uint32_t;

enum class PopularityKind { Uniform, Zipf };

std::string to_string(PopularityKind kind);
PopularityKind parse_popularity_kind(const std::string& s);

class PopularityProfile {
public:
    std::uint32_t library_size() const noexcept { return static_cast<std::uint32_t>(pmf_.size()); }
    PopularityKind kind() const noexcept { return kind_; }
    double gamma() const noexcept { return gamma_; }

    // pmf()[i] is the probability of file i + 1.
    const std::vector<double>& pmf() const noexcept { return pmf_; }
    double probability(FileId f) const { return pmf_.at(f - 1); }

    // Inverse-CDF draw: one uniform01() then a binary search over the
    // cumulative pmf. Exactly one engine call per draw.
    FileId sample(Rng& rng) const;

private:
    friend PopularityProfile make_profile(std::uint32_t, PopularityKind, double);

    PopularityKind kind_ = PopularityKind::Uniform;
    double gamma_ = 0.0;
    std::vector<double> pmf_;
    std::vector<double> cdf_;
};

// Throws std::invalid_argument for K == 0 or a negative / non-finite gamma.
// Zipf with gamma == 0 yields the uniform pmf (kind stays Zipf).
PopularityProfile make_profile(std::uint32_t K, PopularityKind kind, double gamma = 0.0);

// sum_{j=1}^{K} j^-gamma
double harmonic_lambda(std::uint32_t K, double gamma);

}  // namespace cachelb
