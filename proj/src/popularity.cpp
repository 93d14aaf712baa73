#include "cachelb/popularity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cachelb {

std::string to_string(PopularityKind kind) {
    return kind == PopularityKind::Uniform ? "uniform" : "zipf";
}

PopularityKind parse_popularity_kind(const std::string& s) {
    if (s == "uniform") return PopularityKind::Uniform;
    if (s == "zipf") return PopularityKind::Zipf;
    throw std::invalid_argument("unknown popularity kind '" + s + "' (expected uniform|zipf)");
}

double harmonic_lambda(std::uint32_t K, double gamma) {
    // Summed from the smallest term up to limit cancellation error.
    double sum = 0.0;
    for (std::uint32_t j = K; j >= 1; --j) sum += std::pow(static_cast<double>(j), -gamma);
    return sum;
}

PopularityProfile make_profile(std::uint32_t K, PopularityKind kind, double gamma) {
    if (K == 0) throw std::invalid_argument("library size K must be >= 1");
    if (kind == PopularityKind::Zipf && !(gamma >= 0.0 && std::isfinite(gamma)))
        throw std::invalid_argument("Zipf exponent must be finite and >= 0");

    PopularityProfile p;
    p.kind_ = kind;
    p.gamma_ = kind == PopularityKind::Zipf ? gamma : 0.0;
    p.pmf_.assign(K, 1.0 / K);
    if (kind == PopularityKind::Zipf && gamma != 0.0) {
        const double norm = harmonic_lambda(K, gamma);
        for (std::uint32_t i = 0; i < K; ++i)
            p.pmf_[i] = std::pow(static_cast<double>(i + 1), -gamma) / norm;
    }

    p.cdf_.resize(K);
    double acc = 0.0;
    for (std::uint32_t i = 0; i < K; ++i) {
        acc += p.pmf_[i];
        p.cdf_[i] = acc;
    }
    p.cdf_.back() = 1.0;
    return p;
}

FileId PopularityProfile::sample(Rng& rng) const {
    const double u = rng.uniform01();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    const auto idx = static_cast<std::size_t>(it - cdf_.begin());
    return static_cast<FileId>(std::min(idx, cdf_.size() - 1) + 1);
}

}  // namespace cachelb
