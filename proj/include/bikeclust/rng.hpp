#pragma once

#include <cstdint>
#include <random>

namespace bikeclust {

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Counter-based sub-seed derivation.
///
/// sub_seed = mix64(mix64(master ^ mix64(stream)) + index * 0x9E3779B97F4A7C15)
///
/// `stream` separates independent consumers (k-means passes, gap references, ...) and
/// `index` enumerates work items within a stream, so work items may be evaluated in any
/// order or concurrently and still draw identical numbers.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index);

/// Stream tags used with derive_seed.
namespace streams {
inline constexpr std::uint64_t kmeans_pass = 0x6b6d65616e73ULL;     // "kmeans"
inline constexpr std::uint64_t gap_reference = 0x676170726566ULL;   // "gapref"
inline constexpr std::uint64_t gap_cluster = 0x676170636c75ULL;     // "gapclu"
}  // namespace streams

/// Seeded generator. All distributions are implemented here rather than through
/// <random> distributions, whose output is implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform01();

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Unbiased uniform integer in [0, n). Requires n > 0.
    std::uint64_t index(std::uint64_t n);

    /// Standard normal via the Box-Muller transform.
    double normal();

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace bikeclust
