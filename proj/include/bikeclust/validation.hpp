#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bikeclust/kmeans.hpp"
#include "bikeclust/matrix.hpp"

namespace bikeclust {

/// Inclusive range of cluster counts.
struct KRange {
    std::size_t first = 1;
    std::size_t last = 1;

    std::size_t size() const { return last >= first ? last - first + 1 : 0; }
    friend bool operator==(const KRange&, const KRange&) = default;
};

/// Best-of-restarts total WSS for every k in the range.
std::vector<double> elbow_curve(const Matrix& data, KRange range, const KMeansConfig& config);

struct ElbowPick {
    std::size_t k = 0;
    std::optional<std::string> warning;
};

/// k maximizing the discrete second difference W[k-1] - 2 W[k] + W[k+1] (lowest k on ties).
/// `wss` holds W for consecutive k starting at `first_k` and needs at least three values.
ElbowPick detect_elbow(std::span<const double> wss, std::size_t first_k);

struct Silhouette {
    std::vector<double> per_point;
    double average = 0.0;
};

/// s(i) = (b(i) - a(i)) / max(a(i), b(i)) with Euclidean dissimilarities. Points alone in
/// their cluster get s(i) = 0. Needs at least two non-empty clusters and not all points equal.
Silhouette silhouette_width(const Matrix& data, std::span<const std::size_t> assignments);

struct GapCurve {
    std::vector<double> log_wss;           ///< log W_k of the data
    std::vector<double> expected_log_wss;  ///< mean over references of log W_k
    std::vector<double> gap;
    std::vector<double> gap_se;            ///< sd_k * sqrt(1 + 1/B)
};

/// Gap statistic with B reference sets drawn uniformly in the per-feature bounding box.
/// Reference b uses derive_seed(seed, streams::gap_reference, b) to draw its points and
/// derive_seed(seed, streams::gap_cluster, b) as its k-means seed. `data_wss`, when given,
/// supplies W_k of the data (one value per k) instead of reclustering it.
GapCurve gap_statistic(const Matrix& data, KRange range, std::size_t bootstrap_count,
                       const KMeansConfig& config, std::uint64_t seed,
                       std::span<const double> data_wss = {}, unsigned threads = 0);

enum class GapRule { one_standard_error, argmax };

struct Recommendation {
    std::optional<std::size_t> elbow;
    std::optional<std::size_t> silhouette;
    std::optional<std::size_t> gap;
};

struct ValidationReport {
    KRange k_range;
    std::vector<double> wss_curve;
    std::vector<std::optional<double>> silhouette_curve;  ///< empty for k = 1
    std::vector<double> gap_curve;
    std::vector<double> gap_se;
    std::size_t bootstrap_count = 0;
    std::uint64_t seed = 0;
    GapRule gap_rule = GapRule::one_standard_error;
    Recommendation recommended;
    std::vector<std::string> warnings;
};

/// Silhouette argmax (k >= 2), gap one-standard-error rule (smallest k with
/// Gap(k) >= Gap(k+1) - s_{k+1}, or plain argmax), elbow by detect_elbow. A method with too
/// few points on its curve yields no recommendation and a warning.
Recommendation recommend_k(const ValidationReport& report, std::vector<std::string>* warnings = nullptr);

struct ValidationOptions {
    KRange range{1, 10};
    std::size_t bootstrap_count = 50;
    KMeansConfig kmeans;  ///< k is overwritten per curve point
    std::uint64_t seed = 0;
    GapRule gap_rule = GapRule::one_standard_error;
    unsigned threads = 0;
};

/// Computes all three curves and the recommendations. The upper end of the range is capped
/// at (number of distinct rows - 1) so that log W_k stays finite.
ValidationReport validate_k(const Matrix& data, const ValidationOptions& options);

}  // namespace bikeclust
