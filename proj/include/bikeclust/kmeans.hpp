#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "bikeclust/matrix.hpp"

namespace bikeclust {

struct FeatureMatrix;

enum class InitMethod {
    random_rows,       ///< k distinct data rows, uniformly without replacement
    kmeans_plus_plus,  ///< D^2-weighted seeding over distinct rows
};

struct KMeansConfig {
    std::size_t k = 1;
    int max_iterations = 10;  ///< full sweeps over the data per pass
    int n_configurations = 25;
    std::uint64_t seed = 0;
    double tolerance = 0.0;   ///< minimum WSS decrease for a transfer to be accepted
    InitMethod init = InitMethod::random_rows;
    bool allow_unstandardized = false;
};

struct ClusteringResult {
    std::vector<std::size_t> assignments;
    Matrix centroids;  ///< k x d, in the coordinates of the clustered matrix
    std::vector<std::size_t> sizes;
    std::vector<double> per_cluster_wss;
    double total_wss = 0.0;
    int iterations_used = 0;
    bool converged = false;
    std::uint64_t seed_used = 0;  ///< master seed from the config
    std::uint64_t pass_seed = 0;  ///< sub-seed of the winning pass
    std::size_t restarts_discarded_for_empty_clusters = 0;

    std::size_t k() const { return centroids.rows(); }
};

double squared_distance(std::span<const double> x, std::span<const double> y);

/// Euclidean distance. Throws on dimension mismatch.
double euclidean_distance(std::span<const double> x, std::span<const double> y);

/// Indices of the first occurrence of each distinct row, in row order.
std::vector<std::size_t> distinct_rows(const Matrix& data);

/// Seeds k centroids from distinct data rows. Throws if fewer than k distinct rows exist.
Matrix init_centroids(const Matrix& data, std::size_t k, std::uint64_t seed,
                      InitMethod method = InitMethod::random_rows);

/// Mean of the rows assigned to each of k clusters. Throws on an empty cluster.
Matrix cluster_means(const Matrix& data, std::span<const std::size_t> assignments, std::size_t k);

/// Sum of squared distances of each point to its cluster centroid, per cluster.
std::vector<double> cluster_wss(const Matrix& data, std::span<const std::size_t> assignments,
                                const Matrix& centroids);

/// Total within-cluster sum of squares. Throws on an empty cluster.
double total_wss(const Matrix& data, std::span<const std::size_t> assignments, const Matrix& centroids);

/// Within-cluster sum of squares in pairwise form: sum_r (1 / (2 n_r)) sum_{i,j in r} |x_i - x_j|^2.
/// Equal to total_wss with cluster means as centroids.
double pairwise_wss(const Matrix& data, std::span<const std::size_t> assignments, std::size_t k);

/// Reported after every accepted transfer within a pass.
struct TransferEvent {
    std::size_t point = 0;
    std::size_t from = 0;
    std::size_t to = 0;
    double decrease = 0.0;  ///< predicted WSS decrease, R1 - R2
    std::span<const std::size_t> assignments;
};
using TransferObserver = std::function<void(const TransferEvent&)>;

struct PassResult {
    std::vector<std::size_t> assignments;
    Matrix centroids;
    int iterations = 0;
    bool converged = false;
    bool empty_cluster = false;
};

/// One Hartigan-Wong pass from the given starting centroids.
///
/// Points are first assigned to their nearest centroid (lowest index on ties). Each sweep
/// then visits every point i in cluster r (size n_r > 1) and moves it to the cluster s
/// minimizing n_s d(i, c_s)^2 / (n_s + 1) whenever
///     n_r d(i, c_r)^2 / (n_r - 1) - n_s d(i, c_s)^2 / (n_s + 1) > tolerance,
/// updating both centroids immediately. Each accepted move lowers the WSS by exactly that
/// difference. The pass stops after a sweep without moves or after max_iterations sweeps.
PassResult hartigan_wong_pass(const Matrix& data, const Matrix& initial_centroids, int max_iterations,
                              double tolerance = 0.0, const TransferObserver& observer = {});

/// Best of `n_configurations` passes (lowest total WSS, then lowest sub-seed). Pass p uses
/// sub-seed derive_seed(seed, streams::kmeans_pass, p). A pass that ends with an empty
/// cluster is discarded and replaced by the next index.
ClusteringResult hartigan_wong(const Matrix& data, const KMeansConfig& config);

/// As above; requires a standardized matrix unless config.allow_unstandardized is set.
ClusteringResult hartigan_wong(const FeatureMatrix& matrix, const KMeansConfig& config);

/// A single-point transfer that would lower the WSS by more than `rel_eps * total_wss`,
/// if one exists. Used to check that a clustering is a Hartigan-Wong fixed point.
struct Transfer {
    std::size_t point;
    std::size_t from;
    std::size_t to;
    double decrease;
};
std::optional<Transfer> find_improving_transfer(const Matrix& data,
                                                std::span<const std::size_t> assignments,
                                                const Matrix& centroids, double rel_eps = 1e-12);

}  // namespace bikeclust
