#include "bikeclust/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "bikeclust/error.hpp"
#include "bikeclust/preprocess.hpp"
#include "bikeclust/rng.hpp"

namespace bikeclust {

double squared_distance(std::span<const double> x, std::span<const double> y) {
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        sum += d * d;
    }
    return sum;
}

double euclidean_distance(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw Error("euclidean_distance: dimension mismatch (" + std::to_string(x.size()) + " vs " +
                    std::to_string(y.size()) + ")");
    }
    return std::sqrt(squared_distance(x, y));
}

std::vector<std::size_t> distinct_rows(const Matrix& data) {
    std::vector<std::size_t> order(data.rows());
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto row_less = [&](std::size_t a, std::size_t b) {
        const auto ra = data.row(a);
        const auto rb = data.row(b);
        return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
    };
    std::stable_sort(order.begin(), order.end(), row_less);
    std::vector<std::size_t> firsts;
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (i == 0 || row_less(order[i - 1], order[i])) firsts.push_back(order[i]);
    }
    std::sort(firsts.begin(), firsts.end());
    return firsts;
}

Matrix init_centroids(const Matrix& data, std::size_t k, std::uint64_t seed, InitMethod method) {
    if (k == 0) throw Error("k must be at least 1");
    auto candidates = distinct_rows(data);
    if (candidates.size() < k) {
        throw Error("cannot seed " + std::to_string(k) + " centroids from " +
                    std::to_string(candidates.size()) + " distinct rows");
    }
    Rng rng(seed);
    Matrix centroids(k, data.cols());
    auto take = [&](std::size_t slot, std::size_t pos) {
        std::swap(candidates[slot], candidates[pos]);
        const auto src = data.row(candidates[slot]);
        std::copy(src.begin(), src.end(), centroids.row(slot).begin());
    };

    if (method == InitMethod::random_rows) {
        // Partial Fisher-Yates shuffle.
        for (std::size_t i = 0; i < k; ++i) {
            take(i, i + static_cast<std::size_t>(rng.index(candidates.size() - i)));
        }
        return centroids;
    }

    take(0, static_cast<std::size_t>(rng.index(candidates.size())));
    std::vector<double> d2(candidates.size(), std::numeric_limits<double>::infinity());
    for (std::size_t i = 1; i < k; ++i) {
        double total = 0.0;
        for (std::size_t j = i; j < candidates.size(); ++j) {
            d2[j] = std::min(d2[j], squared_distance(data.row(candidates[j]), centroids.row(i - 1)));
            total += d2[j];
        }
        double target = rng.uniform01() * total;
        std::size_t pick = candidates.size() - 1;
        for (std::size_t j = i; j < candidates.size(); ++j) {
            target -= d2[j];
            if (target < 0.0) {
                pick = j;
                break;
            }
        }
        std::swap(d2[i], d2[pick]);
        take(i, pick);
    }
    return centroids;
}

Matrix cluster_means(const Matrix& data, std::span<const std::size_t> assignments, std::size_t k) {
    if (assignments.size() != data.rows()) throw Error("assignment count does not match row count");
    Matrix means(k, data.cols());
    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t i = 0; i < data.rows(); ++i) {
        const std::size_t c = assignments[i];
        if (c >= k) throw Error("cluster index " + std::to_string(c) + " out of range");
        ++sizes[c];
        for (std::size_t j = 0; j < data.cols(); ++j) means(c, j) += data(i, j);
    }
    for (std::size_t c = 0; c < k; ++c) {
        if (sizes[c] == 0) throw Error("cluster " + std::to_string(c) + " is empty");
        for (std::size_t j = 0; j < data.cols(); ++j) means(c, j) /= static_cast<double>(sizes[c]);
    }
    return means;
}

std::vector<double> cluster_wss(const Matrix& data, std::span<const std::size_t> assignments,
                                const Matrix& centroids) {
    if (assignments.size() != data.rows()) throw Error("assignment count does not match row count");
    if (centroids.cols() != data.cols()) throw Error("centroid dimension does not match data");
    const std::size_t k = centroids.rows();
    std::vector<double> wss(k, 0.0);
    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t i = 0; i < data.rows(); ++i) {
        const std::size_t c = assignments[i];
        if (c >= k) throw Error("cluster index " + std::to_string(c) + " out of range");
        ++sizes[c];
        wss[c] += squared_distance(data.row(i), centroids.row(c));
    }
    for (std::size_t c = 0; c < k; ++c) {
        if (sizes[c] == 0) throw Error("cluster " + std::to_string(c) + " is empty");
    }
    return wss;
}

double total_wss(const Matrix& data, std::span<const std::size_t> assignments, const Matrix& centroids) {
    const auto per = cluster_wss(data, assignments, centroids);
    return std::accumulate(per.begin(), per.end(), 0.0);
}

double pairwise_wss(const Matrix& data, std::span<const std::size_t> assignments, std::size_t k) {
    std::vector<double> pair_sum(k, 0.0);
    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t i = 0; i < data.rows(); ++i) {
        ++sizes.at(assignments[i]);
        for (std::size_t j = i + 1; j < data.rows(); ++j) {
            if (assignments[j] == assignments[i]) {
                pair_sum[assignments[i]] += squared_distance(data.row(i), data.row(j));
            }
        }
    }
    double total = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
        if (sizes[c] == 0) throw Error("cluster " + std::to_string(c) + " is empty");
        // Unordered pairs counted once, so sum over ordered pairs / (2 n_r) == pair_sum / n_r.
        total += pair_sum[c] / static_cast<double>(sizes[c]);
    }
    return total;
}

namespace {

std::size_t nearest(std::span<const double> x, const Matrix& centroids) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centroids.rows(); ++c) {
        const double d = squared_distance(x, centroids.row(c));
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    return best;
}

// Cost of adding x to cluster s, n_s d^2 / (n_s + 1), minimized over s != from.
std::pair<std::size_t, double> best_destination(std::span<const double> x, const Matrix& centroids,
                                                const std::vector<std::size_t>& sizes, std::size_t from) {
    std::size_t best = from;
    double best_cost = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < centroids.rows(); ++s) {
        if (s == from) continue;
        const double ns = static_cast<double>(sizes[s]);
        const double cost = ns * squared_distance(x, centroids.row(s)) / (ns + 1.0);
        if (cost < best_cost) {
            best_cost = cost;
            best = s;
        }
    }
    return {best, best_cost};
}

double removal_gain(std::span<const double> x, const Matrix& centroids,
                    const std::vector<std::size_t>& sizes, std::size_t from) {
    const double nr = static_cast<double>(sizes[from]);
    return nr * squared_distance(x, centroids.row(from)) / (nr - 1.0);
}

// Floating-point guard on top of the user tolerance; stops two points trading places forever
// on a tie that only rounding breaks.
constexpr double kRelativeGuard = 1e-12;

}  // namespace

PassResult hartigan_wong_pass(const Matrix& data, const Matrix& initial_centroids, int max_iterations,
                              double tolerance, const TransferObserver& observer) {
    const std::size_t n = data.rows();
    const std::size_t d = data.cols();
    const std::size_t k = initial_centroids.rows();
    if (initial_centroids.cols() != d) throw Error("initial centroids have the wrong dimension");
    if (max_iterations < 1) throw Error("max_iterations must be at least 1");

    PassResult pass;
    pass.assignments.resize(n);
    for (std::size_t i = 0; i < n; ++i) pass.assignments[i] = nearest(data.row(i), initial_centroids);

    std::vector<std::size_t> sizes(k, 0);
    Matrix sums(k, d);
    Matrix& centroids = pass.centroids;
    centroids = Matrix(k, d);
    auto resync = [&] {
        std::fill(sizes.begin(), sizes.end(), 0);
        sums = Matrix(k, d);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t c = pass.assignments[i];
            ++sizes[c];
            for (std::size_t j = 0; j < d; ++j) sums(c, j) += data(i, j);
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (sizes[c] == 0) return false;
            for (std::size_t j = 0; j < d; ++j) centroids(c, j) = sums(c, j) / static_cast<double>(sizes[c]);
        }
        return true;
    };
    if (!resync()) {
        pass.empty_cluster = true;
        return pass;
    }

    for (int sweep = 1; sweep <= max_iterations; ++sweep) {
        bool moved = false;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t r = pass.assignments[i];
            if (sizes[r] < 2) continue;
            const auto x = data.row(i);
            const double gain = removal_gain(x, centroids, sizes, r);
            const auto [s, cost] = best_destination(x, centroids, sizes, r);
            if (s == r) continue;
            const double decrease = gain - cost;
            if (!(decrease > tolerance + kRelativeGuard * gain)) continue;

            --sizes[r];
            ++sizes[s];
            for (std::size_t j = 0; j < d; ++j) {
                sums(r, j) -= x[j];
                sums(s, j) += x[j];
                centroids(r, j) = sums(r, j) / static_cast<double>(sizes[r]);
                centroids(s, j) = sums(s, j) / static_cast<double>(sizes[s]);
            }
            pass.assignments[i] = s;
            moved = true;
            if (observer) observer({i, r, s, decrease, pass.assignments});
        }
        pass.iterations = sweep;
        if (!resync()) {
            pass.empty_cluster = true;
            return pass;
        }
        if (!moved) {
            pass.converged = true;
            break;
        }
    }
    return pass;
}

ClusteringResult hartigan_wong(const Matrix& data, const KMeansConfig& config) {
    const std::size_t n = data.rows();
    if (config.k < 1) throw Error("k must be at least 1");
    if (config.k > n) {
        throw Error("k = " + std::to_string(config.k) + " exceeds the number of observations (" +
                    std::to_string(n) + ")");
    }
    if (config.max_iterations < 1) throw Error("max_iterations must be at least 1");
    if (config.n_configurations < 1) throw Error("n_configurations must be at least 1");
    if (!(config.tolerance >= 0.0)) throw Error("tolerance must be non-negative");
    for (double v : data.data()) {
        if (!std::isfinite(v)) throw Error("data contains a non-finite value");
    }

    const auto wanted = static_cast<std::size_t>(config.n_configurations);
    const std::size_t max_attempts = 4 * wanted;
    std::optional<ClusteringResult> best;
    std::size_t completed = 0;
    std::size_t discarded = 0;
    for (std::size_t p = 0; completed < wanted && p < max_attempts; ++p) {
        const std::uint64_t sub_seed = derive_seed(config.seed, streams::kmeans_pass, p);
        const Matrix start = init_centroids(data, config.k, sub_seed, config.init);
        PassResult pass = hartigan_wong_pass(data, start, config.max_iterations, config.tolerance);
        if (pass.empty_cluster) {
            ++discarded;
            continue;
        }
        ++completed;
        const auto per = cluster_wss(data, pass.assignments, pass.centroids);
        const double wss = std::accumulate(per.begin(), per.end(), 0.0);
        if (best && (wss > best->total_wss || (wss == best->total_wss && sub_seed >= best->pass_seed))) {
            continue;
        }
        ClusteringResult res;
        res.sizes.assign(config.k, 0);
        for (std::size_t c : pass.assignments) ++res.sizes[c];
        res.assignments = std::move(pass.assignments);
        res.centroids = std::move(pass.centroids);
        res.per_cluster_wss = per;
        res.total_wss = wss;
        res.iterations_used = pass.iterations;
        res.converged = pass.converged;
        res.seed_used = config.seed;
        res.pass_seed = sub_seed;
        best = std::move(res);
    }
    if (!best) {
        throw Error("every k-means pass ended with an empty cluster (" + std::to_string(discarded) +
                    " discarded)");
    }
    best->restarts_discarded_for_empty_clusters = discarded;
    return *best;
}

ClusteringResult hartigan_wong(const FeatureMatrix& matrix, const KMeansConfig& config) {
    if (!matrix.standardized && !config.allow_unstandardized) {
        throw Error("k-means expects a standardized feature matrix (set allow_unstandardized to override)");
    }
    return hartigan_wong(matrix.values, config);
}

std::optional<Transfer> find_improving_transfer(const Matrix& data, std::span<const std::size_t> assignments,
                                                const Matrix& centroids, double rel_eps) {
    const std::size_t k = centroids.rows();
    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t c : assignments) ++sizes.at(c);
    const double scale = total_wss(data, assignments, centroids);
    for (std::size_t i = 0; i < data.rows(); ++i) {
        const std::size_t r = assignments[i];
        if (sizes[r] < 2) continue;
        const double gain = removal_gain(data.row(i), centroids, sizes, r);
        const auto [s, cost] = best_destination(data.row(i), centroids, sizes, r);
        if (s != r && gain - cost > rel_eps * std::max(scale, gain)) return Transfer{i, r, s, gain - cost};
    }
    return std::nullopt;
}

}  // namespace bikeclust
