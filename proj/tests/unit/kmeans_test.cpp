#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "bikeclust/error.hpp"
#include "bikeclust/kmeans.hpp"
#include "bikeclust/preprocess.hpp"
#include "bikeclust/rng.hpp"
#include "../test_support.hpp"

using namespace bikeclust;
using namespace bikeclust::testing;

namespace {

Matrix random_points(Rng& rng, std::size_t n, std::size_t d) {
    Matrix m(n, d);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) m(i, j) = rng.uniform(-10, 10);
    }
    return m;
}

KMeansConfig config(std::size_t k, std::uint64_t seed = 1) {
    KMeansConfig cfg;
    cfg.k = k;
    cfg.seed = seed;
    return cfg;
}

}  // namespace

TEST(Distance, Basics) {
    const std::vector<double> a{0, 0}, b{3, 4}, c{1, 2, 3};
    EXPECT_EQ(euclidean_distance(a, b), 5.0);
    EXPECT_EQ(squared_distance(a, b), 25.0);
    EXPECT_EQ(euclidean_distance(b, b), 0.0);
    EXPECT_THROW(euclidean_distance(a, c), Error);
}

TEST(Wss, HandExample) {
    const Matrix x{{0.0}, {2.0}, {10.0}};
    const std::vector<std::size_t> assign{0, 0, 1};
    const Matrix centroids = cluster_means(x, assign, 2);
    EXPECT_EQ(centroids(0, 0), 1.0);
    EXPECT_EQ(centroids(1, 0), 10.0);
    EXPECT_EQ(total_wss(x, assign, centroids), 2.0);
    EXPECT_EQ(pairwise_wss(x, assign, 2), 2.0);
    EXPECT_THROW(cluster_means(x, std::vector<std::size_t>{0, 0, 0}, 2), Error);
}

TEST(Wss, PairwiseIdentityOnRandomPartitions) {
    Rng rng(9);
    for (int t = 0; t < 50; ++t) {
        const std::size_t n = 5 + rng.index(30), d = 1 + rng.index(4), k = 1 + rng.index(4);
        const Matrix x = random_points(rng, n, d);
        std::vector<std::size_t> assign(n);
        for (std::size_t i = 0; i < n; ++i) assign[i] = i < k ? i : rng.index(k);
        const double direct = total_wss(x, assign, cluster_means(x, assign, k));
        EXPECT_NEAR(direct, pairwise_wss(x, assign, k), 1e-9 * (1 + direct));
        std::vector<int> labels(assign.begin(), assign.end());
        EXPECT_NEAR(direct, wss_of_labels(x, labels, static_cast<int>(k)), 1e-9 * (1 + direct));
    }
}

TEST(Init, DistinctRowsOnly) {
    const Matrix x{{1, 1}, {1, 1}, {2, 2}, {1, 1}, {3, 3}};
    EXPECT_EQ(distinct_rows(x), (std::vector<std::size_t>{0, 2, 4}));
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        for (auto method : {InitMethod::random_rows, InitMethod::kmeans_plus_plus}) {
            const Matrix c = init_centroids(x, 3, seed, method);
            std::set<double> firsts;
            for (std::size_t r = 0; r < 3; ++r) firsts.insert(c(r, 0));
            EXPECT_EQ(firsts, (std::set<double>{1, 2, 3}));
        }
    }
    EXPECT_THROW(init_centroids(x, 4, 0), Error);
}

TEST(HartiganWong, TwoObviousGroups) {
    const Matrix x{{0, 0}, {0, 1}, {10, 10}, {10, 11}};
    const auto r = hartigan_wong(x, config(2));
    EXPECT_EQ(r.assignments[0], r.assignments[1]);
    EXPECT_EQ(r.assignments[2], r.assignments[3]);
    EXPECT_NE(r.assignments[0], r.assignments[2]);
    EXPECT_NEAR(r.total_wss, 1.0, 1e-12);
    EXPECT_EQ(r.sizes, (std::vector<std::size_t>{2, 2}));
    EXPECT_TRUE(r.converged);
}

TEST(HartiganWong, KEqualsOneGivesGrandMean) {
    Rng rng(2);
    const Matrix x = random_points(rng, 20, 3);
    const auto r = hartigan_wong(x, config(1));
    double expected = 0;
    for (std::size_t j = 0; j < 3; ++j) {
        double mean = 0;
        for (std::size_t i = 0; i < 20; ++i) mean += x(i, j);
        mean /= 20;
        EXPECT_NEAR(r.centroids(0, j), mean, 1e-12);
        for (std::size_t i = 0; i < 20; ++i) expected += (x(i, j) - mean) * (x(i, j) - mean);
    }
    EXPECT_NEAR(r.total_wss, expected, 1e-9);
}

TEST(HartiganWong, KEqualsDistinctRowsGivesZeroWss) {
    const Matrix x{{0.0}, {1.0}, {1.0}, {5.0}, {5.0}, {9.0}};
    const auto r = hartigan_wong(x, config(4));
    EXPECT_EQ(r.total_wss, 0.0);
    EXPECT_EQ(r.assignments[1], r.assignments[2]);
    EXPECT_EQ(r.assignments[3], r.assignments[4]);
}

TEST(HartiganWong, InvalidInputs) {
    const Matrix x{{0.0}, {1.0}, {1.0}};
    EXPECT_THROW(hartigan_wong(x, config(0)), Error);
    EXPECT_THROW(hartigan_wong(x, config(3)), Error);  // only two distinct rows
    EXPECT_THROW(hartigan_wong(Matrix(0, 2), config(1)), Error);
    Matrix bad{{0.0}, {std::nan("")}};
    EXPECT_THROW(hartigan_wong(bad, config(1)), Error);
}

TEST(HartiganWong, FeatureMatrixMustBeStandardized) {
    FeatureMatrix fm;
    fm.feature_names = {"a"};
    fm.values = Matrix{{0.0}, {1.0}, {5.0}, {6.0}};
    fm.dates = {Date(2018, 1, 1), Date(2018, 1, 2), Date(2018, 1, 3), Date(2018, 1, 4)};
    fm.column_means = {0};
    fm.column_stds = {1};
    EXPECT_THROW(hartigan_wong(fm, config(2)), Error);
    auto cfg = config(2);
    cfg.allow_unstandardized = true;
    EXPECT_NO_THROW(hartigan_wong(fm, cfg));
    EXPECT_NO_THROW(hartigan_wong(standardize(fm), config(2)));
}

TEST(HartiganWong, DeterministicForFixedSeed) {
    Rng rng(12);
    const Matrix x = random_points(rng, 60, 3);
    const auto a = hartigan_wong(x, config(4, 77));
    const auto b = hartigan_wong(x, config(4, 77));
    EXPECT_EQ(a.assignments, b.assignments);
    EXPECT_EQ(a.centroids, b.centroids);
    EXPECT_EQ(a.total_wss, b.total_wss);
    EXPECT_EQ(a.pass_seed, b.pass_seed);
    EXPECT_EQ(a.seed_used, 77u);
}

TEST(HartiganWong, ReportedWssMatchesRecomputation) {
    Rng rng(13);
    for (int t = 0; t < 20; ++t) {
        const Matrix x = random_points(rng, 40, 2);
        const std::size_t k = 2 + rng.index(4);
        const auto r = hartigan_wong(x, config(k, t));
        const Matrix means = cluster_means(x, r.assignments, k);
        EXPECT_NEAR(r.total_wss, total_wss(x, r.assignments, means), 1e-9);
        for (std::size_t c = 0; c < k; ++c) {
            for (std::size_t j = 0; j < 2; ++j) EXPECT_NEAR(r.centroids(c, j), means(c, j), 1e-9);
        }
        double per = 0;
        for (double w : r.per_cluster_wss) per += w;
        EXPECT_NEAR(per, r.total_wss, 1e-9);
        std::size_t total = 0;
        for (auto s : r.sizes) {
            EXPECT_GT(s, 0u);
            total += s;
        }
        EXPECT_EQ(total, 40u);
    }
}

TEST(HartiganWong, BestPassIsNoWorseThanAnySinglePass) {
    Rng rng(14);
    const Matrix x = random_points(rng, 50, 2);
    const auto cfg = config(5, 3);
    const auto best = hartigan_wong(x, cfg);
    for (int p = 0; p < cfg.n_configurations; ++p) {
        const auto seed = derive_seed(cfg.seed, streams::kmeans_pass, static_cast<std::uint64_t>(p));
        const auto pass = hartigan_wong_pass(x, init_centroids(x, 5, seed), cfg.max_iterations);
        if (pass.empty_cluster) continue;
        EXPECT_LE(best.total_wss, total_wss(x, pass.assignments, pass.centroids) + 1e-9);
    }
}

TEST(HartiganWong, AccumulatedDecreaseMatchesTrueWssDrop) {
    Rng rng(15);
    for (int t = 0; t < 30; ++t) {
        const Matrix x = random_points(rng, 25, 2);
        const std::size_t k = 3;
        const Matrix init = init_centroids(x, k, static_cast<std::uint64_t>(t));
        double previous = -1.0;
        bool ok = true;
        auto observer = [&](const TransferEvent& e) {
            const std::vector<std::size_t> assign(e.assignments.begin(), e.assignments.end());
            const double now = total_wss(x, assign, cluster_means(x, assign, k));
            if (previous >= 0) {
                if (now > previous + 1e-9) ok = false;
                if (std::abs((previous - now) - e.decrease) > 1e-8 * (1 + previous)) ok = false;
            }
            previous = now;
        };
        // Nearest-centroid start can leave a cluster empty; only check passes that don't.
        const auto pass = hartigan_wong_pass(x, init, 10, 0.0, observer);
        if (!pass.empty_cluster) EXPECT_TRUE(ok) << t;
    }
}

TEST(HartiganWong, ConvergedResultIsFixedPoint) {
    Rng rng(16);
    for (int t = 0; t < 30; ++t) {
        const Matrix x = random_points(rng, 30, 2);
        auto cfg = config(3, t);
        cfg.max_iterations = 100;
        const auto r = hartigan_wong(x, cfg);
        ASSERT_TRUE(r.converged);
        EXPECT_FALSE(find_improving_transfer(x, r.assignments, r.centroids).has_value()) << t;
    }
}

TEST(HartiganWong, MatchesBruteForceOnSmallProblems) {
    Rng rng(17);
    int matches = 0;
    for (int t = 0; t < 50; ++t) {
        const std::size_t n = 4 + rng.index(5), d = 1 + rng.index(2);
        const Matrix x = random_points(rng, n, d);
        if (distinct_rows(x).size() < 2) continue;
        const auto r = hartigan_wong(x, config(2, t));
        const double oracle = brute_force_wss_k2(x);
        EXPECT_GE(r.total_wss, oracle - 1e-9);
        if (std::abs(r.total_wss - oracle) <= 1e-9 * (1 + oracle)) ++matches;
    }
    EXPECT_GE(matches, 48);
}

TEST(HartiganWong, RecoversSeparatedBlobs) {
    std::vector<std::size_t> truth;
    const Matrix x = gaussian_blobs(simplex_centers(4, 15.0), 300, 4, &truth);
    const auto r = hartigan_wong(x, config(3, 9));
    // Same partition as the truth up to relabelling.
    std::vector<std::size_t> map(3, 99);
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (map[truth[i]] == 99) map[truth[i]] = r.assignments[i];
        EXPECT_EQ(map[truth[i]], r.assignments[i]);
    }
}

TEST(HartiganWong, ToleranceStopsSmallMoves) {
    Rng rng(18);
    const Matrix x = random_points(rng, 40, 2);
    auto loose = config(3, 1);
    loose.tolerance = 1e9;
    const auto r = hartigan_wong(x, loose);
    // No transfer clears the tolerance, so each pass keeps its nearest-centroid start.
    const Matrix init = init_centroids(x, 3, r.pass_seed);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        std::size_t best = 0;
        for (std::size_t c = 1; c < 3; ++c) {
            if (squared_distance(x.row(i), init.row(c)) < squared_distance(x.row(i), init.row(best))) best = c;
        }
        EXPECT_EQ(r.assignments[i], best);
    }
}

TEST(HartiganWong, KMeansPlusPlusInitAlsoWorks) {
    const Matrix x = gaussian_blobs(simplex_centers(3, 12.0), 150, 5);
    auto cfg = config(3, 2);
    cfg.init = InitMethod::kmeans_plus_plus;
    const auto pp = hartigan_wong(x, cfg);
    const auto rr = hartigan_wong(x, config(3, 2));
    EXPECT_NEAR(pp.total_wss, rr.total_wss, 1e-9);
}
