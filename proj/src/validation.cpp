#include "bikeclust/validation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bikeclust/error.hpp"
#include "bikeclust/parallel.hpp"
#include "bikeclust/rng.hpp"

namespace bikeclust {

namespace {

void check_range(KRange range, std::size_t n) {
    if (range.first < 1 || range.last < range.first) {
        throw Error("invalid k range " + std::to_string(range.first) + ".." + std::to_string(range.last));
    }
    if (range.last > n) {
        throw Error("k range upper bound " + std::to_string(range.last) + " exceeds the " +
                    std::to_string(n) + " observations");
    }
}

double log_wss(double wss) {
    if (!(wss > 0.0)) throw Error("within-cluster sum of squares is zero; log W_k undefined");
    return std::log(wss);
}

}  // namespace

std::vector<double> elbow_curve(const Matrix& data, KRange range, const KMeansConfig& config) {
    check_range(range, data.rows());
    std::vector<double> curve;
    curve.reserve(range.size());
    for (std::size_t k = range.first; k <= range.last; ++k) {
        KMeansConfig cfg = config;
        cfg.k = k;
        curve.push_back(hartigan_wong(data, cfg).total_wss);
    }
    return curve;
}

ElbowPick detect_elbow(std::span<const double> wss, std::size_t first_k) {
    if (wss.size() < 3) throw Error("elbow detection needs W_k for at least three consecutive k");
    ElbowPick pick;
    double best = -std::numeric_limits<double>::infinity();
    double lowest = std::numeric_limits<double>::infinity();
    double scale = 0.0;
    for (double w : wss) scale = std::max(scale, std::abs(w));
    for (std::size_t i = 1; i + 1 < wss.size(); ++i) {
        const double second = wss[i - 1] - 2.0 * wss[i] + wss[i + 1];
        lowest = std::min(lowest, second);
        if (second > best) {
            best = second;
            pick.k = first_k + i;
        }
    }
    if (best - lowest <= 1e-12 * scale) {
        pick.warning = "no distinct elbow: all second differences are equal";
    }
    return pick;
}

Silhouette silhouette_width(const Matrix& data, std::span<const std::size_t> assignments) {
    const std::size_t n = data.rows();
    if (assignments.size() != n) throw Error("assignment count does not match row count");
    std::size_t k = 0;
    for (std::size_t c : assignments) k = std::max(k, c + 1);
    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t c : assignments) ++sizes[c];
    const auto nonempty = std::count_if(sizes.begin(), sizes.end(), [](std::size_t s) { return s > 0; });
    if (nonempty < 2) throw Error("silhouette needs at least two non-empty clusters");
    bool all_equal = true;
    for (std::size_t i = 1; i < n && all_equal; ++i) {
        all_equal = squared_distance(data.row(0), data.row(i)) == 0.0;
    }
    if (all_equal) throw Error("silhouette undefined: all points are identical");

    Silhouette out;
    out.per_point.resize(n);
    std::vector<double> to_cluster(k);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t own = assignments[i];
        if (sizes[own] == 1) {
            out.per_point[i] = 0.0;
            continue;
        }
        std::fill(to_cluster.begin(), to_cluster.end(), 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) to_cluster[assignments[j]] += std::sqrt(squared_distance(data.row(i), data.row(j)));
        }
        const double a = to_cluster[own] / static_cast<double>(sizes[own] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < k; ++c) {
            if (c != own && sizes[c] > 0) b = std::min(b, to_cluster[c] / static_cast<double>(sizes[c]));
        }
        const double denom = std::max(a, b);
        out.per_point[i] = denom > 0.0 ? (b - a) / denom : 0.0;
    }
    double sum = 0.0;
    for (double s : out.per_point) sum += s;
    out.average = sum / static_cast<double>(n);
    return out;
}

GapCurve gap_statistic(const Matrix& data, KRange range, std::size_t bootstrap_count,
                       const KMeansConfig& config, std::uint64_t seed, std::span<const double> data_wss,
                       unsigned threads) {
    const std::size_t n = data.rows();
    const std::size_t d = data.cols();
    check_range(range, n);
    if (bootstrap_count < 1) throw Error("gap statistic needs at least one reference set");
    if (!data_wss.empty() && data_wss.size() != range.size()) {
        throw Error("precomputed W_k curve does not match the k range");
    }

    std::vector<double> lo(d, std::numeric_limits<double>::infinity());
    std::vector<double> hi(d, -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            lo[j] = std::min(lo[j], data(i, j));
            hi[j] = std::max(hi[j], data(i, j));
        }
    }
    for (std::size_t j = 0; j < d; ++j) {
        if (!(hi[j] > lo[j])) {
            throw Error("degenerate bounding box: feature " + std::to_string(j) + " has zero width");
        }
    }

    GapCurve out;
    const std::size_t nk = range.size();
    if (data_wss.empty()) {
        const auto curve = elbow_curve(data, range, config);
        for (double w : curve) out.log_wss.push_back(log_wss(w));
    } else {
        for (double w : data_wss) out.log_wss.push_back(log_wss(w));
    }

    // ref_log[b * nk + ki]
    std::vector<double> ref_log(bootstrap_count * nk);
    parallel_for(bootstrap_count, threads, [&](std::size_t b) {
        Rng rng(derive_seed(seed, streams::gap_reference, b));
        Matrix ref(n, d);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < d; ++j) ref(i, j) = rng.uniform(lo[j], hi[j]);
        }
        KMeansConfig cfg = config;
        cfg.seed = derive_seed(seed, streams::gap_cluster, b);
        for (std::size_t ki = 0; ki < nk; ++ki) {
            cfg.k = range.first + ki;
            ref_log[b * nk + ki] = log_wss(hartigan_wong(ref, cfg).total_wss);
        }
    });

    const auto B = static_cast<double>(bootstrap_count);
    for (std::size_t ki = 0; ki < nk; ++ki) {
        double mean = 0.0;
        for (std::size_t b = 0; b < bootstrap_count; ++b) mean += ref_log[b * nk + ki];
        mean /= B;
        double var = 0.0;
        for (std::size_t b = 0; b < bootstrap_count; ++b) {
            const double dev = ref_log[b * nk + ki] - mean;
            var += dev * dev;
        }
        var /= B;
        out.expected_log_wss.push_back(mean);
        out.gap.push_back(mean - out.log_wss[ki]);
        out.gap_se.push_back(std::sqrt(var) * std::sqrt(1.0 + 1.0 / B));
    }
    return out;
}

Recommendation recommend_k(const ValidationReport& report, std::vector<std::string>* warnings) {
    const KRange range = report.k_range;
    const std::size_t nk = range.size();
    if (nk == 0 || report.wss_curve.size() != nk) throw Error("validation curves are empty or inconsistent");
    auto warn = [&](std::string msg) {
        if (warnings) warnings->push_back(std::move(msg));
    };

    Recommendation rec;
    if (nk >= 3) {
        const auto pick = detect_elbow(report.wss_curve, range.first);
        rec.elbow = pick.k;
        if (pick.warning) warn(*pick.warning);
    } else {
        warn("elbow: needs at least three values of k");
    }

    double best_s = -std::numeric_limits<double>::infinity();
    for (std::size_t ki = 0; ki < report.silhouette_curve.size(); ++ki) {
        const auto& s = report.silhouette_curve[ki];
        if (s && *s > best_s) {
            best_s = *s;
            rec.silhouette = range.first + ki;
        }
    }
    if (!rec.silhouette) warn("silhouette: no k >= 2 in range");

    if (report.gap_curve.size() == nk && report.gap_se.size() == nk) {
        if (report.gap_rule == GapRule::argmax) {
            const auto it = std::max_element(report.gap_curve.begin(), report.gap_curve.end());
            rec.gap = range.first + static_cast<std::size_t>(it - report.gap_curve.begin());
        } else {
            rec.gap = range.last;
            for (std::size_t ki = 0; ki + 1 < nk; ++ki) {
                if (report.gap_curve[ki] >= report.gap_curve[ki + 1] - report.gap_se[ki + 1]) {
                    rec.gap = range.first + ki;
                    break;
                }
            }
        }
    } else {
        warn("gap: curve not computed");
    }
    return rec;
}

ValidationReport validate_k(const Matrix& data, const ValidationOptions& options) {
    ValidationReport report;
    report.bootstrap_count = options.bootstrap_count;
    report.seed = options.seed;
    report.gap_rule = options.gap_rule;

    KRange range = options.range;
    check_range(range, data.rows());
    const std::size_t distinct = distinct_rows(data).size();
    if (range.last >= distinct) {
        if (distinct < 2 || range.first > distinct - 1) {
            throw Error("k range " + std::to_string(range.first) + ".." + std::to_string(range.last) +
                        " leaves no k with a positive W_k (" + std::to_string(distinct) + " distinct rows)");
        }
        report.warnings.push_back("k range capped at " + std::to_string(distinct - 1) +
                                  " so that W_k stays positive");
        range.last = distinct - 1;
    }
    report.k_range = range;

    const std::size_t nk = range.size();
    std::vector<ClusteringResult> fits(nk);
    parallel_for(nk, options.threads, [&](std::size_t ki) {
        KMeansConfig cfg = options.kmeans;
        cfg.k = range.first + ki;
        fits[ki] = hartigan_wong(data, cfg);
    });
    for (std::size_t ki = 0; ki < nk; ++ki) {
        report.wss_curve.push_back(fits[ki].total_wss);
        if (fits[ki].k() >= 2) {
            report.silhouette_curve.emplace_back(silhouette_width(data, fits[ki].assignments).average);
        } else {
            report.silhouette_curve.emplace_back(std::nullopt);
        }
        if (ki > 0 && report.wss_curve[ki] > report.wss_curve[ki - 1]) {
            report.warnings.push_back("W_k increases from k=" + std::to_string(range.first + ki - 1) +
                                      " to k=" + std::to_string(range.first + ki) +
                                      "; more restarts may be needed");
        }
    }

    const auto gap = gap_statistic(data, range, options.bootstrap_count, options.kmeans, options.seed,
                                   report.wss_curve, options.threads);
    report.gap_curve = gap.gap;
    report.gap_se = gap.gap_se;
    report.recommended = recommend_k(report, &report.warnings);
    return report;
}

}  // namespace bikeclust
