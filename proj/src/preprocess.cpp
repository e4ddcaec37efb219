#include "bikeclust/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bikeclust/csv.hpp"
#include "bikeclust/error.hpp"

namespace bikeclust {

std::size_t FeatureMatrix::column_index(std::string_view name) const {
    const auto it = std::find(feature_names.begin(), feature_names.end(), name);
    if (it == feature_names.end()) throw Error("feature matrix has no column '" + std::string(name) + "'");
    return static_cast<std::size_t>(it - feature_names.begin());
}

FeatureMatrix to_feature_matrix(const DailyTable& table, const std::vector<std::string>& names) {
    FeatureMatrix fm;
    fm.feature_names = names;
    fm.values = Matrix(table.size(), names.size());
    for (std::size_t c = 0; c < names.size(); ++c) {
        const auto col = table.column(names[c]);
        for (std::size_t r = 0; r < col.size(); ++r) fm.values(r, c) = col[r];
    }
    fm.dates.reserve(table.size());
    for (const auto& rec : table.records) fm.dates.push_back(rec.date);
    fm.column_means.assign(names.size(), 0.0);
    fm.column_stds.assign(names.size(), 1.0);
    return fm;
}

FeatureMatrix to_feature_matrix(const DailyTable& table) {
    std::vector<std::string> names{std::string(feature::count)};
    names.insert(names.end(), table.columns.begin(), table.columns.end());
    return to_feature_matrix(table, names);
}

double CorrelationMatrix::at(std::string_view a, std::string_view b) const {
    auto index = [this](std::string_view name) {
        const auto it = std::find(feature_names.begin(), feature_names.end(), name);
        if (it == feature_names.end()) throw Error("correlation matrix has no feature '" + std::string(name) + "'");
        return static_cast<std::size_t>(it - feature_names.begin());
    };
    return values(index(a), index(b));
}

namespace {

struct ColumnMoments {
    double mean = 0.0;
    double sum_sq = 0.0;  // sum of squared deviations
};

ColumnMoments moments(const Matrix& m, std::size_t c) {
    ColumnMoments out;
    const auto n = static_cast<double>(m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r) out.mean += m(r, c);
    out.mean /= n;
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const double d = m(r, c) - out.mean;
        out.sum_sq += d * d;
    }
    return out;
}

}  // namespace

CorrelationMatrix pearson_correlation(const FeatureMatrix& matrix) {
    const std::size_t n = matrix.rows();
    const std::size_t d = matrix.cols();
    if (n < 2) throw Error("correlation needs at least two observations");

    std::vector<ColumnMoments> mom(d);
    for (std::size_t c = 0; c < d; ++c) {
        mom[c] = moments(matrix.values, c);
        if (!(mom[c].sum_sq > 0.0)) {
            throw Error("column '" + matrix.feature_names[c] + "' is constant; correlation undefined");
        }
    }
    CorrelationMatrix corr{matrix.feature_names, Matrix(d, d)};
    for (std::size_t i = 0; i < d; ++i) {
        corr.values(i, i) = 1.0;
        for (std::size_t j = i + 1; j < d; ++j) {
            double cross = 0.0;
            for (std::size_t r = 0; r < n; ++r) {
                cross += (matrix.values(r, i) - mom[i].mean) * (matrix.values(r, j) - mom[j].mean);
            }
            const double rho = std::clamp(cross / std::sqrt(mom[i].sum_sq * mom[j].sum_sq), -1.0, 1.0);
            corr.values(i, j) = rho;
            corr.values(j, i) = rho;
        }
    }
    return corr;
}

FeatureSelection select_features(const DailyTable& table, const CorrelationMatrix& corr,
                                 const SelectionOptions& options) {
    const auto& names = corr.feature_names;
    const auto target_it = std::find(names.begin(), names.end(), options.target);
    if (target_it == names.end()) {
        throw Error("target feature '" + options.target + "' missing from correlation matrix");
    }
    const auto target = static_cast<std::size_t>(target_it - names.begin());
    const std::size_t d = names.size();

    // Union-find over non-target features joined by strong correlation.
    std::vector<std::size_t> parent(d);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i + 1; j < d; ++j) {
            if (i == target || j == target) continue;
            if (std::abs(corr.values(i, j)) > options.redundancy_threshold) {
                parent[find(j)] = find(i);
            }
        }
    }

    FeatureSelection sel;
    std::vector<bool> keep(d, true);
    std::vector<bool> visited(d, false);
    for (std::size_t i = 0; i < d; ++i) {
        if (i == target || visited[i]) continue;
        std::vector<std::size_t> members;
        for (std::size_t j = i; j < d; ++j) {
            if (j != target && find(j) == find(i)) {
                members.push_back(j);
                visited[j] = true;
            }
        }
        if (members.size() < 2) continue;
        std::size_t best = members.front();
        for (std::size_t m : members) {
            if (std::abs(corr.values(m, target)) > std::abs(corr.values(best, target))) best = m;
        }
        RedundancyGroup group;
        for (std::size_t m : members) {
            group.members.push_back(names[m]);
            if (m != best) {
                keep[m] = false;
                sel.dropped.push_back(names[m]);
            }
        }
        group.kept = names[best];
        sel.groups.push_back(std::move(group));
    }

    std::vector<std::string> retained;
    if (options.include_target) retained.push_back(options.target);
    for (std::size_t i = 0; i < d; ++i) {
        if (i != target && keep[i]) retained.push_back(names[i]);
    }
    sel.matrix = to_feature_matrix(table, retained);
    return sel;
}

FeatureMatrix standardize(const FeatureMatrix& matrix, const std::set<std::string>& keep_raw) {
    if (matrix.rows() < 2) throw Error("standardization needs at least two observations");
    FeatureMatrix out = matrix;
    const auto n = static_cast<double>(matrix.rows());
    for (std::size_t c = 0; c < matrix.cols(); ++c) {
        if (keep_raw.count(matrix.feature_names[c])) continue;
        const auto mom = moments(matrix.values, c);
        const double sd = std::sqrt(mom.sum_sq / (n - 1.0));
        if (!(sd > 0.0) || !std::isfinite(sd)) {
            throw Error("column '" + matrix.feature_names[c] + "' has zero variance; cannot standardize");
        }
        for (std::size_t r = 0; r < matrix.rows(); ++r) {
            out.values(r, c) = (matrix.values(r, c) - mom.mean) / sd;
        }
        out.column_means[c] = matrix.column_means[c] + matrix.column_stds[c] * mom.mean;
        out.column_stds[c] = matrix.column_stds[c] * sd;
    }
    out.standardized = true;
    return out;
}

Matrix destandardize_centroids(const Matrix& centroids, std::span<const double> column_means,
                               std::span<const double> column_stds) {
    if (column_means.size() != centroids.cols() || column_stds.size() != centroids.cols()) {
        throw Error("destandardize: centroid dimension " + std::to_string(centroids.cols()) +
                    " does not match " + std::to_string(column_means.size()) + " parameters");
    }
    Matrix out = centroids;
    for (std::size_t r = 0; r < out.rows(); ++r) {
        for (std::size_t c = 0; c < out.cols(); ++c) {
            out(r, c) = centroids(r, c) * column_stds[c] + column_means[c];
        }
    }
    return out;
}

void write_correlation_csv(std::ostream& out, const CorrelationMatrix& corr) {
    out << "feature";
    for (const auto& name : corr.feature_names) out << ',' << csv::escape(name);
    out << '\n';
    for (std::size_t i = 0; i < corr.feature_names.size(); ++i) {
        out << csv::escape(corr.feature_names[i]);
        for (std::size_t j = 0; j < corr.feature_names.size(); ++j) {
            out << ',' << csv::format_double(corr.values(i, j));
        }
        out << '\n';
    }
}

}  // namespace bikeclust
