#pragma once

#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bikeclust/date.hpp"
#include "bikeclust/ingest.hpp"
#include "bikeclust/matrix.hpp"

namespace bikeclust {

/// Numeric feature table with named columns and the parameters of any standardization
/// applied to it. `column_means`/`column_stds` map standardized values back to original
/// units: original = value * std + mean. For raw data they are 0 and 1.
struct FeatureMatrix {
    std::vector<std::string> feature_names;
    Matrix values;
    std::vector<Date> dates;
    bool standardized = false;
    std::vector<double> column_means;
    std::vector<double> column_stds;

    std::size_t rows() const { return values.rows(); }
    std::size_t cols() const { return values.cols(); }
    std::size_t column_index(std::string_view name) const;
};

/// Builds a raw (unstandardized) feature matrix from the named columns of a daily table.
/// "count" selects the trip count.
FeatureMatrix to_feature_matrix(const DailyTable& table, const std::vector<std::string>& names);

/// All columns of the table, count first.
FeatureMatrix to_feature_matrix(const DailyTable& table);

struct CorrelationMatrix {
    std::vector<std::string> feature_names;
    Matrix values;

    double at(std::string_view a, std::string_view b) const;
};

/// Pearson correlation of every pair of columns. Requires n >= 2 and no constant column.
CorrelationMatrix pearson_correlation(const FeatureMatrix& matrix);

struct SelectionOptions {
    double redundancy_threshold = 0.9;
    std::string target = "count";
    /// When false the target is left out of the returned matrix (sensitivity analysis).
    bool include_target = true;
};

/// A set of features linked by |r| > threshold; only `kept` survives.
struct RedundancyGroup {
    std::vector<std::string> members;
    std::string kept;
};

struct FeatureSelection {
    FeatureMatrix matrix;  // raw units, target first when included
    std::vector<RedundancyGroup> groups;
    std::vector<std::string> dropped;
};

/// Correlation-driven redundancy removal. Features are grouped by connected components of
/// the graph with an edge wherever |r| > redundancy_threshold (target excluded); each group
/// keeps the member with the largest |r| against the target, earlier column on ties.
FeatureSelection select_features(const DailyTable& table, const CorrelationMatrix& corr,
                                 const SelectionOptions& options = {});

/// z-score each column with the sample (n-1) standard deviation. Columns named in
/// `keep_raw` pass through unchanged (recorded as mean 0, std 1). Standardizing an already
/// standardized matrix composes the recorded parameters, so they always refer to the
/// original units.
FeatureMatrix standardize(const FeatureMatrix& matrix, const std::set<std::string>& keep_raw = {});

/// Maps centroids (or any rows) in standardized coordinates back to original units.
Matrix destandardize_centroids(const Matrix& centroids, std::span<const double> column_means,
                               std::span<const double> column_stds);

void write_correlation_csv(std::ostream& out, const CorrelationMatrix& corr);

}  // namespace bikeclust
