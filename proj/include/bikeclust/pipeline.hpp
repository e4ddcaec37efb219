#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "bikeclust/analysis.hpp"
#include "bikeclust/error.hpp"
#include "bikeclust/ingest.hpp"
#include "bikeclust/kmeans.hpp"
#include "bikeclust/preprocess.hpp"
#include "bikeclust/validation.hpp"
#include "json.hpp"

namespace bikeclust {

using Json = nlohmann::ordered_json;

/// Failure inside one pipeline stage; what() starts with the stage name.
class StageError : public Error {
public:
    StageError(std::string stage, const std::string& message)
        : Error("stage '" + stage + "': " + message), stage_(std::move(stage)) {}
    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

/// File names of the stage artifacts inside the output directory.
namespace artifact {
inline constexpr std::string_view cleaning_report = "cleaning_report.json";
inline constexpr std::string_view daily_records = "daily_records.csv";
inline constexpr std::string_view correlation = "correlation.csv";
inline constexpr std::string_view standardization = "standardization.json";
inline constexpr std::string_view feature_selection = "feature_selection.json";
inline constexpr std::string_view validation_report = "validation_report.json";
inline constexpr std::string_view validation_curves = "validation_curves.csv";
inline constexpr std::string_view clustering_result = "clustering_result.json";
inline constexpr std::string_view analysis_report = "analysis_report.json";
inline constexpr std::string_view plot_scatter = "plot_scatter.csv";
inline constexpr std::string_view plot_workday = "plot_workday.csv";
inline constexpr std::string_view plot_season = "plot_season.csv";
}  // namespace artifact

struct PipelineConfig {
    // Input paths as written in the config file; resolved against base_dir.
    std::vector<std::string> trips;
    std::string weather;
    std::string holidays;  ///< optional
    std::filesystem::path base_dir;

    TripColumns trip_columns;
    WeatherMapping weather_mapping;

    std::int64_t min_trip_seconds = 60;
    double missing_threshold = 0.5;
    std::vector<std::string> exclude = default_excluded_columns();

    double redundancy_threshold = 0.9;
    bool include_count = true;
    std::set<std::string> keep_raw;

    std::optional<std::size_t> k;
    KRange k_range{1, 10};
    int max_iterations = 10;
    int n_configurations = 25;
    double tolerance = 0.0;
    InitMethod init = InitMethod::random_rows;

    std::size_t bootstrap_count = 50;
    GapRule gap_rule = GapRule::one_standard_error;
    std::string k_method = "gap";  ///< which recommendation `cluster` uses when k is unset

    std::size_t top_anomalies = 10;
    SeasonDefinition seasons = SeasonDefinition::meteorological();
    std::set<unsigned> weekend_days{0, 6};

    std::uint64_t seed = 1;
    unsigned threads = 0;
    std::filesystem::path output_dir = "out";

    std::filesystem::path resolve(const std::string& path) const;
};

/// Builds a config from JSON. Missing keys keep their defaults; unknown keys are rejected.
PipelineConfig config_from_json(const Json& json, const std::filesystem::path& base_dir = {});
PipelineConfig load_config(const std::filesystem::path& path);

/// Effective configuration (output directory omitted) in canonical form.
Json config_to_json(const PipelineConfig& config);

/// 64-bit FNV-1a over the canonical config JSON, as 16 hex digits.
std::string config_digest(const PipelineConfig& config);

/// Parses `A..B` into an inclusive range.
KRange parse_k_range(std::string_view text);

/// Features after correlation-driven selection and standardization.
struct PreparedFeatures {
    CorrelationMatrix correlation;
    FeatureSelection selection;
    FeatureMatrix clustered;  ///< standardized
};
PreparedFeatures prepare_features(const DailyTable& table, const PipelineConfig& config);

KMeansConfig kmeans_config(const PipelineConfig& config, std::size_t k);

// Stages. Each reads the artifacts of earlier stages from config.output_dir and writes its
// own there. run_pipeline runs them in order.
void run_ingest(const PipelineConfig& config);
void run_validate(const PipelineConfig& config);
void run_cluster(const PipelineConfig& config);
void run_report(const PipelineConfig& config);
void run_pipeline(const PipelineConfig& config);

// Artifact serialization.
Json cleaning_report_json(const SparseDropResult& sparse, const ExcludeResult& excluded, const JoinReport& join,
                          const std::vector<std::string>& ignored_columns);
Json validation_report_json(const ValidationReport& report);
void write_validation_csv(std::ostream& out, const ValidationReport& report);
Json standardization_json(const FeatureMatrix& matrix);
Json clustering_result_json(const ClusteringResult& result, const FeatureMatrix& clustered);
ClusteringResult clustering_result_from_json(const Json& json, std::vector<Date>* dates = nullptr);

/// Writes JSON with two-space indentation and a trailing newline.
void write_json_file(const std::filesystem::path& path, const Json& json);
Json read_json_file(const std::filesystem::path& path);

}  // namespace bikeclust
