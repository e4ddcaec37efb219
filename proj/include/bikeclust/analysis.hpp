#pragma once

#include <array>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "bikeclust/date.hpp"
#include "bikeclust/ingest.hpp"
#include "bikeclust/kmeans.hpp"
#include "bikeclust/preprocess.hpp"

namespace bikeclust {

struct FeatureStats {
    std::string feature;
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
    double median = 0.0;
};

struct ClusterSummary {
    std::size_t cluster_index = 0;
    std::size_t size = 0;
    std::vector<FeatureStats> features;
};

/// Min, max, mean and median of each named feature per cluster, in original units.
/// The median of an even-sized set is the mean of the two middle values.
std::vector<ClusterSummary> cluster_summary(const DailyTable& table, std::span<const std::size_t> assignments,
                                            std::size_t k, const std::vector<std::string>& features);

/// Month to season name. Default is meteorological: Dec-Feb winter, Mar-May spring,
/// Jun-Aug summer, Sep-Nov autumn.
struct SeasonDefinition {
    std::array<std::string, 12> by_month;  ///< index 0 = January

    static SeasonDefinition meteorological();
    const std::string& season_of(const Date& date) const { return by_month[date.month() - 1]; }
    /// Distinct season names in order of first appearance from December onwards.
    std::vector<std::string> names() const;
};

struct SeasonAverage {
    std::string season;
    std::size_t observations = 0;
    std::int64_t total_trips = 0;
    double average_per_day = 0.0;
    std::int64_t average_rounded = 0;
};

struct SeasonalResult {
    std::vector<SeasonAverage> seasons;
    std::vector<std::string> warnings;
};

/// Round half away from zero.
std::int64_t round_half_away(double value);

/// Trips per day for each season: total trips in the season divided by its number of days.
/// Seasons without observations are omitted with a warning.
SeasonalResult seasonal_averages(std::span<const DailyRecord> records,
                                 const SeasonDefinition& seasons = SeasonDefinition::meteorological());

struct CalendarConfig {
    std::set<unsigned> weekend_days{0, 6};  ///< 0 = Sunday ... 6 = Saturday
    std::vector<Date> holidays;

    bool is_working_day(const Date& date) const;
};

/// Reads a holiday list: CSV with header `date[,name]`, one `YYYY-MM-DD` per row.
/// Duplicate dates are rejected.
CalendarConfig read_holidays(std::istream& in);

struct CountStats {
    std::size_t size = 0;
    std::optional<double> mean;
    std::optional<double> median;
};

struct WorkdaySplit {
    std::size_t cluster_index = 0;
    CountStats working;
    CountStats nonworking;
};

struct WorkdayResult {
    std::vector<WorkdaySplit> clusters;
    std::vector<std::string> warnings;
};

/// Trip-count statistics per cluster for working and non-working days. A day is
/// non-working when it falls on a weekend day or a listed holiday.
WorkdayResult workday_split(std::span<const DailyRecord> records, std::span<const std::size_t> assignments,
                            std::size_t k, const CalendarConfig& calendar);

struct AnomalyFlag {
    Date date;
    std::size_t cluster_index = 0;
    double distance_to_centroid = 0.0;  ///< standardized units
    std::size_t rank = 0;               ///< 1 = farthest
    std::string note;
};

struct AnomalyResult {
    std::vector<AnomalyFlag> flags;
    std::vector<std::string> warnings;
};

/// The top_n days farthest from their own centroid in the clustered (standardized)
/// space, farthest first, earlier date first on ties.
AnomalyResult flag_anomalies(const FeatureMatrix& clustered, const ClusteringResult& result, std::size_t top_n);

/// Plot data: one row per day, `date,count,temperature,cluster`.
void write_scatter_csv(std::ostream& out, const DailyTable& table, std::span<const std::size_t> assignments);
/// Plot data: one row per day, `cluster,daytype,count`.
void write_workday_csv(std::ostream& out, const DailyTable& table, std::span<const std::size_t> assignments,
                       const CalendarConfig& calendar);
/// Plot data: one row per day, `cluster,season,count`.
void write_season_csv(std::ostream& out, const DailyTable& table, std::span<const std::size_t> assignments,
                      const SeasonDefinition& seasons);

}  // namespace bikeclust
