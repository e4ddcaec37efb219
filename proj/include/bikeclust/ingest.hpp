#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "bikeclust/date.hpp"

namespace bikeclust {

/// Canonical feature names shared by every stage.
namespace feature {
inline constexpr std::string_view date = "date";
inline constexpr std::string_view count = "count";
inline constexpr std::string_view temperature = "temperature";
inline constexpr std::string_view max_temperature = "max_temperature";
inline constexpr std::string_view min_temperature = "min_temperature";
inline constexpr std::string_view precipitation = "precipitation";
inline constexpr std::string_view wind_speed = "wind_speed";
inline constexpr std::string_view cloud_cover = "cloud_cover";
inline constexpr std::string_view relative_humidity = "relative_humidity";
inline constexpr std::string_view wind_gust = "wind_gust";
inline constexpr std::string_view snow_depth = "snow_depth";
inline constexpr std::string_view wind_chill = "wind_chill";
inline constexpr std::string_view heat_index = "heat_index";
inline constexpr std::string_view conditions = "conditions";
inline constexpr std::string_view address = "address";
inline constexpr std::string_view location = "location";

bool is_numeric_weather(std::string_view name);
bool is_text_weather(std::string_view name);
}  // namespace feature

using DailyCounts = std::map<Date, std::int64_t>;

/// Header names of the two trip columns the toolkit reads. Defaults follow the
/// Capital Bikeshare export layout.
struct TripColumns {
    std::string start_time = "Start date";
    std::string duration = "Duration";
};

/// Counts trips per start date, keeping only trips with duration >= min_duration seconds.
/// Dates without a qualifying trip are absent from the result.
DailyCounts parse_trips(std::istream& in, const TripColumns& columns = {},
                        std::int64_t min_duration = 60);

/// Adds `more` into `into` (for trip data split across several files).
void merge_counts(DailyCounts& into, const DailyCounts& more);

enum class ColumnKind { numeric, text };

struct WeatherColumn {
    std::string name;
    ColumnKind kind = ColumnKind::numeric;
    friend bool operator==(const WeatherColumn&, const WeatherColumn&) = default;
};

/// A weather cell: missing, numeric or free text.
using Cell = std::variant<std::monostate, double, std::string>;

inline bool is_missing(const Cell& c) { return std::holds_alternative<std::monostate>(c); }

struct WeatherRow {
    Date date;
    std::vector<Cell> cells;  // aligned with WeatherTable::columns
    friend bool operator==(const WeatherRow&, const WeatherRow&) = default;
};

struct WeatherTable {
    std::vector<WeatherColumn> columns;
    std::vector<WeatherRow> rows;
    /// Input headers that map to no canonical feature.
    std::vector<std::string> ignored_columns;

    std::optional<std::size_t> column_index(std::string_view name) const;
    friend bool operator==(const WeatherTable&, const WeatherTable&) = default;
};

/// Maps input header spellings to canonical feature names. Headers not listed are
/// normalized (lower case, runs of non-alphanumerics become '_') and matched against the
/// canonical names plus a few Visual Crossing aliases ("Date time", "Minimum Temperature").
struct WeatherMapping {
    std::map<std::string, std::string> headers;
    /// Canonical name for `header`, or empty when the column is not recognized.
    std::string canonical(std::string_view header) const;
};

WeatherTable parse_weather(std::istream& in, const WeatherMapping& mapping = {});

struct DroppedColumn {
    std::string name;
    double missing_fraction = 0.0;
};

struct SparseDropResult {
    WeatherTable table;
    std::vector<DroppedColumn> dropped;
};

/// Removes every column whose fraction of missing cells is strictly greater than
/// `threshold` (0 < threshold <= 1).
SparseDropResult drop_sparse_columns(const WeatherTable& table, double threshold = 0.5);

struct ExcludeResult {
    WeatherTable table;
    std::vector<std::string> excluded;
    std::vector<std::string> warnings;
};

std::vector<std::string> default_excluded_columns();

/// Removes the named columns. Names not present produce one warning each.
ExcludeResult exclude_columns(const WeatherTable& table, const std::vector<std::string>& names);

/// One joined day. `values` is aligned with DailyTable::columns.
struct DailyRecord {
    Date date;
    std::int64_t count = 0;
    std::vector<double> values;
    friend bool operator==(const DailyRecord&, const DailyRecord&) = default;
};

/// The joined per-day table: trip count plus the retained numeric weather columns.
struct DailyTable {
    std::vector<std::string> columns;
    std::vector<DailyRecord> records;

    std::size_t size() const { return records.size(); }
    bool has_column(std::string_view name) const;
    /// Values of a weather column, or the trip counts for "count", in record order.
    std::vector<double> column(std::string_view name) const;

    friend bool operator==(const DailyTable&, const DailyTable&) = default;
};

/// Where the days lost in the join went. A day can be counted under more than one reason.
struct JoinReport {
    std::size_t weather_days = 0;
    std::size_t count_days = 0;
    std::size_t joined_days = 0;
    std::size_t weather_days_without_counts = 0;
    std::size_t count_days_without_weather = 0;
    std::size_t days_with_missing_weather_values = 0;
    /// Distinct dates seen in either input that did not survive the join.
    std::size_t rows_dropped = 0;
};

struct JoinResult {
    DailyTable table;
    JoinReport report;
};

/// Inner join on date. Days missing a count or any retained weather value are dropped.
/// Throws when a text column is still present or when nothing survives.
JoinResult join_daily(const DailyCounts& counts, const WeatherTable& weather);

/// Writes the joined table as CSV (header `date,count,<columns>`).
void write_daily_csv(std::ostream& out, const DailyTable& table);
DailyTable read_daily_csv(std::istream& in);

}  // namespace bikeclust
