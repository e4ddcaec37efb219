#include "bikeclust/ingest.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <set>

#include "bikeclust/csv.hpp"
#include "bikeclust/error.hpp"

namespace bikeclust {

namespace feature {

namespace {
constexpr std::array numeric_names{temperature, max_temperature, min_temperature, precipitation,
                                   wind_speed,  cloud_cover,     relative_humidity, wind_gust,
                                   snow_depth,  wind_chill,      heat_index};
constexpr std::array text_names{conditions, address, location};
}  // namespace

bool is_numeric_weather(std::string_view name) {
    return std::find(numeric_names.begin(), numeric_names.end(), name) != numeric_names.end();
}

bool is_text_weather(std::string_view name) {
    return std::find(text_names.begin(), text_names.end(), name) != text_names.end();
}

}  // namespace feature

namespace {

std::string at_line(std::size_t line) { return "line " + std::to_string(line) + ": "; }

std::string normalize_header(std::string_view header) {
    std::string out;
    bool pending_sep = false;
    for (char ch : csv::trim(header)) {
        const auto c = static_cast<unsigned char>(ch);
        if (std::isalnum(c)) {
            if (pending_sep && !out.empty()) out.push_back('_');
            pending_sep = false;
            out.push_back(static_cast<char>(std::tolower(c)));
        } else {
            pending_sep = true;
        }
    }
    return out;
}

bool is_percent(std::string_view name) {
    return name == feature::cloud_cover || name == feature::relative_humidity;
}

}  // namespace

DailyCounts parse_trips(std::istream& in, const TripColumns& columns, std::int64_t min_duration) {
    csv::Reader reader(in);
    auto header = reader.next();
    if (!header) throw Error("trip CSV is empty (no header row)");

    const auto start_col = csv::find_column(header->fields, columns.start_time);
    if (!start_col) throw Error("trip CSV: missing required column '" + columns.start_time + "'");
    const auto dur_col = csv::find_column(header->fields, columns.duration);
    if (!dur_col) throw Error("trip CSV: missing required column '" + columns.duration + "'");
    const std::size_t width = header->fields.size();

    DailyCounts counts;
    while (auto rec = reader.next()) {
        if (rec->fields.size() != width) {
            throw Error("trip CSV " + at_line(rec->line) + "expected " + std::to_string(width) +
                        " fields, found " + std::to_string(rec->fields.size()));
        }
        const auto duration = csv::parse_integer(rec->fields[*dur_col]);
        if (!duration || *duration < 0) {
            throw Error("trip CSV " + at_line(rec->line) + "invalid duration '" +
                        rec->fields[*dur_col] + "'");
        }
        Date date;
        try {
            date = Date::parse_timestamp(csv::trim(rec->fields[*start_col]));
        } catch (const Error& e) {
            throw Error("trip CSV " + at_line(rec->line) + e.what());
        }
        if (*duration >= min_duration) ++counts[date];
    }
    return counts;
}

void merge_counts(DailyCounts& into, const DailyCounts& more) {
    for (const auto& [date, n] : more) into[date] += n;
}

std::optional<std::size_t> WeatherTable::column_index(std::string_view name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i].name == name) return i;
    }
    return std::nullopt;
}

std::string WeatherMapping::canonical(std::string_view header) const {
    const std::string trimmed(csv::trim(header));
    if (auto it = headers.find(trimmed); it != headers.end()) return it->second;

    const std::string norm = normalize_header(trimmed);
    static const std::map<std::string, std::string, std::less<>> aliases{
        {"date_time", "date"},
        {"datetime", "date"},
        {"minimum_temperature", "min_temperature"},
        {"maximum_temperature", "max_temperature"},
        {"min_temp", "min_temperature"},
        {"max_temp", "max_temperature"},
        {"temp", "temperature"},
        {"precip", "precipitation"},
        {"humidity", "relative_humidity"},
        {"windspeed", "wind_speed"},
        {"windgust", "wind_gust"},
        {"cloudcover", "cloud_cover"},
        {"snowdepth", "snow_depth"},
        {"windchill", "wind_chill"},
    };
    if (auto it = aliases.find(norm); it != aliases.end()) return it->second;
    if (norm == feature::date || feature::is_numeric_weather(norm) || feature::is_text_weather(norm)) {
        return norm;
    }
    return {};
}

WeatherTable parse_weather(std::istream& in, const WeatherMapping& mapping) {
    csv::Reader reader(in);
    auto header = reader.next();
    if (!header) throw Error("weather CSV is empty (no header row)");

    WeatherTable table;
    std::optional<std::size_t> date_col;
    std::vector<std::pair<std::size_t, std::size_t>> source;  // (input field, table column)
    std::set<std::string> seen;
    for (std::size_t i = 0; i < header->fields.size(); ++i) {
        const std::string name = mapping.canonical(header->fields[i]);
        if (name.empty()) {
            table.ignored_columns.emplace_back(csv::trim(header->fields[i]));
            continue;
        }
        if (!seen.insert(name).second) {
            throw Error("weather CSV: two columns map to '" + name + "'");
        }
        if (name == feature::date) {
            date_col = i;
            continue;
        }
        source.emplace_back(i, table.columns.size());
        table.columns.push_back(
            {name, feature::is_numeric_weather(name) ? ColumnKind::numeric : ColumnKind::text});
    }
    if (!date_col) throw Error("weather CSV: no date column in header");

    std::set<Date> dates;
    const std::size_t width = header->fields.size();
    while (auto rec = reader.next()) {
        if (rec->fields.size() != width) {
            throw Error("weather CSV " + at_line(rec->line) + "expected " + std::to_string(width) +
                        " fields, found " + std::to_string(rec->fields.size()));
        }
        WeatherRow row;
        try {
            row.date = Date::parse(csv::trim(rec->fields[*date_col]));
        } catch (const Error& e) {
            throw Error("weather CSV " + at_line(rec->line) + e.what());
        }
        if (!dates.insert(row.date).second) {
            throw Error("weather CSV " + at_line(rec->line) + "duplicate date " +
                        row.date.to_string());
        }
        row.cells.resize(table.columns.size());
        for (const auto& [field, col] : source) {
            const std::string_view raw = csv::trim(rec->fields[field]);
            if (raw.empty()) continue;
            const auto& column = table.columns[col];
            if (column.kind == ColumnKind::text) {
                row.cells[col] = std::string(raw);
                continue;
            }
            const auto value = csv::parse_double(raw);
            if (!value) {
                throw Error("weather CSV " + at_line(rec->line) + "column '" + column.name +
                            "': non-numeric value '" + std::string(raw) + "'");
            }
            if (is_percent(column.name) && (*value < 0.0 || *value > 100.0)) {
                throw Error("weather CSV " + at_line(rec->line) + "column '" + column.name +
                            "': percentage " + std::string(raw) + " outside [0, 100]");
            }
            if (column.name == feature::precipitation && *value < 0.0) {
                throw Error("weather CSV " + at_line(rec->line) +
                            "column 'precipitation': negative value " + std::string(raw));
            }
            row.cells[col] = *value;
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

namespace {

WeatherTable keep_columns(const WeatherTable& table, const std::vector<bool>& keep) {
    WeatherTable out;
    out.ignored_columns = table.ignored_columns;
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        if (keep[c]) out.columns.push_back(table.columns[c]);
    }
    out.rows.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        WeatherRow r{row.date, {}};
        for (std::size_t c = 0; c < row.cells.size(); ++c) {
            if (keep[c]) r.cells.push_back(row.cells[c]);
        }
        out.rows.push_back(std::move(r));
    }
    return out;
}

}  // namespace

SparseDropResult drop_sparse_columns(const WeatherTable& table, double threshold) {
    if (!(threshold > 0.0 && threshold <= 1.0)) {
        throw Error("missing-data threshold must lie in (0, 1]");
    }
    SparseDropResult result;
    std::vector<bool> keep(table.columns.size(), true);
    const auto n = static_cast<double>(table.rows.size());
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        if (table.rows.empty()) break;
        const auto missing = std::count_if(table.rows.begin(), table.rows.end(),
                                           [c](const WeatherRow& r) { return is_missing(r.cells[c]); });
        const double fraction = static_cast<double>(missing) / n;
        if (fraction > threshold) {
            keep[c] = false;
            result.dropped.push_back({table.columns[c].name, fraction});
        }
    }
    result.table = keep_columns(table, keep);
    return result;
}

std::vector<std::string> default_excluded_columns() {
    return {std::string(feature::conditions), std::string(feature::address),
            std::string(feature::location)};
}

ExcludeResult exclude_columns(const WeatherTable& table, const std::vector<std::string>& names) {
    ExcludeResult result;
    std::vector<bool> keep(table.columns.size(), true);
    for (const auto& name : names) {
        const auto idx = table.column_index(name);
        if (!idx) {
            result.warnings.push_back("excluded column '" + name + "' not present in weather data");
            continue;
        }
        if (keep[*idx]) {
            keep[*idx] = false;
            result.excluded.push_back(name);
        }
    }
    result.table = keep_columns(table, keep);
    return result;
}

bool DailyTable::has_column(std::string_view name) const {
    return name == feature::count || std::find(columns.begin(), columns.end(), name) != columns.end();
}

std::vector<double> DailyTable::column(std::string_view name) const {
    std::vector<double> out;
    out.reserve(records.size());
    if (name == feature::count) {
        for (const auto& r : records) out.push_back(static_cast<double>(r.count));
        return out;
    }
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw Error("daily table has no column '" + std::string(name) + "'");
    const auto c = static_cast<std::size_t>(it - columns.begin());
    for (const auto& r : records) out.push_back(r.values[c]);
    return out;
}

JoinResult join_daily(const DailyCounts& counts, const WeatherTable& weather) {
    for (const auto& col : weather.columns) {
        if (col.kind == ColumnKind::text) {
            throw Error("weather column '" + col.name +
                        "' is nominal and cannot be clustered; exclude it before joining");
        }
    }
    JoinResult result;
    auto& report = result.report;
    report.weather_days = weather.rows.size();
    report.count_days = counts.size();
    for (const auto& col : weather.columns) result.table.columns.push_back(col.name);

    std::set<Date> weather_dates;
    for (const auto& row : weather.rows) {
        weather_dates.insert(row.date);
        const auto it = counts.find(row.date);
        const bool complete = std::none_of(row.cells.begin(), row.cells.end(), is_missing);
        if (it == counts.end()) ++report.weather_days_without_counts;
        if (!complete) ++report.days_with_missing_weather_values;
        if (it == counts.end() || !complete) continue;

        DailyRecord rec{row.date, it->second, {}};
        rec.values.reserve(row.cells.size());
        for (const auto& cell : row.cells) rec.values.push_back(std::get<double>(cell));
        result.table.records.push_back(std::move(rec));
    }
    for (const auto& [date, n] : counts) {
        if (!weather_dates.count(date)) ++report.count_days_without_weather;
    }
    std::sort(result.table.records.begin(), result.table.records.end(),
              [](const DailyRecord& a, const DailyRecord& b) { return a.date < b.date; });

    report.joined_days = result.table.records.size();
    report.rows_dropped = weather_dates.size() + report.count_days_without_weather - report.joined_days;
    if (result.table.records.empty()) {
        throw Error("join of trip counts and weather produced no complete days (" +
                    std::to_string(report.count_days) + " count days, " +
                    std::to_string(report.weather_days) + " weather days)");
    }
    return result;
}

void write_daily_csv(std::ostream& out, const DailyTable& table) {
    out << "date,count";
    for (const auto& c : table.columns) out << ',' << csv::escape(c);
    out << '\n';
    for (const auto& r : table.records) {
        out << r.date.to_string() << ',' << r.count;
        for (double v : r.values) out << ',' << csv::format_double(v);
        out << '\n';
    }
}

DailyTable read_daily_csv(std::istream& in) {
    csv::Reader reader(in);
    auto header = reader.next();
    if (!header || header->fields.size() < 2 || header->fields[0] != feature::date ||
        header->fields[1] != feature::count) {
        throw Error("daily table CSV must start with header 'date,count'");
    }
    DailyTable table;
    table.columns.assign(header->fields.begin() + 2, header->fields.end());
    std::set<Date> dates;
    while (auto rec = reader.next()) {
        if (rec->fields.size() != header->fields.size()) {
            throw Error("daily table " + at_line(rec->line) + "wrong number of fields");
        }
        DailyRecord r;
        try {
            r.date = Date::parse(rec->fields[0]);
        } catch (const Error& e) {
            throw Error("daily table " + at_line(rec->line) + e.what());
        }
        if (!dates.insert(r.date).second) {
            throw Error("daily table " + at_line(rec->line) + "duplicate date");
        }
        const auto count = csv::parse_integer(rec->fields[1]);
        if (!count || *count < 0) throw Error("daily table " + at_line(rec->line) + "invalid count");
        r.count = *count;
        for (std::size_t c = 2; c < rec->fields.size(); ++c) {
            const auto v = csv::parse_double(rec->fields[c]);
            if (!v) {
                throw Error("daily table " + at_line(rec->line) + "missing or non-numeric '" +
                            table.columns[c - 2] + "'");
            }
            r.values.push_back(*v);
        }
        table.records.push_back(std::move(r));
    }
    return table;
}

}  // namespace bikeclust
