#include "bikeclust/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bikeclust/csv.hpp"
#include "bikeclust/error.hpp"

namespace bikeclust {

namespace {

double median_of(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const std::size_t m = values.size() / 2;
    return values.size() % 2 == 1 ? values[m] : 0.5 * (values[m - 1] + values[m]);
}

double mean_of(const std::vector<double>& values) {
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

void check_assignments(std::size_t records, std::span<const std::size_t> assignments, std::size_t k) {
    if (assignments.size() != records) {
        throw Error("assignments cover " + std::to_string(assignments.size()) + " of " +
                    std::to_string(records) + " records");
    }
    for (std::size_t c : assignments) {
        if (c >= k) throw Error("cluster index " + std::to_string(c) + " out of range");
    }
}

}  // namespace

std::vector<ClusterSummary> cluster_summary(const DailyTable& table, std::span<const std::size_t> assignments,
                                            std::size_t k, const std::vector<std::string>& features) {
    check_assignments(table.size(), assignments, k);
    std::vector<std::vector<double>> columns;
    columns.reserve(features.size());
    for (const auto& f : features) columns.push_back(table.column(f));

    std::vector<ClusterSummary> out(k);
    for (std::size_t c = 0; c < k; ++c) {
        out[c].cluster_index = c;
        out[c].size = static_cast<std::size_t>(std::count(assignments.begin(), assignments.end(), c));
        if (out[c].size == 0) continue;
        for (std::size_t f = 0; f < features.size(); ++f) {
            std::vector<double> vals;
            vals.reserve(out[c].size);
            for (std::size_t i = 0; i < assignments.size(); ++i) {
                if (assignments[i] == c) vals.push_back(columns[f][i]);
            }
            const auto [lo, hi] = std::minmax_element(vals.begin(), vals.end());
            out[c].features.push_back({features[f], *lo, *hi, mean_of(vals), median_of(vals)});
        }
    }
    return out;
}

SeasonDefinition SeasonDefinition::meteorological() {
    SeasonDefinition s;
    s.by_month = {"winter", "winter", "spring", "spring", "spring", "summer",
                  "summer", "summer", "autumn", "autumn", "autumn", "winter"};
    return s;
}

std::vector<std::string> SeasonDefinition::names() const {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < 12; ++i) {
        const auto& name = by_month[(i + 11) % 12];
        if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
    }
    return out;
}

std::int64_t round_half_away(double value) { return static_cast<std::int64_t>(std::round(value)); }

SeasonalResult seasonal_averages(std::span<const DailyRecord> records, const SeasonDefinition& seasons) {
    if (records.empty()) throw Error("seasonal averages need at least one record");
    SeasonalResult out;
    for (const auto& name : seasons.names()) {
        SeasonAverage avg;
        avg.season = name;
        for (const auto& r : records) {
            if (seasons.season_of(r.date) != name) continue;
            ++avg.observations;
            avg.total_trips += r.count;
        }
        if (avg.observations == 0) {
            out.warnings.push_back("season '" + name + "' has no observations");
            continue;
        }
        avg.average_per_day = static_cast<double>(avg.total_trips) / static_cast<double>(avg.observations);
        avg.average_rounded = round_half_away(avg.average_per_day);
        out.seasons.push_back(std::move(avg));
    }
    return out;
}

bool CalendarConfig::is_working_day(const Date& date) const {
    if (weekend_days.count(date.weekday())) return false;
    return std::find(holidays.begin(), holidays.end(), date) == holidays.end();
}

CalendarConfig read_holidays(std::istream& in) {
    csv::Reader reader(in);
    auto header = reader.next();
    if (!header || header->fields.empty() || csv::trim(header->fields[0]) != "date") {
        throw Error("holiday file must start with a 'date' header");
    }
    CalendarConfig cal;
    std::set<Date> seen;
    while (auto rec = reader.next()) {
        Date d;
        try {
            d = Date::parse(csv::trim(rec->fields[0]));
        } catch (const Error& e) {
            throw Error("holiday file line " + std::to_string(rec->line) + ": " + e.what());
        }
        if (!seen.insert(d).second) {
            throw Error("holiday file line " + std::to_string(rec->line) + ": duplicate date " + d.to_string());
        }
        cal.holidays.push_back(d);
    }
    return cal;
}

WorkdayResult workday_split(std::span<const DailyRecord> records, std::span<const std::size_t> assignments,
                            std::size_t k, const CalendarConfig& calendar) {
    check_assignments(records.size(), assignments, k);
    WorkdayResult out;

    std::set<int> covered;
    for (const auto& h : calendar.holidays) covered.insert(h.year());
    std::set<int> uncovered;
    for (const auto& r : records) {
        if (!covered.count(r.date.year())) uncovered.insert(r.date.year());
    }
    for (int y : uncovered) {
        out.warnings.push_back("holiday calendar has no entries for " + std::to_string(y));
    }

    auto stats = [](const std::vector<double>& counts) {
        CountStats s;
        s.size = counts.size();
        if (!counts.empty()) {
            s.mean = mean_of(counts);
            s.median = median_of(counts);
        }
        return s;
    };
    for (std::size_t c = 0; c < k; ++c) {
        std::vector<double> working;
        std::vector<double> nonworking;
        for (std::size_t i = 0; i < records.size(); ++i) {
            if (assignments[i] != c) continue;
            const auto count = static_cast<double>(records[i].count);
            (calendar.is_working_day(records[i].date) ? working : nonworking).push_back(count);
        }
        out.clusters.push_back({c, stats(working), stats(nonworking)});
    }
    return out;
}

AnomalyResult flag_anomalies(const FeatureMatrix& clustered, const ClusteringResult& result, std::size_t top_n) {
    if (top_n < 1) throw Error("top_n must be at least 1");
    const std::size_t n = clustered.rows();
    check_assignments(n, result.assignments, result.k());
    if (clustered.dates.size() != n) throw Error("feature matrix has no dates for its rows");
    if (result.centroids.cols() != clustered.cols()) throw Error("centroid dimension does not match features");

    AnomalyResult out;
    if (top_n > n) {
        out.warnings.push_back("requested " + std::to_string(top_n) + " anomalies but only " +
                               std::to_string(n) + " days exist");
        top_n = n;
    }
    std::vector<double> dist(n);
    for (std::size_t i = 0; i < n; ++i) {
        dist[i] = euclidean_distance(clustered.values.row(i), result.centroids.row(result.assignments[i]));
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (dist[a] != dist[b]) return dist[a] > dist[b];
        return clustered.dates[a] < clustered.dates[b];
    });
    for (std::size_t r = 0; r < top_n; ++r) {
        const std::size_t i = order[r];
        const std::size_t c = result.assignments[i];
        std::size_t worst = 0;
        double worst_dev = 0.0;
        for (std::size_t j = 0; j < clustered.cols(); ++j) {
            const double dev = clustered.values(i, j) - result.centroids(c, j);
            if (std::abs(dev) > std::abs(worst_dev)) {
                worst_dev = dev;
                worst = j;
            }
        }
        std::string note;
        if (clustered.cols() > 0) {
            const double original = clustered.values(i, worst) * clustered.column_stds[worst] +
                                    clustered.column_means[worst];
            note = "largest deviation in " + clustered.feature_names[worst] + " (value " +
                   csv::format_double(original) + ", " + (worst_dev >= 0 ? "+" : "") +
                   csv::format_double(std::round(worst_dev * 100.0) / 100.0) + " from centroid)";
        }
        out.flags.push_back({clustered.dates[i], c, dist[i], r + 1, std::move(note)});
    }
    return out;
}

void write_scatter_csv(std::ostream& out, const DailyTable& table, std::span<const std::size_t> assignments) {
    if (assignments.size() != table.size()) throw Error("assignments do not cover the table");
    const auto temps = table.column(feature::temperature);
    out << "date,count,temperature,cluster\n";
    for (std::size_t i = 0; i < table.size(); ++i) {
        out << table.records[i].date.to_string() << ',' << table.records[i].count << ','
            << csv::format_double(temps[i]) << ',' << assignments[i] << '\n';
    }
}

void write_workday_csv(std::ostream& out, const DailyTable& table, std::span<const std::size_t> assignments,
                       const CalendarConfig& calendar) {
    if (assignments.size() != table.size()) throw Error("assignments do not cover the table");
    out << "cluster,daytype,count\n";
    for (std::size_t i = 0; i < table.size(); ++i) {
        const auto& r = table.records[i];
        out << assignments[i] << ',' << (calendar.is_working_day(r.date) ? "working" : "nonworking") << ','
            << r.count << '\n';
    }
}

void write_season_csv(std::ostream& out, const DailyTable& table, std::span<const std::size_t> assignments,
                      const SeasonDefinition& seasons) {
    if (assignments.size() != table.size()) throw Error("assignments do not cover the table");
    out << "cluster,season,count\n";
    for (std::size_t i = 0; i < table.size(); ++i) {
        const auto& r = table.records[i];
        out << assignments[i] << ',' << csv::escape(seasons.season_of(r.date)) << ',' << r.count << '\n';
    }
}

}  // namespace bikeclust
