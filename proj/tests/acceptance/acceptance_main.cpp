// Acceptance suite: one PASS/FAIL line per criterion. Exits non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "bikeclust/analysis.hpp"
#include "bikeclust/kmeans.hpp"
#include "bikeclust/csv.hpp"
#include "bikeclust/pipeline.hpp"
#include "bikeclust/preprocess.hpp"
#include "bikeclust/validation.hpp"
#include "../test_support.hpp"

using namespace bikeclust;
using namespace bikeclust::testing;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("bikeclust_acceptance_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string fmt(double v, int digits = 9) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

// 1. Seasonal averages from published season totals.
Outcome seasonal_reproduction() {
    struct Season {
        const char* name;
        int year;
        unsigned month;
        std::size_t days;
        std::int64_t total;
    };
    // Consecutive days starting in the season's first month; every run stays inside one season.
    const std::vector<std::vector<Season>> parts{
        {{"autumn", 2018, 9, 91, 896243}, {"autumn", 2019, 9, 91, 896243}},
        {{"spring", 2018, 3, 92, 940763}, {"spring", 2019, 3, 92, 940764}},
        {{"summer", 2018, 6, 61, 775554}, {"summer", 2019, 6, 61, 775555}},
        {{"winter", 2018, 12, 90, 499645}, {"winter", 2019, 12, 90, 499645}},
    };
    const std::map<std::string, std::pair<std::size_t, std::int64_t>> published{
        {"autumn", {182, 1792486}}, {"spring", {184, 1881527}}, {"summer", {122, 1551109}}, {"winter", {180, 999290}}};
    const std::map<std::string, std::int64_t> expected{
        {"autumn", 9849}, {"spring", 10226}, {"summer", 12714}, {"winter", 5552}};

    std::vector<DailyRecord> records;
    for (const auto& season : parts) {
        for (const auto& p : season) {
            Date d(p.year, p.month, 1);
            const auto n = static_cast<std::int64_t>(p.days);
            for (std::int64_t i = 0; i < n; ++i, d = d.plus_days(1)) {
                records.push_back({d, p.total / n + (i < p.total % n ? 1 : 0), {}});
            }
        }
    }
    const auto result = seasonal_averages(records);
    Outcome o{true, ""};
    for (const auto& s : result.seasons) {
        const auto& [days, total] = published.at(s.season);
        const bool ok = s.observations == days && s.total_trips == total && s.average_rounded == expected.at(s.season);
        o.pass = o.pass && ok;
        o.detail += s.season + "=" + std::to_string(s.average_rounded) + " ";
    }
    o.pass = o.pass && result.seasons.size() == 4;
    return o;
}

// 2. Hartigan-Wong against exhaustive enumeration on small instances.
Outcome kmeans_oracle() {
    int matches = 0;
    bool fixed_points = true;
    bool monotone = true;
    Rng rng(20240601);
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 3 + rng.index(6);  // 3..8
        const std::size_t d = 1 + rng.index(2);  // 1..2
        Matrix x(n, d);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < d; ++j) x(i, j) = std::round(rng.uniform(-10, 10) * 100) / 100;
        }
        if (distinct_rows(x).size() < 2) x(0, 0) += 1.0;
        KMeansConfig cfg;
        cfg.k = 2;
        cfg.seed = static_cast<std::uint64_t>(t);
        const auto result = hartigan_wong(x, cfg);
        const double oracle = brute_force_wss_k2(x);
        if (std::abs(result.total_wss - oracle) <= 1e-9) ++matches;
        if (find_improving_transfer(x, result.assignments, result.centroids)) fixed_points = false;

        // Replay every pass and recompute the WSS from scratch after each transfer.
        for (int p = 0; p < cfg.n_configurations; ++p) {
            const auto seed = derive_seed(cfg.seed, streams::kmeans_pass, static_cast<std::uint64_t>(p));
            const Matrix init = init_centroids(x, 2, seed);
            double previous = std::numeric_limits<double>::infinity();
            const auto observer = [&](const TransferEvent& e) {
                std::vector<int> labels(e.assignments.begin(), e.assignments.end());
                const double now = wss_of_labels(x, labels, 2);  // infinite while a cluster is empty
                if (std::isfinite(now) && now > previous + 1e-9) monotone = false;
                previous = now;
            };
            hartigan_wong_pass(x, init, cfg.max_iterations, cfg.tolerance, observer);
        }
    }
    return {matches >= 95 && fixed_points && monotone,
            std::to_string(matches) + "/100 optimal, fixed points " + (fixed_points ? "ok" : "violated") +
                ", monotone WSS " + (monotone ? "ok" : "violated")};
}

// 3. k selection on three separated Gaussian blobs.
Outcome blob_selection() {
    // Unit-variance blobs with centres 12 blob standard deviations apart.
    const Matrix x = gaussian_blobs(simplex_centers(5, 12.0), 300, 3);
    ValidationOptions opts;
    opts.range = {1, 8};
    opts.bootstrap_count = 50;
    opts.seed = 42;
    opts.kmeans.seed = 42;
    const auto r = validate_k(x, opts);
    const double s3 = r.silhouette_curve[2].value_or(0.0);
    auto show = [](const std::optional<std::size_t>& k) { return k ? std::to_string(*k) : std::string("-"); };
    return {r.recommended.gap == 3u && r.recommended.silhouette == 3u && r.recommended.elbow == 3u && s3 > 0.7,
            "gap=" + show(r.recommended.gap) + " silhouette=" + show(r.recommended.silhouette) +
                " elbow=" + show(r.recommended.elbow) + " s(3)=" + fmt(s3, 4)};
}

// 4. Silhouette of {0, 1} and {10, 11} on a line against the stated reference value.
Outcome silhouette_hand_check() {
    const Matrix x{{0.0}, {1.0}, {10.0}, {11.0}};
    const auto s = silhouette_width(x, std::vector<std::size_t>{0, 0, 1, 1});
    const double reference = 0.902380952;
    return {std::abs(s.average - reference) <= 1e-6,
            "average=" + fmt(s.average) + " reference=" + fmt(reference) + " |diff|=" + fmt(std::abs(s.average - reference), 3)};
}

// 5. Ingestion of the 30-day fixture against golden files and independently counted trips.
Outcome ingestion_fidelity() {
    const fs::path out = scratch("ingest");
    auto cfg = load_config(data_path("fixture30/config.json"));
    cfg.output_dir = out;
    run_ingest(cfg);
    const bool report_ok = read_file((out / artifact::cleaning_report).string()) ==
                           read_file(data_path("fixture30/golden/cleaning_report.json"));
    const bool daily_ok = read_file((out / artifact::daily_records).string()) ==
                          read_file(data_path("fixture30/golden/daily_records.csv"));

    const auto report = read_json_file(out / artifact::cleaning_report);
    const bool dropped_ok = report["dropped_columns"].size() == 1 && report["dropped_columns"][0]["name"] == "snow_depth" &&
                            report["excluded_columns"] == Json::array({"conditions"});

    std::ifstream daily_in(out / artifact::daily_records);
    const auto table = read_daily_csv(daily_in);
    std::ifstream counts_in(data_path("fixture30/expected_counts.csv"));
    csv::Reader reader(counts_in);
    reader.next();
    std::map<Date, std::int64_t> counts;
    while (auto rec = reader.next()) counts[Date::parse(rec->fields[0])] = csv::parse_integer(rec->fields[1]).value();
    // Joined days: July 2018 with trips, minus the two days with a missing weather value.
    std::set<Date> expected_days;
    for (const auto& [date, c] : counts) {
        if (date.year() == 2018 && date.month() == 7 && date != Date(2018, 7, 31) && date != Date(2018, 7, 10) &&
            date != Date(2018, 7, 20)) {
            expected_days.insert(date);
        }
    }
    std::set<Date> joined;
    bool counts_ok = true;
    for (const auto& r : table.records) {
        joined.insert(r.date);
        if (counts[r.date] != r.count) counts_ok = false;
    }
    const bool days_ok = joined == expected_days && joined.size() == 27;
    fs::remove_all(out);
    return {report_ok && daily_ok && dropped_ok && counts_ok && days_ok,
            std::string("golden report ") + (report_ok ? "ok" : "differs") + ", golden daily " +
                (daily_ok ? "ok" : "differs") + ", dropped/excluded " + (dropped_ok ? "ok" : "wrong") + ", counts " +
                (counts_ok ? "ok" : "wrong") + ", days " + std::to_string(joined.size())};
}

// 6. Standardization and correlation properties; redundancy selection on correlated temperatures.
Outcome standardization_properties() {
    Rng rng(6);
    double worst_mean = 0, worst_sd = 0;
    bool corr_ok = true;
    for (int t = 0; t < 50; ++t) {
        const std::size_t n = 10 + rng.index(200), d = 2 + rng.index(6);
        FeatureMatrix fm;
        for (std::size_t j = 0; j < d; ++j) fm.feature_names.push_back("f" + std::to_string(j));
        fm.values = Matrix(n, d);
        Date day(2018, 1, 1);
        for (std::size_t i = 0; i < n; ++i, day = day.plus_days(1)) {
            fm.dates.push_back(day);
            for (std::size_t j = 0; j < d; ++j) {
                fm.values(i, j) = rng.uniform(-1000, 1000) * std::pow(10.0, static_cast<double>(j) - 2) + rng.normal();
            }
        }
        fm.column_means.assign(d, 0);
        fm.column_stds.assign(d, 1);
        const auto s = standardize(fm);
        for (std::size_t j = 0; j < d; ++j) {
            double mean = 0, ss = 0;
            for (std::size_t i = 0; i < n; ++i) mean += s.values(i, j);
            mean /= static_cast<double>(n);
            for (std::size_t i = 0; i < n; ++i) ss += (s.values(i, j) - mean) * (s.values(i, j) - mean);
            worst_mean = std::max(worst_mean, std::abs(mean));
            worst_sd = std::max(worst_sd, std::abs(std::sqrt(ss / static_cast<double>(n - 1)) - 1));
        }
        const auto c = pearson_correlation(fm);
        for (std::size_t a = 0; a < d; ++a) {
            if (c.values(a, a) != 1.0) corr_ok = false;
            for (std::size_t b = 0; b < d; ++b) {
                if (c.values(a, b) != c.values(b, a) || c.values(a, b) < -1 || c.values(a, b) > 1) corr_ok = false;
            }
        }
    }

    // Count driven by temperature; max and min temperature track it closely.
    DailyTable table;
    table.columns = {"max_temperature", "min_temperature", "temperature", "precipitation", "wind_speed"};
    Date day(2018, 1, 1);
    for (int i = 0; i < 365; ++i, day = day.plus_days(1)) {
        const double temp = 55 + 25 * std::sin(i / 58.0) + 3 * rng.normal();
        const double precip = rng.uniform01() < 0.7 ? 0.0 : rng.uniform(0, 1.5);
        const double count = 2000 + 110 * temp - 2500 * precip + 500 * rng.normal();
        table.records.push_back({day, static_cast<std::int64_t>(std::max(0.0, count)),
                                 {temp + 9 + 4 * rng.normal(), temp - 9 + 4 * rng.normal(), temp, precip,
                                  rng.uniform(2, 20)}});
    }
    const auto corr = pearson_correlation(to_feature_matrix(table));
    const auto sel = select_features(table, corr);
    const auto& names = sel.matrix.feature_names;
    const auto has = [&](const std::string& n) { return std::find(names.begin(), names.end(), n) != names.end(); };
    std::string best;
    double best_r = -1;
    for (const char* n : {"max_temperature", "min_temperature", "temperature"}) {
        if (std::abs(corr.at(n, "count")) > best_r) best_r = std::abs(corr.at(n, "count")), best = n;
    }
    const int temps_kept = has("max_temperature") + has("min_temperature") + has("temperature");
    const bool selection_ok = temps_kept == 1 && has(best) && has("precipitation") && has("wind_speed");
    return {worst_mean < 1e-9 && worst_sd < 1e-9 && corr_ok && selection_ok,
            "max|mean|=" + fmt(worst_mean, 3) + " max|sd-1|=" + fmt(worst_sd, 3) + ", correlation " +
                (corr_ok ? "ok" : "violated") + ", kept " + (temps_kept == 1 && has(best) ? best : std::string("wrong set"))};
}

// 7. Two storm days among 88 ordinary days are the two strongest anomalies.
Outcome anomaly_fixture() {
    // Ordinary days rotate through three weather regimes (hot and busy, cool and dry, wet
    // and windy), giving k = 3 real structure; the storms belong with the wet days but sit
    // far beyond them.
    Rng rng(90);
    DailyTable table;
    table.columns = {"temperature", "precipitation", "wind_speed"};
    Date day(2018, 8, 1);
    for (int i = 0; i < 90; ++i, day = day.plus_days(1)) {
        if (i == 30) {
            table.records.push_back({day, 2794, {71.7, 4.0, 21.4}});
            continue;
        }
        if (i == 61) {
            table.records.push_back({day, 1208, {51.5, 2.5, 18.4}});
            continue;
        }
        double temp = 0, precip = 0, wind = 0, count = 0;
        switch (i % 3) {
            case 0:
                temp = rng.uniform(80, 90), wind = rng.uniform(3, 9), count = 12000 + 500 * rng.normal();
                break;
            case 1:
                temp = rng.uniform(45, 55), wind = rng.uniform(3, 9), count = 7500 + 500 * rng.normal();
                break;
            default:
                temp = rng.uniform(60, 75), precip = std::round(rng.uniform(0.3, 1.6) * 100) / 100;
                wind = rng.uniform(10, 18), count = 3500 + 500 * rng.normal();
        }
        table.records.push_back({day, static_cast<std::int64_t>(count), {temp, precip, wind}});
    }
    const auto clustered = standardize(to_feature_matrix(table));
    KMeansConfig cfg;
    cfg.k = 3;
    cfg.seed = 2018;
    const auto result = hartigan_wong(clustered, cfg);
    const auto flags = flag_anomalies(clustered, result, 2).flags;
    const std::set<Date> top{flags[0].date, flags[1].date};
    const std::set<Date> storms{table.records[30].date, table.records[61].date};
    return {top == storms, "top-2 " + flags[0].date.to_string() + " (" + fmt(flags[0].distance_to_centroid, 4) + "), " +
                               flags[1].date.to_string() + " (" + fmt(flags[1].distance_to_centroid, 4) + ")"};
}

// 8. Two CLI runs with the same seed give byte-identical JSON artifacts.
Outcome end_to_end_determinism() {
    const fs::path a = scratch("run_a"), b = scratch("run_b");
    const std::string config = data_path("fixture30/config.json");
    auto run = [&](const fs::path& out) {
        const std::string cmd = std::string("\"") + BIKECLUST_CLI + "\" run --config \"" + config + "\" --out \"" +
                                out.string() + "\" >\"" + (out / "log.txt").string() + "\" 2>&1";
        return std::system(cmd.c_str());
    };
    if (run(a) != 0 || run(b) != 0) return {false, "bikeclust run failed: " + read_file((a / "log.txt").string())};
    std::size_t compared = 0, differing = 0;
    for (const auto& entry : fs::directory_iterator(a)) {
        if (entry.path().extension() != ".json") continue;
        ++compared;
        if (read_file(entry.path().string()) != read_file((b / entry.path().filename()).string())) ++differing;
    }
    fs::remove_all(a);
    fs::remove_all(b);
    return {compared == 6 && differing == 0,
            std::to_string(compared) + " JSON artifacts compared, " + std::to_string(differing) + " differ"};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"seasonal averages reproduce 9849/10226/12714/5552", seasonal_reproduction},
        {"k-means matches brute-force optimum on >= 95 of 100 instances", kmeans_oracle},
        {"gap, silhouette and elbow all pick k = 3 on three blobs", blob_selection},
        {"silhouette of {0,1},{10,11} within 1e-6 of 0.902380952", silhouette_hand_check},
        {"ingestion of the 30-day fixture matches golden files", ingestion_fidelity},
        {"standardization and correlation properties", standardization_properties},
        {"storm days are the top-2 anomalies", anomaly_fixture},
        {"end-to-end runs are byte-identical", end_to_end_determinism},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (!o.pass) ++failures;
        std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << i + 1 << ": " << criteria[i].first << " — "
                  << o.detail << " [" << fmt(secs, 3) << " s]\n";
    }
    std::cout << criteria.size() - static_cast<std::size_t>(failures) << "/" << criteria.size() << " criteria passed\n";
    return failures == 0 ? 0 : 1;
}
