#include "bikeclust/pipeline.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "bikeclust/csv.hpp"

namespace bikeclust {

namespace fs = std::filesystem;

namespace {

void reject_unknown(const Json& obj, std::initializer_list<std::string_view> known, std::string_view where) {
    if (!obj.is_object()) throw Error("config: '" + std::string(where) + "' must be an object");
    for (const auto& [key, value] : obj.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw Error("config: unknown key '" + key + "' in '" + std::string(where) + "'");
        }
    }
}

template <class T>
void read(const Json& obj, const char* key, T& out) {
    if (obj.contains(key)) {
        try {
            out = obj.at(key).get<T>();
        } catch (const nlohmann::json::exception&) {
            throw Error(std::string("config: key '") + key + "' has the wrong type");
        }
    }
}

std::string init_name(InitMethod m) { return m == InitMethod::random_rows ? "random" : "kmeans++"; }
std::string gap_rule_name(GapRule r) { return r == GapRule::one_standard_error ? "one_se" : "argmax"; }

std::ifstream open_input(const fs::path& path, std::string_view what) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + std::string(what) + " '" + path.string() + "'");
    return in;
}

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw Error("failed writing '" + path.string() + "'");
}

template <class Fn>
void write_with(const fs::path& path, Fn&& fn) {
    std::ostringstream os;
    fn(os);
    write_text_file(path, os.str());
}

template <class Fn>
void stage(const char* name, Fn&& fn) {
    try {
        fn();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(name, e.what());
    }
}

DailyTable load_daily(const PipelineConfig& config) {
    const fs::path path = config.output_dir / artifact::daily_records;
    if (!fs::exists(path)) {
        throw Error("missing '" + path.string() + "'; run `bikeclust ingest` first");
    }
    auto in = open_input(path, "daily table");
    return read_daily_csv(in);
}

Json provenance(const PipelineConfig& config) {
    return Json{{"seed", config.seed}, {"config_digest", config_digest(config)}};
}

Json merge(Json head, const Json& tail) {
    for (const auto& [key, value] : tail.items()) head[key] = value;
    return head;
}

}  // namespace

fs::path PipelineConfig::resolve(const std::string& path) const {
    const fs::path p(path);
    return p.is_absolute() || base_dir.empty() ? p : base_dir / p;
}

KRange parse_k_range(std::string_view text) {
    const auto dots = text.find("..");
    auto parse = [&](std::string_view s) {
        std::size_t v = 0;
        const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
            throw Error("invalid k range '" + std::string(text) + "' (expected A..B)");
        }
        return v;
    };
    if (dots == std::string_view::npos) throw Error("invalid k range '" + std::string(text) + "' (expected A..B)");
    KRange r{parse(text.substr(0, dots)), parse(text.substr(dots + 2))};
    if (r.first < 1 || r.last < r.first) throw Error("invalid k range '" + std::string(text) + "'");
    return r;
}

PipelineConfig config_from_json(const Json& json, const fs::path& base_dir) {
    PipelineConfig c;
    c.base_dir = base_dir;
    reject_unknown(json,
                   {"inputs", "columns", "cleaning", "features", "kmeans", "validation", "analysis", "seed",
                    "threads", "output_dir"},
                   "config");

    if (json.contains("inputs")) {
        const auto& in = json["inputs"];
        reject_unknown(in, {"trips", "weather", "holidays"}, "inputs");
        if (in.contains("trips") && in["trips"].is_string()) {
            c.trips = {in["trips"].get<std::string>()};
        } else {
            read(in, "trips", c.trips);
        }
        read(in, "weather", c.weather);
        read(in, "holidays", c.holidays);
    }
    if (json.contains("columns")) {
        const auto& cols = json["columns"];
        reject_unknown(cols, {"trip_start_time", "trip_duration", "weather"}, "columns");
        read(cols, "trip_start_time", c.trip_columns.start_time);
        read(cols, "trip_duration", c.trip_columns.duration);
        read(cols, "weather", c.weather_mapping.headers);
    }
    if (json.contains("cleaning")) {
        const auto& cl = json["cleaning"];
        reject_unknown(cl, {"min_trip_seconds", "missing_threshold", "exclude"}, "cleaning");
        read(cl, "min_trip_seconds", c.min_trip_seconds);
        read(cl, "missing_threshold", c.missing_threshold);
        read(cl, "exclude", c.exclude);
    }
    if (json.contains("features")) {
        const auto& f = json["features"];
        reject_unknown(f, {"redundancy_threshold", "include_count", "keep_raw"}, "features");
        read(f, "redundancy_threshold", c.redundancy_threshold);
        read(f, "include_count", c.include_count);
        read(f, "keep_raw", c.keep_raw);
    }
    if (json.contains("kmeans")) {
        const auto& km = json["kmeans"];
        reject_unknown(km, {"k", "max_iterations", "n_configurations", "tolerance", "init"}, "kmeans");
        if (km.contains("k") && !km["k"].is_null()) {
            std::size_t k = 0;
            read(km, "k", k);
            c.k = k;
        }
        read(km, "max_iterations", c.max_iterations);
        read(km, "n_configurations", c.n_configurations);
        read(km, "tolerance", c.tolerance);
        std::string init = init_name(c.init);
        read(km, "init", init);
        if (init == "random") {
            c.init = InitMethod::random_rows;
        } else if (init == "kmeans++") {
            c.init = InitMethod::kmeans_plus_plus;
        } else {
            throw Error("config: kmeans.init must be 'random' or 'kmeans++'");
        }
    }
    if (json.contains("validation")) {
        const auto& v = json["validation"];
        reject_unknown(v, {"k_range", "bootstrap", "gap_rule", "select"}, "validation");
        if (v.contains("k_range")) {
            if (v["k_range"].is_string()) {
                c.k_range = parse_k_range(v["k_range"].get<std::string>());
            } else {
                std::vector<std::size_t> r;
                read(v, "k_range", r);
                if (r.size() != 2) throw Error("config: validation.k_range must be [first, last]");
                c.k_range = {r[0], r[1]};
            }
        }
        read(v, "bootstrap", c.bootstrap_count);
        std::string rule = gap_rule_name(c.gap_rule);
        read(v, "gap_rule", rule);
        if (rule == "one_se") {
            c.gap_rule = GapRule::one_standard_error;
        } else if (rule == "argmax") {
            c.gap_rule = GapRule::argmax;
        } else {
            throw Error("config: validation.gap_rule must be 'one_se' or 'argmax'");
        }
        read(v, "select", c.k_method);
        if (c.k_method != "gap" && c.k_method != "silhouette" && c.k_method != "elbow") {
            throw Error("config: validation.select must be 'gap', 'silhouette' or 'elbow'");
        }
    }
    if (json.contains("analysis")) {
        const auto& a = json["analysis"];
        reject_unknown(a, {"top_anomalies", "seasons", "weekend_days"}, "analysis");
        read(a, "top_anomalies", c.top_anomalies);
        read(a, "weekend_days", c.weekend_days);
        if (a.contains("seasons")) {
            std::map<std::string, std::vector<unsigned>> seasons;
            read(a, "seasons", seasons);
            std::array<bool, 12> seen{};
            for (const auto& [name, months] : seasons) {
                for (unsigned m : months) {
                    if (m < 1 || m > 12 || seen[m - 1]) {
                        throw Error("config: analysis.seasons must map every month 1..12 exactly once");
                    }
                    seen[m - 1] = true;
                    c.seasons.by_month[m - 1] = name;
                }
            }
            if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
                throw Error("config: analysis.seasons must map every month 1..12 exactly once");
            }
        }
        for (unsigned d : c.weekend_days) {
            if (d > 6) throw Error("config: weekend_days use 0 = Sunday ... 6 = Saturday");
        }
    }
    read(json, "seed", c.seed);
    read(json, "threads", c.threads);
    if (json.contains("output_dir")) {
        c.output_dir = c.resolve(json["output_dir"].get<std::string>());
    }
    if (c.k_range.first < 1 || c.k_range.last < c.k_range.first) throw Error("config: k_range is empty");
    if (c.trips.empty()) throw Error("config: inputs.trips is required");
    if (c.weather.empty()) throw Error("config: inputs.weather is required");
    return c;
}

PipelineConfig load_config(const fs::path& path) {
    auto in = open_input(path, "config file");
    Json json;
    try {
        json = Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error("config file '" + path.string() + "' is not valid JSON: " + e.what());
    }
    return config_from_json(json, path.parent_path());
}

Json config_to_json(const PipelineConfig& c) {
    Json seasons = Json::object();
    for (const auto& name : c.seasons.names()) {
        Json months = Json::array();
        for (unsigned m = 1; m <= 12; ++m) {
            if (c.seasons.by_month[m - 1] == name) months.push_back(m);
        }
        seasons[name] = months;
    }
    Json weather_headers = Json::object();
    for (const auto& [k, v] : c.weather_mapping.headers) weather_headers[k] = v;
    return Json{
        {"inputs", {{"trips", c.trips}, {"weather", c.weather}, {"holidays", c.holidays}}},
        {"columns",
         {{"trip_start_time", c.trip_columns.start_time},
          {"trip_duration", c.trip_columns.duration},
          {"weather", weather_headers}}},
        {"cleaning",
         {{"min_trip_seconds", c.min_trip_seconds},
          {"missing_threshold", c.missing_threshold},
          {"exclude", c.exclude}}},
        {"features",
         {{"redundancy_threshold", c.redundancy_threshold},
          {"include_count", c.include_count},
          {"keep_raw", c.keep_raw}}},
        {"kmeans",
         {{"k", c.k ? Json(*c.k) : Json(nullptr)},
          {"max_iterations", c.max_iterations},
          {"n_configurations", c.n_configurations},
          {"tolerance", c.tolerance},
          {"init", init_name(c.init)}}},
        {"validation",
         {{"k_range", {c.k_range.first, c.k_range.last}},
          {"bootstrap", c.bootstrap_count},
          {"gap_rule", gap_rule_name(c.gap_rule)},
          {"select", c.k_method}}},
        {"analysis", {{"top_anomalies", c.top_anomalies}, {"seasons", seasons}, {"weekend_days", c.weekend_days}}},
        {"seed", c.seed},
    };
}

std::string config_digest(const PipelineConfig& config) {
    const std::string text = config_to_json(config).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

PreparedFeatures prepare_features(const DailyTable& table, const PipelineConfig& config) {
    PreparedFeatures p;
    p.correlation = pearson_correlation(to_feature_matrix(table));
    SelectionOptions opts;
    opts.redundancy_threshold = config.redundancy_threshold;
    opts.include_target = config.include_count;
    p.selection = select_features(table, p.correlation, opts);
    p.clustered = standardize(p.selection.matrix, config.keep_raw);
    return p;
}

KMeansConfig kmeans_config(const PipelineConfig& config, std::size_t k) {
    KMeansConfig km;
    km.k = k;
    km.max_iterations = config.max_iterations;
    km.n_configurations = config.n_configurations;
    km.seed = config.seed;
    km.tolerance = config.tolerance;
    km.init = config.init;
    return km;
}

Json cleaning_report_json(const SparseDropResult& sparse, const ExcludeResult& excluded, const JoinReport& join,
                          const std::vector<std::string>& ignored_columns) {
    Json dropped = Json::array();
    for (const auto& d : sparse.dropped) dropped.push_back({{"name", d.name}, {"missing_fraction", d.missing_fraction}});
    return Json{
        {"dropped_columns", dropped},
        {"excluded_columns", excluded.excluded},
        {"rows_dropped_in_join", join.rows_dropped},
        {"join_breakdown",
         {{"weather_days", join.weather_days},
          {"count_days", join.count_days},
          {"joined_days", join.joined_days},
          {"weather_days_without_counts", join.weather_days_without_counts},
          {"count_days_without_weather", join.count_days_without_weather},
          {"days_with_missing_weather_values", join.days_with_missing_weather_values}}},
        {"ignored_input_columns", ignored_columns},
        {"warnings", excluded.warnings},
    };
}

Json validation_report_json(const ValidationReport& r) {
    Json sil = Json::array();
    for (const auto& s : r.silhouette_curve) sil.push_back(s ? Json(*s) : Json(nullptr));
    auto opt = [](const std::optional<std::size_t>& k) { return k ? Json(*k) : Json(nullptr); };
    return Json{
        {"k_range", {r.k_range.first, r.k_range.last}},
        {"bootstrap_count", r.bootstrap_count},
        {"gap_rule", gap_rule_name(r.gap_rule)},
        {"wss_curve", r.wss_curve},
        {"silhouette_curve", sil},
        {"gap_curve", r.gap_curve},
        {"gap_se", r.gap_se},
        {"recommended",
         {{"elbow", opt(r.recommended.elbow)},
          {"silhouette", opt(r.recommended.silhouette)},
          {"gap", opt(r.recommended.gap)}}},
        {"warnings", r.warnings},
    };
}

void write_validation_csv(std::ostream& out, const ValidationReport& r) {
    out << "k,wss,silhouette,gap,gap_se\n";
    for (std::size_t i = 0; i < r.k_range.size(); ++i) {
        out << r.k_range.first + i << ',' << csv::format_double(r.wss_curve[i]) << ',';
        if (r.silhouette_curve[i]) out << csv::format_double(*r.silhouette_curve[i]);
        out << ',' << csv::format_double(r.gap_curve[i]) << ',' << csv::format_double(r.gap_se[i]) << '\n';
    }
}

Json standardization_json(const FeatureMatrix& m) {
    Json out = Json::object();
    for (std::size_t c = 0; c < m.cols(); ++c) {
        out[m.feature_names[c]] = {{"mean", m.column_means[c]}, {"std", m.column_stds[c]}};
    }
    return out;
}

namespace {

Json matrix_json(const Matrix& m) {
    Json rows = Json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
        rows.push_back(std::vector<double>(m.row(r).begin(), m.row(r).end()));
    }
    return rows;
}

}  // namespace

Json clustering_result_json(const ClusteringResult& res, const FeatureMatrix& clustered) {
    Json assignments = Json::array();
    for (std::size_t i = 0; i < res.assignments.size(); ++i) {
        assignments.push_back({{"date", clustered.dates.at(i).to_string()}, {"cluster", res.assignments[i]}});
    }
    const Matrix original = destandardize_centroids(res.centroids, clustered.column_means, clustered.column_stds);
    return Json{
        {"k", res.k()},
        {"seed", res.seed_used},
        {"pass_seed", res.pass_seed},
        {"total_wss", res.total_wss},
        {"per_cluster_wss", res.per_cluster_wss},
        {"sizes", res.sizes},
        {"iterations_used", res.iterations_used},
        {"converged", res.converged},
        {"restarts_discarded_for_empty_clusters", res.restarts_discarded_for_empty_clusters},
        {"feature_names", clustered.feature_names},
        {"centroids", {{"original", matrix_json(original)}, {"standardized", matrix_json(res.centroids)}}},
        {"assignments", assignments},
    };
}

ClusteringResult clustering_result_from_json(const Json& j, std::vector<Date>* dates) {
    try {
        ClusteringResult res;
        const auto k = j.at("k").get<std::size_t>();
        res.seed_used = j.at("seed").get<std::uint64_t>();
        res.pass_seed = j.at("pass_seed").get<std::uint64_t>();
        res.total_wss = j.at("total_wss").get<double>();
        res.per_cluster_wss = j.at("per_cluster_wss").get<std::vector<double>>();
        res.sizes = j.at("sizes").get<std::vector<std::size_t>>();
        res.iterations_used = j.at("iterations_used").get<int>();
        res.converged = j.at("converged").get<bool>();
        res.restarts_discarded_for_empty_clusters = j.at("restarts_discarded_for_empty_clusters").get<std::size_t>();
        const auto rows = j.at("centroids").at("standardized").get<std::vector<std::vector<double>>>();
        if (rows.size() != k) throw Error("centroid count does not match k");
        const std::size_t d = rows.empty() ? 0 : rows.front().size();
        res.centroids = Matrix(k, d);
        for (std::size_t r = 0; r < k; ++r) {
            if (rows[r].size() != d) throw Error("ragged centroid matrix");
            for (std::size_t c = 0; c < d; ++c) res.centroids(r, c) = rows[r][c];
        }
        for (const auto& a : j.at("assignments")) {
            const auto c = a.at("cluster").get<std::size_t>();
            if (c >= k) throw Error("assignment to cluster " + std::to_string(c) + " out of range");
            res.assignments.push_back(c);
            if (dates) dates->push_back(Date::parse(a.at("date").get<std::string>()));
        }
        return res;
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("malformed clustering result: ") + e.what());
    }
}

void write_json_file(const fs::path& path, const Json& json) { write_text_file(path, json.dump(2) + "\n"); }

Json read_json_file(const fs::path& path) {
    auto in = open_input(path, "artifact");
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error("'" + path.string() + "' is not valid JSON: " + e.what());
    }
}

void run_ingest(const PipelineConfig& config) {
    stage("ingest", [&] {
        if (config.trips.empty()) throw Error("no trip CSV configured (inputs.trips)");
        if (config.weather.empty()) throw Error("no weather CSV configured (inputs.weather)");
        DailyCounts counts;
        for (const auto& t : config.trips) {
            auto in = open_input(config.resolve(t), "trip CSV");
            merge_counts(counts, parse_trips(in, config.trip_columns, config.min_trip_seconds));
        }
        auto win = open_input(config.resolve(config.weather), "weather CSV");
        const WeatherTable weather = parse_weather(win, config.weather_mapping);
        const auto sparse = drop_sparse_columns(weather, config.missing_threshold);
        const auto excluded = exclude_columns(sparse.table, config.exclude);
        const auto joined = join_daily(counts, excluded.table);

        fs::create_directories(config.output_dir);
        write_json_file(config.output_dir / artifact::cleaning_report,
                        merge(provenance(config),
                              cleaning_report_json(sparse, excluded, joined.report, weather.ignored_columns)));
        write_with(config.output_dir / artifact::daily_records,
                   [&](std::ostream& os) { write_daily_csv(os, joined.table); });
    });
}

namespace {

PreparedFeatures write_preprocess_artifacts(const DailyTable& table, const PipelineConfig& config) {
    PreparedFeatures p = prepare_features(table, config);
    write_with(config.output_dir / artifact::correlation,
               [&](std::ostream& os) { write_correlation_csv(os, p.correlation); });
    write_json_file(config.output_dir / artifact::standardization,
                    merge(provenance(config), Json{{"features", standardization_json(p.clustered)}}));
    Json groups = Json::array();
    for (const auto& g : p.selection.groups) groups.push_back({{"members", g.members}, {"kept", g.kept}});
    write_json_file(config.output_dir / artifact::feature_selection,
                    merge(provenance(config), Json{{"redundancy_threshold", config.redundancy_threshold},
                                                   {"groups", groups},
                                                   {"dropped", p.selection.dropped},
                                                   {"retained", p.clustered.feature_names}}));
    return p;
}

}  // namespace

void run_validate(const PipelineConfig& config) {
    stage("validate", [&] {
        const DailyTable table = load_daily(config);
        const PreparedFeatures p = write_preprocess_artifacts(table, config);
        ValidationOptions opts;
        opts.range = config.k_range;
        opts.bootstrap_count = config.bootstrap_count;
        opts.kmeans = kmeans_config(config, 1);
        opts.seed = config.seed;
        opts.gap_rule = config.gap_rule;
        opts.threads = config.threads;
        const auto report = validate_k(p.clustered.values, opts);
        write_json_file(config.output_dir / artifact::validation_report,
                        merge(provenance(config), validation_report_json(report)));
        write_with(config.output_dir / artifact::validation_curves,
                   [&](std::ostream& os) { write_validation_csv(os, report); });
    });
}

void run_cluster(const PipelineConfig& config) {
    stage("cluster", [&] {
        const DailyTable table = load_daily(config);
        std::size_t k = 0;
        if (config.k) {
            k = *config.k;
        } else {
            const fs::path vpath = config.output_dir / artifact::validation_report;
            if (!fs::exists(vpath)) {
                throw Error("no k given: pass --k, set kmeans.k, or run `bikeclust validate` first");
            }
            const auto rec = read_json_file(vpath).at("recommended").at(config.k_method);
            if (rec.is_null()) throw Error("validation report has no '" + config.k_method + "' recommendation");
            k = rec.get<std::size_t>();
        }
        const PreparedFeatures p = write_preprocess_artifacts(table, config);
        const auto result = hartigan_wong(p.clustered, kmeans_config(config, k));
        write_json_file(config.output_dir / artifact::clustering_result,
                        merge(provenance(config), clustering_result_json(result, p.clustered)));
    });
}

void run_report(const PipelineConfig& config) {
    stage("report", [&] {
        const fs::path cpath = config.output_dir / artifact::clustering_result;
        if (!fs::exists(cpath)) {
            throw Error("missing '" + cpath.string() + "'; run `bikeclust cluster` first");
        }
        const DailyTable table = load_daily(config);
        std::vector<Date> dates;
        const Json cjson = read_json_file(cpath);
        const ClusteringResult result = clustering_result_from_json(cjson, &dates);
        const PreparedFeatures p = prepare_features(table, config);
        if (dates != p.clustered.dates ||
            cjson.at("feature_names").get<std::vector<std::string>>() != p.clustered.feature_names) {
            throw Error("clustering result does not match the daily table or feature settings; rerun `bikeclust cluster`");
        }

        CalendarConfig calendar;
        if (!config.holidays.empty()) {
            auto in = open_input(config.resolve(config.holidays), "holiday file");
            calendar = read_holidays(in);
        }
        calendar.weekend_days = config.weekend_days;

        std::vector<std::string> summary_features{std::string(feature::count)};
        for (const auto& f : p.clustered.feature_names) {
            if (f != feature::count) summary_features.push_back(f);
        }
        const std::size_t k = result.k();
        const auto summaries = cluster_summary(table, result.assignments, k, summary_features);
        const auto seasons = seasonal_averages(table.records, config.seasons);
        const auto workday = workday_split(table.records, result.assignments, k, calendar);
        const auto anomalies = flag_anomalies(p.clustered, result, config.top_anomalies);

        Json clusters = Json::array();
        for (const auto& s : summaries) {
            Json feats = Json::object();
            for (const auto& f : s.features) {
                feats[f.feature] = {{"min", f.min}, {"max", f.max}, {"mean", f.mean}, {"median", f.median}};
            }
            clusters.push_back({{"cluster", s.cluster_index}, {"size", s.size}, {"features", feats}});
        }
        Json season_rows = Json::array();
        for (const auto& s : seasons.seasons) {
            season_rows.push_back({{"season", s.season},
                                   {"observations", s.observations},
                                   {"total_trips", s.total_trips},
                                   {"average_per_day", s.average_per_day},
                                   {"average_per_day_rounded", s.average_rounded}});
        }
        auto stats_json = [](const CountStats& s) {
            return Json{{"size", s.size},
                        {"mean_count", s.mean ? Json(*s.mean) : Json(nullptr)},
                        {"median_count", s.median ? Json(*s.median) : Json(nullptr)}};
        };
        Json workday_rows = Json::array();
        for (const auto& w : workday.clusters) {
            workday_rows.push_back(
                {{"cluster", w.cluster_index}, {"working", stats_json(w.working)}, {"nonworking", stats_json(w.nonworking)}});
        }
        Json anomaly_rows = Json::array();
        for (const auto& a : anomalies.flags) {
            anomaly_rows.push_back({{"rank", a.rank},
                                    {"date", a.date.to_string()},
                                    {"cluster", a.cluster_index},
                                    {"distance_to_centroid", a.distance_to_centroid},
                                    {"note", a.note}});
        }
        std::vector<std::string> warnings = seasons.warnings;
        warnings.insert(warnings.end(), workday.warnings.begin(), workday.warnings.end());
        warnings.insert(warnings.end(), anomalies.warnings.begin(), anomalies.warnings.end());

        write_json_file(config.output_dir / artifact::analysis_report,
                        merge(provenance(config), Json{{"k", k},
                                                       {"clusters", clusters},
                                                       {"seasons", season_rows},
                                                       {"workday", workday_rows},
                                                       {"anomalies", anomaly_rows},
                                                       {"warnings", warnings}}));
        write_with(config.output_dir / artifact::plot_scatter,
                   [&](std::ostream& os) { write_scatter_csv(os, table, result.assignments); });
        write_with(config.output_dir / artifact::plot_workday,
                   [&](std::ostream& os) { write_workday_csv(os, table, result.assignments, calendar); });
        write_with(config.output_dir / artifact::plot_season,
                   [&](std::ostream& os) { write_season_csv(os, table, result.assignments, config.seasons); });
    });
}

void run_pipeline(const PipelineConfig& config) {
    run_ingest(config);
    run_validate(config);
    run_cluster(config);
    run_report(config);
}

}  // namespace bikeclust
