#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "bikeclust/analysis.hpp"
#include "bikeclust/kmeans.hpp"
#include "bikeclust/pipeline.hpp"
#include "bikeclust/preprocess.hpp"
#include "bikeclust/validation.hpp"

namespace py = pybind11;
using namespace bikeclust;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Matrix to_matrix(const Array& a) {
    if (a.ndim() != 2) throw Error("expected a 2-D array, got " + std::to_string(a.ndim()) + " dimensions");
    Matrix m(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)));
    const auto v = a.unchecked<2>();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = v(static_cast<py::ssize_t>(i), static_cast<py::ssize_t>(j));
    }
    return m;
}

Array to_array(const Matrix& m) {
    Array a({m.rows(), m.cols()});
    std::copy(m.data().begin(), m.data().end(), a.mutable_data());
    return a;
}

template <typename T>
py::array_t<T> to_array(const std::vector<T>& v) {
    return py::array_t<T>(static_cast<py::ssize_t>(v.size()), v.data());
}

std::vector<std::size_t> to_labels(const py::array_t<long long, py::array::c_style | py::array::forcecast>& a) {
    std::vector<std::size_t> out;
    out.reserve(static_cast<std::size_t>(a.size()));
    for (py::ssize_t i = 0; i < a.size(); ++i) {
        if (a.data()[i] < 0) throw Error("cluster labels must be non-negative");
        out.push_back(static_cast<std::size_t>(a.data()[i]));
    }
    return out;
}

InitMethod parse_init(const std::string& name) {
    if (name == "random") return InitMethod::random_rows;
    if (name == "kmeans++") return InitMethod::kmeans_plus_plus;
    throw Error("unknown init method '" + name + "' (expected 'random' or 'kmeans++')");
}

KMeansConfig make_config(std::size_t k, std::uint64_t seed, int max_iterations, int n_configurations,
                         double tolerance, const std::string& init) {
    KMeansConfig c;
    c.k = k;
    c.seed = seed;
    c.max_iterations = max_iterations;
    c.n_configurations = n_configurations;
    c.tolerance = tolerance;
    c.init = parse_init(init);
    return c;
}

py::dict result_dict(const ClusteringResult& r) {
    py::dict d;
    d["assignments"] = to_array(std::vector<long long>(r.assignments.begin(), r.assignments.end()));
    d["centroids"] = to_array(r.centroids);
    d["sizes"] = std::vector<std::size_t>(r.sizes);
    d["per_cluster_wss"] = r.per_cluster_wss;
    d["total_wss"] = r.total_wss;
    d["iterations_used"] = r.iterations_used;
    d["converged"] = r.converged;
    d["seed"] = r.seed_used;
    d["pass_seed"] = r.pass_seed;
    d["restarts_discarded_for_empty_clusters"] = r.restarts_discarded_for_empty_clusters;
    return d;
}

PipelineConfig pipeline_config(const std::string& path, const std::optional<std::string>& output_dir,
                               std::optional<std::uint64_t> seed) {
    PipelineConfig c = load_config(path);
    if (output_dir) c.output_dir = *output_dir;
    if (seed) c.seed = *seed;
    return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Daily bike-share demand clustering: Hartigan-Wong k-means, cluster-count validation, pipeline stages.";

    py::register_exception<Error>(m, "BikeclustError", PyExc_ValueError);

    m.def(
        "hartigan_wong",
        [](const Array& data, std::size_t k, std::uint64_t seed, int max_iterations, int n_configurations,
           double tolerance, const std::string& init) {
            return result_dict(
                hartigan_wong(to_matrix(data), make_config(k, seed, max_iterations, n_configurations, tolerance, init)));
        },
        py::arg("data"), py::arg("k"), py::arg("seed") = 0, py::arg("max_iterations") = 10,
        py::arg("n_configurations") = 25, py::arg("tolerance") = 0.0, py::arg("init") = "random",
        "Best-of-restarts Hartigan-Wong k-means on the rows of `data`.");

    m.def(
        "silhouette",
        [](const Array& data, const py::array_t<long long, py::array::c_style | py::array::forcecast>& labels) {
            const auto s = silhouette_width(to_matrix(data), to_labels(labels));
            return py::make_tuple(to_array(s.per_point), s.average);
        },
        py::arg("data"), py::arg("labels"), "Per-point silhouette widths and their average.");

    m.def(
        "elbow_curve",
        [](const Array& data, std::size_t k_first, std::size_t k_last, std::uint64_t seed) {
            KMeansConfig c;
            c.seed = seed;
            return elbow_curve(to_matrix(data), {k_first, k_last}, c);
        },
        py::arg("data"), py::arg("k_first"), py::arg("k_last"), py::arg("seed") = 0);

    m.def(
        "detect_elbow",
        [](const std::vector<double>& wss, std::size_t first_k) {
            const auto pick = detect_elbow(wss, first_k);
            return py::make_tuple(pick.k, pick.warning);
        },
        py::arg("wss"), py::arg("first_k") = 1, "Elbow k and an optional warning.");

    m.def(
        "gap_statistic",
        [](const Array& data, std::size_t k_first, std::size_t k_last, std::size_t bootstrap, std::uint64_t seed,
           unsigned threads) {
            KMeansConfig c;
            c.seed = seed;
            const auto g = gap_statistic(to_matrix(data), {k_first, k_last}, bootstrap, c, seed, {}, threads);
            py::dict d;
            d["log_wss"] = to_array(g.log_wss);
            d["expected_log_wss"] = to_array(g.expected_log_wss);
            d["gap"] = to_array(g.gap);
            d["gap_se"] = to_array(g.gap_se);
            return d;
        },
        py::arg("data"), py::arg("k_first"), py::arg("k_last"), py::arg("bootstrap") = 50, py::arg("seed") = 0,
        py::arg("threads") = 0);

    m.def(
        "validate_k",
        [](const Array& data, std::size_t k_first, std::size_t k_last, std::size_t bootstrap, std::uint64_t seed,
           const std::string& gap_rule, unsigned threads) {
            ValidationOptions o;
            o.range = {k_first, k_last};
            o.bootstrap_count = bootstrap;
            o.seed = seed;
            o.kmeans.seed = seed;
            o.threads = threads;
            if (gap_rule == "one_se") {
                o.gap_rule = GapRule::one_standard_error;
            } else if (gap_rule == "argmax") {
                o.gap_rule = GapRule::argmax;
            } else {
                throw Error("unknown gap rule '" + gap_rule + "' (expected 'one_se' or 'argmax')");
            }
            const auto r = validate_k(to_matrix(data), o);
            return py::module_::import("json").attr("loads")(validation_report_json(r).dump());
        },
        py::arg("data"), py::arg("k_first") = 1, py::arg("k_last") = 10, py::arg("bootstrap") = 50,
        py::arg("seed") = 0, py::arg("gap_rule") = "one_se", py::arg("threads") = 0,
        "All validation curves and each method's recommended k, as a dict.");

    m.def(
        "pearson_correlation",
        [](const Array& data) {
            FeatureMatrix fm;
            fm.values = to_matrix(data);
            for (std::size_t j = 0; j < fm.cols(); ++j) fm.feature_names.push_back("column " + std::to_string(j));
            return to_array(pearson_correlation(fm).values);
        },
        py::arg("data"));

    m.def(
        "standardize",
        [](const Array& data) {
            FeatureMatrix fm;
            fm.values = to_matrix(data);
            for (std::size_t j = 0; j < fm.cols(); ++j) fm.feature_names.push_back("column " + std::to_string(j));
            fm.column_means.assign(fm.cols(), 0.0);
            fm.column_stds.assign(fm.cols(), 1.0);
            const auto s = standardize(fm);
            return py::make_tuple(to_array(s.values), to_array(s.column_means), to_array(s.column_stds));
        },
        py::arg("data"), "Column z-scores with the sample standard deviation: (values, means, stds).");

    m.def(
        "seasonal_averages",
        [](const std::vector<std::string>& dates, const std::vector<std::int64_t>& counts) {
            if (dates.size() != counts.size()) throw Error("dates and counts differ in length");
            std::vector<DailyRecord> records;
            for (std::size_t i = 0; i < dates.size(); ++i) records.push_back({Date::parse(dates[i]), counts[i], {}});
            py::list out;
            for (const auto& s : seasonal_averages(records).seasons) {
                py::dict d;
                d["season"] = s.season;
                d["observations"] = s.observations;
                d["total_trips"] = s.total_trips;
                d["average_per_day"] = s.average_per_day;
                d["average_rounded"] = s.average_rounded;
                out.append(d);
            }
            return out;
        },
        py::arg("dates"), py::arg("counts"), "Trips per day for each meteorological season.");

    m.def(
        "config_digest", [](const std::string& path) { return config_digest(load_config(path)); },
        py::arg("config"));

    const auto stage = [&m](const char* name, void (*fn)(const PipelineConfig&), const char* doc) {
        m.def(
            name,
            [fn](const std::string& config, const std::optional<std::string>& output_dir,
                 std::optional<std::uint64_t> seed) {
                const PipelineConfig c = pipeline_config(config, output_dir, seed);
                py::gil_scoped_release release;
                fn(c);
            },
            py::arg("config"), py::arg("output_dir") = py::none(), py::arg("seed") = py::none(), doc);
    };
    stage("run_ingest", &run_ingest, "Parse, clean and join the inputs; write the cleaning report and daily table.");
    stage("run_validate", &run_validate, "Select and standardize features; write the validation report.");
    stage("run_cluster", &run_cluster, "Cluster the daily table; write the clustering result.");
    stage("run_report", &run_report, "Write the analysis report and plot data.");
    stage("run_pipeline", &run_pipeline, "Run every stage in order.");
}
