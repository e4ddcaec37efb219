#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "bikeclust/pipeline.hpp"

namespace {

struct Overrides {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> k;
    std::string k_range;
    std::string out;
    std::optional<unsigned> threads;
};

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config, "pipeline config file (JSON)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--seed", o.seed, "master seed");
    cmd->add_option("--k", o.k, "number of clusters")->check(CLI::PositiveNumber);
    cmd->add_option("--k-range", o.k_range, "cluster counts to validate, e.g. 1..10");
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--threads", o.threads, "worker threads (0 = all cores); results do not depend on it");
}

bikeclust::PipelineConfig effective_config(const Overrides& o) {
    auto config = bikeclust::load_config(o.config);
    if (o.seed) config.seed = *o.seed;
    if (o.k) config.k = *o.k;
    if (!o.k_range.empty()) config.k_range = bikeclust::parse_k_range(o.k_range);
    if (!o.out.empty()) config.output_dir = o.out;
    if (o.threads) config.threads = *o.threads;
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cluster daily bike-share demand against weather with Hartigan-Wong k-means"};
    app.require_subcommand(1);
    Overrides o;

    struct Command {
        const char* name;
        const char* help;
        void (*run)(const bikeclust::PipelineConfig&);
    };
    const Command commands[] = {
        {"ingest", "parse trips and weather, clean and join into daily_records.csv", bikeclust::run_ingest},
        {"validate", "estimate k with elbow, silhouette and gap statistic", bikeclust::run_validate},
        {"cluster", "run Hartigan-Wong k-means for one k", bikeclust::run_cluster},
        {"report", "cluster summaries, seasons, working days, anomalies", bikeclust::run_report},
        {"run", "all stages in order", bikeclust::run_pipeline},
    };
    const Command* chosen = nullptr;
    for (const auto& c : commands) {
        auto* sub = app.add_subcommand(c.name, c.help);
        add_common(sub, o);
        sub->callback([&chosen, &c] { chosen = &c; });
    }

    CLI11_PARSE(app, argc, argv);

    try {
        const auto config = effective_config(o);
        chosen->run(config);
        std::cerr << chosen->name << ": wrote artifacts to " << config.output_dir.string() << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
