// fmnroute: run routing-metric experiments over flying-mesh mobility traces.
//
//   fmnroute run <config> [--metric M] [--alpha A] [--seed S] [--output-dir D]
//   fmnroute generate-trace <config> [--seed S] [--out FILE]
//   fmnroute dump-topology <config> --at T [--seed S]

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include <fmn/fmn.hpp>

namespace {

std::string read_file(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    if (!f) throw fmn::ValidationError("cannot open " + p.string());
    return std::string((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
}

fmn::ExperimentConfig load_config(const std::string& path) {
    return fmn::parse_config(read_file(path));
}

fmn::MobilityTrace scenario_trace(const fmn::ExperimentConfig& cfg, std::uint64_t seed) {
    if (!cfg.trace_file.empty()) return fmn::parse_trace(read_file(cfg.trace_file));
    fmn::RwmParams p = cfg.rwm;
    p.seed = seed;
    return fmn::generate_rwm(p);
}

int cmd_run(const std::string& config_path, const std::optional<std::string>& metric,
            const std::optional<double>& alpha, const std::optional<std::uint64_t>& seed,
            const std::optional<std::string>& output_dir) {
    fmn::ExperimentConfig cfg = load_config(config_path);
    if (metric) cfg.metrics = {fmn::metric_from_string(*metric)};
    if (alpha) cfg.alphas = {*alpha};
    if (seed) cfg.seeds = {*seed};
    if (output_dir) cfg.output_dir = *output_dir;

    const fmn::ExperimentResult result = fmn::run_experiment(cfg);
    std::cout << "wrote " << result.output_dir.string() << "\n";
    std::cout << "metric alpha scenario mean_throughput_bps mean_delay_s\n";
    for (const fmn::RunRecord& r : result.runs)
        std::cout << fmn::to_string(r.metric) << " " << fmn::fmt_g9(r.alpha) << " " << r.scenario
                  << " " << fmn::fmt_g9(r.summary.mean_throughput_bps) << " "
                  << fmn::fmt_g9(r.summary.mean_delay_s) << "\n";
    return 0;
}

int cmd_generate_trace(const std::string& config_path, const std::optional<std::uint64_t>& seed,
                       const std::optional<std::string>& out) {
    fmn::ExperimentConfig cfg = load_config(config_path);
    fmn::RwmParams p = cfg.rwm;
    p.seed = seed ? *seed : cfg.seeds.front();
    const std::string text = fmn::serialize_trace(fmn::generate_rwm(p));
    if (!out) {
        std::cout << text;
        return 0;
    }
    std::ofstream f(*out, std::ios::binary);
    if (!f) throw fmn::ValidationError("cannot open " + *out + " for writing");
    f << text;
    if (!f) throw fmn::ValidationError("failed writing " + *out);
    return 0;
}

int cmd_dump_topology(const std::string& config_path, double at,
                      const std::optional<std::uint64_t>& seed) {
    fmn::ExperimentConfig cfg = load_config(config_path);
    const fmn::MobilityTrace trace = scenario_trace(cfg, seed ? *seed : cfg.seeds.front());
    const std::vector<int> sources = fmn::resolve_sources(cfg, trace.node_count());
    const fmn::TopologySnapshot snap = fmn::build_snapshot(
        fmn::sample_positions(trace, at, cfg.sample_edge), at, cfg.radio, cfg.rates, cfg.gateway,
        std::set<int>(sources.begin(), sources.end()));
    std::cout << fmn::dump_snapshot(snap);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"routing-metric experiments for flying multi-hop networks"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::string> metric, output_dir, trace_out;
    std::optional<double> alpha;
    std::optional<std::uint64_t> seed;
    double at = 0.0;

    CLI::App* run = app.add_subcommand("run", "run the configured experiment grid");
    run->add_option("config", config_path, "experiment config file")->required();
    run->add_option("--metric", metric, "run only this metric (i2r|euclidean|hop|etx|airtime)");
    run->add_option("--alpha", alpha, "run only this alpha");
    run->add_option("--seed", seed, "run only this seed");
    run->add_option("--output-dir", output_dir, "write results here instead");

    CLI::App* gen = app.add_subcommand("generate-trace", "emit a random-waypoint mobility trace");
    gen->add_option("config", config_path, "experiment config file")->required();
    gen->add_option("--seed", seed, "generator seed (default: first configured seed)");
    gen->add_option("--out", trace_out, "output file (default: stdout)");

    CLI::App* dump = app.add_subcommand("dump-topology", "print the connectivity snapshot at t");
    dump->add_option("config", config_path, "experiment config file")->required();
    dump->add_option("--at", at, "sample instant in seconds")->required();
    dump->add_option("--seed", seed, "scenario seed (default: first configured seed)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path, metric, alpha, seed, output_dir);
        if (gen->parsed()) return cmd_generate_trace(config_path, seed, trace_out);
        if (dump->parsed()) return cmd_dump_topology(config_path, at, seed);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
