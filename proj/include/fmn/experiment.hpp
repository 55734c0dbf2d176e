#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "config.hpp"
#include "errors.hpp"
#include "evaluation.hpp"
#include "mobility.hpp"
#include "routing.hpp"
#include "textio.hpp"

namespace fmn {

struct RunRecord {
    MetricKind metric = MetricKind::I2R;
    double alpha = 1.0;
    std::string scenario;  // "seed_<k>" or "trace"
    EvalSummary summary;
};

struct ExperimentResult {
    std::filesystem::path output_dir;
    std::vector<RunRecord> runs;
};

namespace detail {

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    if (!f) throw ValidationError("cannot open " + p.string());
    std::string content((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    if (f.bad()) throw ValidationError("failed reading " + p.string());
    return content;
}

// Creates missing directory components, recording each one actually created
// so a failed run can take its mess with it.
inline void make_dirs_tracked(const std::filesystem::path& p,
                              std::vector<std::filesystem::path>& created_dirs) {
    std::filesystem::path cur;
    for (const auto& part : p) {
        cur /= part;
        if (cur.empty() || std::filesystem::exists(cur)) continue;
        std::filesystem::create_directory(cur);
        created_dirs.push_back(cur);
    }
}

inline void write_file_tracked(const std::filesystem::path& p, const std::string& content,
                               std::vector<std::filesystem::path>& created_files) {
    const bool existed = std::filesystem::exists(p);
    std::ofstream f(p, std::ios::binary);
    if (!f) throw ValidationError("cannot open " + p.string() + " for writing");
    if (!existed) created_files.push_back(p);
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    f.flush();
    if (!f) throw ValidationError("failed writing " + p.string());
}

// Effective-config echo.  Valid config syntax, so a manifest reruns the
// experiment it describes; deliberately free of timestamps, hostnames, and
// the output directory so result trees from identical configs compare equal.
inline std::string manifest_text(const ExperimentConfig& cfg, const std::vector<int>& sources,
                                 double offered_load_bps) {
    std::string out;
    if (!cfg.trace_file.empty()) {
        out += "trace_file = " + cfg.trace_file + "\n";
    } else {
        out += "nodes = " + std::to_string(cfg.rwm.node_count) + "\n";
        out += "duration_s = " + fmt_exact(cfg.rwm.duration_s) + "\n";
        out += "box_x_m = " + fmt_exact(cfg.rwm.box.x) + "\n";
        out += "box_y_m = " + fmt_exact(cfg.rwm.box.y) + "\n";
        out += "box_z_m = " + fmt_exact(cfg.rwm.box.z) + "\n";
        out += "speed_min_mps = " + fmt_exact(cfg.rwm.speed_min_mps) + "\n";
        out += "speed_max_mps = " + fmt_exact(cfg.rwm.speed_max_mps) + "\n";
        out += "pause_s = " + fmt_exact(cfg.rwm.pause_s) + "\n";
        out += "seeds = ";
        for (std::size_t k = 0; k < cfg.seeds.size(); ++k)
            out += (k ? "," : "") + std::to_string(cfg.seeds[k]);
        out += "\n";
    }
    out += "tx_power_dbm = " + fmt_exact(cfg.radio.tx_power_dbm) + "\n";
    out += "frequency_hz = " + fmt_exact(cfg.radio.frequency_hz) + "\n";
    out += "bandwidth_hz = " + fmt_exact(cfg.radio.bandwidth_hz) + "\n";
    out += "noise_figure_db = " + fmt_exact(cfg.radio.noise_figure_db) + "\n";
    out += "snr_threshold_db = " + fmt_exact(cfg.radio.snr_threshold_db) + "\n";
    out += "cs_threshold_dbm = " + fmt_exact(cfg.radio.cs_threshold_dbm) + "\n";
    out += "antenna_gain_tx_db = " + fmt_exact(cfg.radio.antenna_gain_tx_db) + "\n";
    out += "antenna_gain_rx_db = " + fmt_exact(cfg.radio.antenna_gain_rx_db) + "\n";
    out += std::string("cs_mode = ") +
           (cfg.radio.cs_mode == CsMode::Power ? "power" : "usable_link") + "\n";
    out += "rate_table = ";
    for (std::size_t k = 0; k < cfg.rates.entries.size(); ++k) {
        const RateEntry& e = cfg.rates.entries[k];
        out += (k ? "," : "") + fmt_exact(e.min_snr_db) + ":" + fmt_exact(e.rate_bps);
    }
    out += "\n";
    out += "gateway = " + std::to_string(cfg.gateway) + "\n";
    out += "sources = ";
    for (std::size_t k = 0; k < sources.size(); ++k)
        out += (k ? "," : "") + std::to_string(sources[k]);
    out += "\n";
    out += std::string("source_order = ") +
           (cfg.source_order == SourceOrder::Ascending ? "ascending" : "given") + "\n";
    out += "offered_load_bps = " + fmt_exact(offered_load_bps) + "\n";
    out += "packet_size_bytes = " + std::to_string(cfg.packet_size_bytes) + "\n";
    out += "delta_t_s = " + fmt_exact(cfg.delta_t_s) + "\n";
    out += "metrics = ";
    for (std::size_t k = 0; k < cfg.metrics.size(); ++k)
        out += std::string(k ? "," : "") + to_string(cfg.metrics[k]);
    out += "\n";
    out += "alphas = ";
    for (std::size_t k = 0; k < cfg.alphas.size(); ++k)
        out += (k ? "," : "") + fmt_exact(cfg.alphas[k]);
    out += "\n";
    out += "airtime_overhead_s = " + fmt_exact(cfg.airtime_overhead_s) + "\n";
    out += "airtime_frame_bits = " + fmt_exact(cfg.airtime_frame_bits) + "\n";
    out += std::string("sample_edge = ") +
           (cfg.sample_edge == SampleEdge::Hold ? "hold" : "strict") + "\n";
    return out;
}

inline std::string per_tk_csv(const EvalSummary& s) {
    std::string out = "t,aggregate_throughput_bps,mean_delay_s,saturated_flows\n";
    for (const EvalRow& r : s.rows)
        out += fmt_g9(r.t) + "," + fmt_g9(r.aggregate_throughput_bps) + "," +
               fmt_g9(r.mean_delay_s) + "," + std::to_string(r.saturated_flows) + "\n";
    return out;
}

inline std::string curve_csv(const std::vector<CurvePoint>& curve) {
    std::string out = "x,F(x)\n";
    for (const CurvePoint& p : curve) out += fmt_g9(p.x) + "," + fmt_g9(p.f) + "\n";
    return out;
}

inline std::string summary_text(const EvalSummary& s) {
    std::string out;
    out += "samples " + std::to_string(s.rows.size()) + "\n";
    out += "mean_throughput_bps " + fmt_g9(s.mean_throughput_bps) + "\n";
    out += "mean_delay_s " + fmt_g9(s.mean_delay_s) + "\n";
    out += "throughput_p25_bps " + fmt_g9(s.throughput_bps.p25) + "\n";
    out += "throughput_p50_bps " + fmt_g9(s.throughput_bps.p50) + "\n";
    out += "throughput_p75_bps " + fmt_g9(s.throughput_bps.p75) + "\n";
    out += "delay_p25_s " + fmt_g9(s.delay_s.p25) + "\n";
    out += "delay_p50_s " + fmt_g9(s.delay_s.p50) + "\n";
    out += "delay_p75_s " + fmt_g9(s.delay_s.p75) + "\n";
    out += "saturated_flow_total " + std::to_string(s.saturated_flow_total) + "\n";
    return out;
}

}  // namespace detail

// Runs the full metric x alpha x scenario grid and writes the result tree:
//   <out>/traces/<scenario>.txt
//   <out>/<metric>_alpha<a>/<scenario>/{per_tk.csv,delay_cdf.csv,
//                                       throughput_ccdf.csv,summary.txt,timeline.txt}
//   <out>/comparison.csv   (means across scenarios, config row order)
//   <out>/manifest.txt     (effective config echo)
// FMNROUTE_OUTPUT_DIR overrides the configured output directory.  A failure
// anywhere aborts the experiment and removes the files it had created.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg_in) {
    namespace fs = std::filesystem;
    ExperimentConfig cfg = cfg_in;
    validate(cfg);
    if (const char* env = std::getenv("FMNROUTE_OUTPUT_DIR"); env != nullptr && *env != '\0')
        cfg.output_dir = env;

    struct Scenario {
        std::string label;
        MobilityTrace trace;
    };
    std::vector<Scenario> scenarios;
    if (!cfg.trace_file.empty()) {
        scenarios.push_back({"trace", parse_trace(detail::read_file(cfg.trace_file))});
    } else {
        for (std::uint64_t seed : cfg.seeds) {
            RwmParams p = cfg.rwm;
            p.seed = seed;
            scenarios.push_back({"seed_" + std::to_string(seed), generate_rwm(p)});
        }
    }

    const int node_count = scenarios.front().trace.node_count();
    for (const Scenario& sc : scenarios)
        if (sc.trace.node_count() != node_count)
            throw ValidationError("scenarios disagree on node count");
    if (cfg.gateway >= node_count)
        throw ValidationError("config: gateway " + std::to_string(cfg.gateway) +
                              " out of range for " + std::to_string(node_count) + " nodes");
    const std::vector<int> sources = resolve_sources(cfg, node_count);
    const double offered = cfg.offered_load_bps > 0.0
                               ? cfg.offered_load_bps
                               : default_offered_load_bps(cfg.rates,
                                                          static_cast<int>(sources.size()));
    std::vector<FlowSpec> specs;
    for (int s : sources) specs.push_back({s, offered, cfg.packet_size_bytes});

    ExperimentResult result;
    result.output_dir = fs::path(cfg.output_dir);
    std::vector<fs::path> created_dirs;
    std::vector<fs::path> created_files;
    try {
        detail::make_dirs_tracked(result.output_dir / "traces", created_dirs);
        for (const Scenario& sc : scenarios)
            detail::write_file_tracked(result.output_dir / "traces" / (sc.label + ".txt"),
                                       serialize_trace(sc.trace), created_files);

        for (MetricKind metric : cfg.metrics) {
            for (double alpha : cfg.alphas) {
                const fs::path metric_dir =
                    result.output_dir / (std::string(to_string(metric)) + "_alpha" +
                                         fmt_exact(alpha));
                for (const Scenario& sc : scenarios) {
                    PlanConfig pc;
                    pc.radio = cfg.radio;
                    pc.rates = cfg.rates;
                    pc.gateway = cfg.gateway;
                    pc.sources = sources;
                    pc.kind = metric;
                    pc.alpha = alpha;
                    pc.airtime_overhead_s = cfg.airtime_overhead_s;
                    pc.airtime_frame_bits = cfg.airtime_frame_bits;
                    pc.edge = cfg.sample_edge;

                    ForwardingTimeline tl;
                    tl.duration_s = sc.trace.duration_s;
                    tl.delta_t_s = cfg.delta_t_s;
                    std::vector<EvalRow> rows;
                    for (double t : sample_times(sc.trace.duration_s, cfg.delta_t_s)) {
                        SnapshotPlan plan = plan_at(sc.trace, t, pc);
                        rows.push_back(estimate(plan.snapshot, plan.flows, specs));
                        if (tl.entries.empty() ||
                            plan.table.next_hop != tl.entries.back().next_hop)
                            tl.entries.push_back(std::move(plan.table));
                    }
                    EvalSummary summary = summarize(std::move(rows));

                    const fs::path run_dir = metric_dir / sc.label;
                    detail::make_dirs_tracked(run_dir, created_dirs);
                    detail::write_file_tracked(run_dir / "per_tk.csv", detail::per_tk_csv(summary),
                                               created_files);
                    detail::write_file_tracked(run_dir / "delay_cdf.csv",
                                               detail::curve_csv(summary.delay_cdf),
                                               created_files);
                    detail::write_file_tracked(run_dir / "throughput_ccdf.csv",
                                               detail::curve_csv(summary.throughput_ccdf),
                                               created_files);
                    detail::write_file_tracked(run_dir / "summary.txt",
                                               detail::summary_text(summary), created_files);
                    detail::write_file_tracked(run_dir / "timeline.txt", dump_timeline(tl),
                                               created_files);
                    result.runs.push_back({metric, alpha, sc.label, std::move(summary)});
                }
            }
        }

        std::string cmp = "metric,alpha,mean_throughput_bps,mean_delay_s\n";
        for (MetricKind metric : cfg.metrics) {
            for (double alpha : cfg.alphas) {
                double tput = 0.0, delay = 0.0;
                int count = 0;
                for (const RunRecord& r : result.runs) {
                    if (r.metric != metric || r.alpha != alpha) continue;
                    tput += r.summary.mean_throughput_bps;
                    delay += r.summary.mean_delay_s;
                    ++count;
                }
                cmp += std::string(to_string(metric)) + "," + fmt_g9(alpha) + "," +
                       fmt_g9(tput / count) + "," + fmt_g9(delay / count) + "\n";
            }
        }
        detail::write_file_tracked(result.output_dir / "comparison.csv", cmp, created_files);
        detail::write_file_tracked(result.output_dir / "manifest.txt",
                                   detail::manifest_text(cfg, sources, offered), created_files);
    } catch (...) {
        std::error_code ec;
        for (auto it = created_files.rbegin(); it != created_files.rend(); ++it)
            fs::remove(*it, ec);
        for (auto it = created_dirs.rbegin(); it != created_dirs.rend(); ++it)
            fs::remove(*it, ec);
        throw;
    }
    return result;
}

}  // namespace fmn
