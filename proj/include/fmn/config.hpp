#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "channel.hpp"
#include "errors.hpp"
#include "metrics.hpp"
#include "mobility.hpp"

namespace fmn {

enum class SourceOrder { Ascending, Given };

// Everything one experiment needs, with defaults tuned to the reference
// scenario: 21 nodes in an 80x80x25 m box for 160 s, 5 sources, i2r vs the
// euclidean baseline at alpha=1, one sample per second.
struct ExperimentConfig {
    std::string trace_file;  // when set, replaces generated mobility
    RwmParams rwm;
    std::vector<std::uint64_t> seeds{1};
    RadioParams radio;
    RateTable rates = default_rate_table();
    int gateway = 0;
    std::vector<int> sources;  // explicit list wins over source_count
    int source_count = 5;
    SourceOrder source_order = SourceOrder::Ascending;
    double offered_load_bps = -1.0;  // negative: use the default-load formula
    int packet_size_bytes = 1400;
    double delta_t_s = 1.0;
    std::vector<MetricKind> metrics{MetricKind::I2R, MetricKind::Euclidean};
    std::vector<double> alphas{1.0};
    double airtime_overhead_s = 60.5e-6;
    double airtime_frame_bits = 8192.0;
    SampleEdge sample_edge = SampleEdge::Hold;
    std::string output_dir = "out";
};

inline const char* to_string(MetricKind k) {
    switch (k) {
        case MetricKind::I2R: return "i2r";
        case MetricKind::Euclidean: return "euclidean";
        case MetricKind::Hop: return "hop";
        case MetricKind::Etx: return "etx";
        case MetricKind::Airtime: return "airtime";
    }
    return "?";
}

inline MetricKind metric_from_string(std::string_view s) {
    if (s == "i2r") return MetricKind::I2R;
    if (s == "euclidean") return MetricKind::Euclidean;
    if (s == "hop") return MetricKind::Hop;
    if (s == "etx") return MetricKind::Etx;
    if (s == "airtime") return MetricKind::Airtime;
    throw ValidationError("unknown metric '" + std::string(s) +
                          "' (expected i2r|euclidean|hop|etx|airtime)");
}

// Per-flow offered load when the config does not pin one: 75% of a fair
// half-duplex share of the top PHY rate.  With the default table and five
// sources this is 0.75*(780/5)/2 = 58.5 Mbit/s.
inline double default_offered_load_bps(const RateTable& rates, int n_sources) {
    if (n_sources < 1) throw ValidationError("offered load: need at least one source");
    return 0.75 * (rates.entries.back().rate_bps / static_cast<double>(n_sources)) / 2.0;
}

namespace detail {

struct ConfigToken {
    std::string_view text;
    int line;
    int col;
};

inline std::string_view trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return s.substr(b, e - b);
}

inline double cfg_double(const ConfigToken& key, std::string_view value) {
    double v = 0.0;
    auto sv = trim(value);
    auto [ptr, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), v);
    if (ec != std::errc() || ptr != sv.data() + sv.size())
        throw ParseError("key '" + std::string(key.text) + "': expected a number, got '" +
                             std::string(sv) + "'",
                         key.line, key.col);
    return v;
}

inline long long cfg_int(const ConfigToken& key, std::string_view value) {
    long long v = 0;
    auto sv = trim(value);
    auto [ptr, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), v);
    if (ec != std::errc() || ptr != sv.data() + sv.size())
        throw ParseError("key '" + std::string(key.text) + "': expected an integer, got '" +
                             std::string(sv) + "'",
                         key.line, key.col);
    return v;
}

inline std::uint64_t cfg_u64(const ConfigToken& key, std::string_view value) {
    std::uint64_t v = 0;
    auto sv = trim(value);
    auto [ptr, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), v);
    if (ec != std::errc() || ptr != sv.data() + sv.size())
        throw ParseError("key '" + std::string(key.text) +
                             "': expected a non-negative integer, got '" + std::string(sv) + "'",
                         key.line, key.col);
    return v;
}

inline std::vector<std::string_view> split_list(std::string_view value) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (start <= value.size()) {
        std::size_t comma = value.find(',', start);
        std::string_view item = value.substr(
            start, comma == std::string_view::npos ? value.size() - start : comma - start);
        out.push_back(trim(item));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    if (out.size() == 1 && out[0].empty()) out.clear();
    return out;
}

}  // namespace detail

// Flat `key = value` format: one pair per line, `#` starts a comment, lists
// are comma-separated, rate tables are `min_snr:bps` pairs.  Unknown keys and
// type mismatches are reported with the key name and position.
inline ExperimentConfig parse_config(std::string_view text) {
    using detail::ConfigToken;
    ExperimentConfig cfg;
    int line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t nl = text.find('\n', start);
        std::string_view raw = text.substr(
            start, nl == std::string_view::npos ? text.size() - start : nl - start);
        ++line_no;
        std::size_t next = nl == std::string_view::npos ? std::string_view::npos : nl + 1;

        std::size_t hash = raw.find('#');
        std::string_view line = hash == std::string_view::npos ? raw : raw.substr(0, hash);
        std::string_view stripped = detail::trim(line);
        if (stripped.empty()) {
            if (next == std::string_view::npos) break;
            start = next;
            continue;
        }

        std::size_t eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ParseError("expected 'key = value'", line_no,
                             static_cast<int>(stripped.data() - line.data()) + 1);
        std::string_view key = detail::trim(line.substr(0, eq));
        std::string_view value = detail::trim(line.substr(eq + 1));
        ConfigToken kt{key, line_no, static_cast<int>(key.data() - line.data()) + 1};
        if (key.empty()) throw ParseError("missing key before '='", line_no, 1);

        if (key == "trace_file") {
            cfg.trace_file = std::string(value);
        } else if (key == "nodes") {
            cfg.rwm.node_count = static_cast<int>(detail::cfg_int(kt, value));
        } else if (key == "duration_s") {
            cfg.rwm.duration_s = detail::cfg_double(kt, value);
        } else if (key == "box_x_m") {
            cfg.rwm.box.x = detail::cfg_double(kt, value);
        } else if (key == "box_y_m") {
            cfg.rwm.box.y = detail::cfg_double(kt, value);
        } else if (key == "box_z_m") {
            cfg.rwm.box.z = detail::cfg_double(kt, value);
        } else if (key == "speed_min_mps") {
            cfg.rwm.speed_min_mps = detail::cfg_double(kt, value);
        } else if (key == "speed_max_mps") {
            cfg.rwm.speed_max_mps = detail::cfg_double(kt, value);
        } else if (key == "pause_s") {
            cfg.rwm.pause_s = detail::cfg_double(kt, value);
        } else if (key == "seeds") {
            std::vector<std::uint64_t> seeds;
            for (auto item : detail::split_list(value)) seeds.push_back(detail::cfg_u64(kt, item));
            if (seeds.empty())
                throw ParseError("key 'seeds': need at least one seed", kt.line, kt.col);
            cfg.seeds = std::move(seeds);
        } else if (key == "tx_power_dbm") {
            cfg.radio.tx_power_dbm = detail::cfg_double(kt, value);
        } else if (key == "frequency_hz") {
            cfg.radio.frequency_hz = detail::cfg_double(kt, value);
        } else if (key == "bandwidth_hz") {
            cfg.radio.bandwidth_hz = detail::cfg_double(kt, value);
        } else if (key == "noise_figure_db") {
            cfg.radio.noise_figure_db = detail::cfg_double(kt, value);
        } else if (key == "snr_threshold_db") {
            cfg.radio.snr_threshold_db = detail::cfg_double(kt, value);
        } else if (key == "cs_threshold_dbm") {
            cfg.radio.cs_threshold_dbm = detail::cfg_double(kt, value);
        } else if (key == "antenna_gain_tx_db") {
            cfg.radio.antenna_gain_tx_db = detail::cfg_double(kt, value);
        } else if (key == "antenna_gain_rx_db") {
            cfg.radio.antenna_gain_rx_db = detail::cfg_double(kt, value);
        } else if (key == "cs_mode") {
            if (value == "power")
                cfg.radio.cs_mode = CsMode::Power;
            else if (value == "usable_link")
                cfg.radio.cs_mode = CsMode::UsableLink;
            else
                throw ParseError("key 'cs_mode': expected power|usable_link, got '" +
                                     std::string(value) + "'",
                                 kt.line, kt.col);
        } else if (key == "rate_table") {
            RateTable t;
            for (auto item : detail::split_list(value)) {
                std::size_t colon = item.find(':');
                if (colon == std::string_view::npos)
                    throw ParseError("key 'rate_table': expected min_snr:bps pairs", kt.line,
                                     kt.col);
                RateEntry e;
                e.min_snr_db = detail::cfg_double(kt, item.substr(0, colon));
                e.rate_bps = detail::cfg_double(kt, item.substr(colon + 1));
                t.entries.push_back(e);
            }
            validate(t);
            cfg.rates = std::move(t);
        } else if (key == "gateway") {
            cfg.gateway = static_cast<int>(detail::cfg_int(kt, value));
        } else if (key == "sources") {
            cfg.sources.clear();
            for (auto item : detail::split_list(value))
                cfg.sources.push_back(static_cast<int>(detail::cfg_int(kt, item)));
        } else if (key == "source_count") {
            cfg.source_count = static_cast<int>(detail::cfg_int(kt, value));
        } else if (key == "source_order") {
            if (value == "ascending")
                cfg.source_order = SourceOrder::Ascending;
            else if (value == "given")
                cfg.source_order = SourceOrder::Given;
            else
                throw ParseError("key 'source_order': expected ascending|given, got '" +
                                     std::string(value) + "'",
                                 kt.line, kt.col);
        } else if (key == "offered_load_bps") {
            cfg.offered_load_bps = detail::cfg_double(kt, value);
        } else if (key == "packet_size_bytes") {
            cfg.packet_size_bytes = static_cast<int>(detail::cfg_int(kt, value));
        } else if (key == "delta_t_s") {
            cfg.delta_t_s = detail::cfg_double(kt, value);
        } else if (key == "metrics") {
            std::vector<MetricKind> ms;
            for (auto item : detail::split_list(value)) {
                try {
                    ms.push_back(metric_from_string(item));
                } catch (const ValidationError& e) {
                    throw ParseError("key 'metrics': " + std::string(e.what()), kt.line, kt.col);
                }
            }
            if (ms.empty())
                throw ParseError("key 'metrics': need at least one metric", kt.line, kt.col);
            cfg.metrics = std::move(ms);
        } else if (key == "alphas") {
            std::vector<double> as;
            for (auto item : detail::split_list(value)) as.push_back(detail::cfg_double(kt, item));
            if (as.empty())
                throw ParseError("key 'alphas': need at least one value", kt.line, kt.col);
            cfg.alphas = std::move(as);
        } else if (key == "airtime_overhead_s") {
            cfg.airtime_overhead_s = detail::cfg_double(kt, value);
        } else if (key == "airtime_frame_bits") {
            cfg.airtime_frame_bits = detail::cfg_double(kt, value);
        } else if (key == "sample_edge") {
            if (value == "hold")
                cfg.sample_edge = SampleEdge::Hold;
            else if (value == "strict")
                cfg.sample_edge = SampleEdge::Strict;
            else
                throw ParseError("key 'sample_edge': expected hold|strict, got '" +
                                     std::string(value) + "'",
                                 kt.line, kt.col);
        } else if (key == "output_dir") {
            cfg.output_dir = std::string(value);
        } else {
            throw ParseError("unknown key '" + std::string(key) + "'", kt.line, kt.col);
        }

        if (next == std::string_view::npos) break;
        start = next;
    }
    return cfg;
}

// Semantic checks that need the whole config assembled.
inline void validate(const ExperimentConfig& cfg) {
    validate(cfg.radio);
    validate(cfg.rates);
    if (cfg.trace_file.empty()) validate(cfg.rwm);
    if (!(cfg.delta_t_s > 0.0)) throw ValidationError("config: delta_t_s must be positive");
    if (cfg.metrics.empty()) throw ValidationError("config: need at least one metric");
    if (cfg.seeds.empty()) throw ValidationError("config: need at least one seed");
    if (cfg.alphas.empty()) throw ValidationError("config: need at least one alpha");
    for (double a : cfg.alphas)
        if (!(a >= 0.0 && a <= 1.0))
            throw ValidationError("config: alpha " + std::to_string(a) + " outside [0, 1]");
    if (cfg.gateway < 0) throw ValidationError("config: gateway must be non-negative");
    if (cfg.sources.empty() && cfg.source_count < 1)
        throw ValidationError("config: need sources or a positive source_count");
    if (cfg.packet_size_bytes < 1)
        throw ValidationError("config: packet_size_bytes must be positive");
    if (cfg.offered_load_bps == 0.0 || (cfg.offered_load_bps > 0.0 && !std::isfinite(cfg.offered_load_bps)))
        throw ValidationError("config: offered_load_bps must be positive (or omitted)");
    if (!(cfg.airtime_overhead_s >= 0.0) || !(cfg.airtime_frame_bits > 0.0))
        throw ValidationError("config: airtime constants must be positive");
    for (int s : cfg.sources)
        if (s < 0) throw ValidationError("config: sources must be non-negative");
}

// The flow sources for a run: the explicit list if present, otherwise the
// first source_count non-gateway ids.  Assignment order is ascending unless
// the config says to keep the list order.
inline std::vector<int> resolve_sources(const ExperimentConfig& cfg, int node_count) {
    std::vector<int> out;
    if (!cfg.sources.empty()) {
        out = cfg.sources;
        for (int s : out)
            if (s < 0 || s >= node_count)
                throw ValidationError("config: source " + std::to_string(s) +
                                      " out of range for " + std::to_string(node_count) +
                                      " nodes");
    } else {
        for (int v = 0; v < node_count && static_cast<int>(out.size()) < cfg.source_count; ++v)
            if (v != cfg.gateway) out.push_back(v);
        if (static_cast<int>(out.size()) < cfg.source_count)
            throw ValidationError("config: source_count " + std::to_string(cfg.source_count) +
                                  " exceeds available non-gateway nodes");
    }
    if (cfg.source_order == SourceOrder::Ascending) std::sort(out.begin(), out.end());
    return out;
}

}  // namespace fmn
