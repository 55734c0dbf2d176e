#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "channel.hpp"
#include "errors.hpp"
#include "routing.hpp"
#include "topology.hpp"

namespace fmn {

struct Link {
    int tail = 0;
    int head = 0;

    friend bool operator==(const Link& a, const Link& b) {
        return a.tail == b.tail && a.head == b.head;
    }
    friend bool operator<(const Link& a, const Link& b) {
        return a.tail != b.tail ? a.tail < b.tail : a.head < b.head;
    }
};

// Two transmissions collide when they share an endpoint or when any endpoint
// of one can carrier-sense any endpoint of the other; either way they must
// time-share the channel.
inline bool conflicts(const TopologySnapshot& snap, const Link& a, const Link& b) {
    if (a.tail == b.tail || a.tail == b.head || a.head == b.tail || a.head == b.head)
        return true;
    return snap.cs_adjacent(a.tail, b.tail) || snap.cs_adjacent(a.tail, b.head) ||
           snap.cs_adjacent(a.head, b.tail) || snap.cs_adjacent(a.head, b.head);
}

// Conflict graph over the active link set.  `adj[k]` lists indices of links
// that conflict with links[k]; a link's channel share is 1/(1 + adj degree).
struct ConflictGraph {
    std::vector<Link> links;            // sorted, unique
    std::vector<std::vector<int>> adj;  // indices into links

    int index_of(const Link& l) const {
        auto it = std::lower_bound(links.begin(), links.end(), l);
        if (it == links.end() || !(*it == l)) return -1;
        return static_cast<int>(it - links.begin());
    }
};

inline ConflictGraph build_conflict_graph(const TopologySnapshot& snap,
                                          std::vector<Link> links) {
    std::sort(links.begin(), links.end());
    links.erase(std::unique(links.begin(), links.end()), links.end());
    ConflictGraph g;
    g.links = std::move(links);
    g.adj.resize(g.links.size());
    for (std::size_t a = 0; a < g.links.size(); ++a)
        for (std::size_t b = a + 1; b < g.links.size(); ++b)
            if (conflicts(snap, g.links[a], g.links[b])) {
                g.adj[a].push_back(static_cast<int>(b));
                g.adj[b].push_back(static_cast<int>(a));
            }
    return g;
}

struct FlowSpec {
    int source = 0;
    double offered_load_bps = 0.0;
    int packet_size_bytes = 1400;
};

struct FlowResult {
    int source = 0;
    bool reachable = false;
    bool saturated = false;
    double bottleneck_bps = 0.0;  // min shared capacity along the path
    double throughput_bps = 0.0;  // min(offered load, bottleneck)
    double delay_s = 0.0;         // queueing + transmission + propagation
};

struct EvalRow {
    double t = 0.0;
    double aggregate_throughput_bps = 0.0;
    double mean_delay_s = 0.0;
    int saturated_flows = 0;
    int unreachable_flows = 0;
    std::vector<FlowResult> flows;
};

inline constexpr double kUtilizationCap = 0.95;

// Analytic single-instant estimate.  Each active link's capacity is its PHY
// rate divided by the number of mutually conflicting active links (time-
// shared channel); per-hop delay is an M/M/1-style queueing factor on the
// transmission time plus propagation.  Flows whose path drives any link's
// utilization past the cap are reported saturated; their delays are computed
// at the cap so the numbers stay finite.
inline EvalRow estimate(const TopologySnapshot& snap, const FlowPaths& paths,
                        const std::vector<FlowSpec>& flows, const ConflictGraph& graph) {
    EvalRow row;
    row.t = snap.t;

    // Per-link shared capacity and total offered load crossing it.
    std::vector<double> capacity(graph.links.size(), 0.0);
    for (std::size_t k = 0; k < graph.links.size(); ++k) {
        const LinkAttr& a = snap.link(graph.links[k].tail, graph.links[k].head);
        capacity[k] = a.rate_bps / static_cast<double>(1 + graph.adj[k].size());
    }
    std::vector<double> offered(graph.links.size(), 0.0);
    for (const FlowSpec& f : flows) {
        auto it = paths.path_by_source.find(f.source);
        if (it == paths.path_by_source.end()) continue;
        const std::vector<int>& p = it->second;
        for (std::size_t k = 0; k + 1 < p.size(); ++k) {
            const int idx = graph.index_of(Link{p[k], p[k + 1]});
            if (idx < 0)
                throw ValidationError("estimate: flow " + std::to_string(f.source) +
                                      " uses a link missing from the conflict graph");
            offered[static_cast<std::size_t>(idx)] += f.offered_load_bps;
        }
    }

    double delay_sum = 0.0;
    int delay_count = 0;
    double sat_delay_sum = 0.0;
    int sat_delay_count = 0;
    for (const FlowSpec& f : flows) {
        FlowResult res;
        res.source = f.source;
        auto it = paths.path_by_source.find(f.source);
        if (it == paths.path_by_source.end()) {
            ++row.unreachable_flows;
            row.flows.push_back(res);
            continue;
        }
        res.reachable = true;
        const std::vector<int>& p = it->second;
        double bottleneck = std::numeric_limits<double>::infinity();
        double delay = 0.0;
        bool saturated = false;
        const double packet_bits = 8.0 * static_cast<double>(f.packet_size_bytes);
        for (std::size_t k = 0; k + 1 < p.size(); ++k) {
            const int idx = graph.index_of(Link{p[k], p[k + 1]});
            const double cap = capacity[static_cast<std::size_t>(idx)];
            const double rho = cap > 0.0 ? offered[static_cast<std::size_t>(idx)] / cap
                                         : std::numeric_limits<double>::infinity();
            if (rho >= kUtilizationCap) saturated = true;
            const double rho_eff = std::min(rho, kUtilizationCap);
            const LinkAttr& a = snap.link(p[k], p[k + 1]);
            delay += packet_bits / cap * (1.0 / (1.0 - rho_eff)) +
                     a.distance_m / kSpeedOfLight;
            bottleneck = std::min(bottleneck, cap);
        }
        res.bottleneck_bps = bottleneck;
        res.throughput_bps = std::min(f.offered_load_bps, bottleneck);
        res.delay_s = delay;
        res.saturated = saturated;
        row.aggregate_throughput_bps += res.throughput_bps;
        if (saturated) {
            ++row.saturated_flows;
            sat_delay_sum += delay;
            ++sat_delay_count;
        } else {
            delay_sum += delay;
            ++delay_count;
        }
        row.flows.push_back(res);
    }

    // Mean over unsaturated reachable flows; if every reachable flow is
    // saturated, fall back to their capped delays; with nothing reachable
    // there is no delay to report.
    if (delay_count > 0)
        row.mean_delay_s = delay_sum / delay_count;
    else if (sat_delay_count > 0)
        row.mean_delay_s = sat_delay_sum / sat_delay_count;
    else
        row.mean_delay_s = 0.0;
    return row;
}

inline EvalRow estimate(const TopologySnapshot& snap, const FlowPaths& paths,
                        const std::vector<FlowSpec>& flows) {
    std::vector<Link> links;
    for (const auto& [src, p] : paths.path_by_source)
        for (std::size_t k = 0; k + 1 < p.size(); ++k) links.push_back(Link{p[k], p[k + 1]});
    return estimate(snap, paths, flows, build_conflict_graph(snap, links));
}

struct CurvePoint {
    double x = 0.0;
    double f = 0.0;
};

struct PercentileSet {
    double p25 = 0.0;
    double p50 = 0.0;
    double p75 = 0.0;
};

// Nearest-rank percentile over ascending `sorted`: the element at 1-indexed
// rank ceil(p/100 * n).
inline double percentile_nearest_rank(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) throw ValidationError("percentile: empty sample");
    if (!(p > 0.0 && p <= 100.0)) throw ValidationError("percentile: p must be in (0, 100]");
    const double n = static_cast<double>(sorted.size());
    std::size_t rank = static_cast<std::size_t>(std::ceil(p / 100.0 * n));
    if (rank < 1) rank = 1;
    return sorted[rank - 1];
}

struct EvalSummary {
    std::vector<CurvePoint> delay_cdf;        // fraction of samples <= x
    std::vector<CurvePoint> throughput_ccdf;  // fraction of samples > x
    PercentileSet delay_s;
    PercentileSet throughput_bps;
    double mean_throughput_bps = 0.0;
    double mean_delay_s = 0.0;
    long long saturated_flow_total = 0;
    std::vector<EvalRow> rows;
};

inline EvalSummary summarize(std::vector<EvalRow> rows) {
    if (rows.empty()) throw ValidationError("summarize: need at least one row");
    EvalSummary s;
    std::vector<double> delays, throughputs;
    delays.reserve(rows.size());
    throughputs.reserve(rows.size());
    for (const EvalRow& r : rows) {
        delays.push_back(r.mean_delay_s);
        throughputs.push_back(r.aggregate_throughput_bps);
        s.mean_delay_s += r.mean_delay_s;
        s.mean_throughput_bps += r.aggregate_throughput_bps;
        s.saturated_flow_total += r.saturated_flows;
    }
    s.mean_delay_s /= static_cast<double>(rows.size());
    s.mean_throughput_bps /= static_cast<double>(rows.size());
    std::sort(delays.begin(), delays.end());
    std::sort(throughputs.begin(), throughputs.end());
    s.delay_s = PercentileSet{percentile_nearest_rank(delays, 25.0),
                              percentile_nearest_rank(delays, 50.0),
                              percentile_nearest_rank(delays, 75.0)};
    s.throughput_bps = PercentileSet{percentile_nearest_rank(throughputs, 25.0),
                                     percentile_nearest_rank(throughputs, 50.0),
                                     percentile_nearest_rank(throughputs, 75.0)};
    const double n = static_cast<double>(rows.size());
    for (std::size_t k = 0; k < delays.size(); ++k) {
        if (k + 1 < delays.size() && delays[k + 1] == delays[k]) continue;
        s.delay_cdf.push_back({delays[k], static_cast<double>(k + 1) / n});
    }
    for (std::size_t k = 0; k < throughputs.size(); ++k) {
        if (k + 1 < throughputs.size() && throughputs[k + 1] == throughputs[k]) continue;
        s.throughput_ccdf.push_back(
            {throughputs[k], static_cast<double>(throughputs.size() - (k + 1)) / n});
    }
    s.rows = std::move(rows);
    return s;
}

}  // namespace fmn
