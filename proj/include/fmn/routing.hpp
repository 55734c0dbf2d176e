#pragma once

#include <algorithm>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "errors.hpp"
#include "metrics.hpp"
#include "mobility.hpp"
#include "textio.hpp"
#include "topology.hpp"

namespace fmn {

struct ForwardingTable {
    static constexpr int kUnreachable = -1;
    double t = 0.0;
    std::vector<int> next_hop;  // per node; the gateway points at itself
};

// Single-destination shortest paths toward the gateway.  `cost` accumulates
// right-associated (w + cost[v]) exactly as Dijkstra relaxes, so tightness of
// an edge is a bitwise test.  `tree_next` is a shortest-path tree in which
// every parent settled strictly earlier, which makes the forwarding graph a
// tree by construction rather than by numeric accident.
struct RouteResult {
    std::vector<double> cost;         // +inf when the gateway is unreachable
    std::vector<int> settle_index;    // settling order, -1 if never settled
    std::vector<int> tree_next;       // parent toward gateway, gateway -> itself
    std::vector<double> weight;       // n*n directed link costs, +inf where absent
};

inline RouteResult route_to_gateway(const TopologySnapshot& snap, const CostModel& m) {
    const int n = snap.n;
    const int gw = snap.gateway;
    const double inf = std::numeric_limits<double>::infinity();

    RouteResult r;
    r.cost.assign(static_cast<std::size_t>(n), inf);
    r.settle_index.assign(static_cast<std::size_t>(n), -1);
    r.tree_next.assign(static_cast<std::size_t>(n), ForwardingTable::kUnreachable);
    r.weight.assign(static_cast<std::size_t>(n) * n, inf);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j && snap.has_link(i, j))
                r.weight[static_cast<std::size_t>(i) * n + j] = link_cost(snap, m, i, j);

    // Min-heap keyed (cost, node id); duplicates allowed, stale pops skipped.
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    std::vector<char> done(static_cast<std::size_t>(n), 0);
    r.cost[static_cast<std::size_t>(gw)] = 0.0;
    pq.push({0.0, gw});
    int order = 0;
    while (!pq.empty()) {
        const int u = pq.top().second;
        pq.pop();
        if (done[static_cast<std::size_t>(u)]) continue;
        done[static_cast<std::size_t>(u)] = 1;
        r.settle_index[static_cast<std::size_t>(u)] = order++;
        for (int x = 0; x < n; ++x) {
            if (x == u || done[static_cast<std::size_t>(x)] || !snap.has_link(x, u)) continue;
            const double cand =
                r.weight[static_cast<std::size_t>(x) * n + u] + r.cost[static_cast<std::size_t>(u)];
            if (cand < r.cost[static_cast<std::size_t>(x)]) {
                r.cost[static_cast<std::size_t>(x)] = cand;
                pq.push({cand, x});
            }
        }
    }

    r.tree_next[static_cast<std::size_t>(gw)] = gw;
    for (int u = 0; u < n; ++u) {
        if (u == gw || r.settle_index[static_cast<std::size_t>(u)] < 0) continue;
        for (int v = 0; v < n; ++v) {
            if (v == u || !snap.has_link(u, v)) continue;
            if (r.settle_index[static_cast<std::size_t>(v)] < 0) continue;
            if (r.settle_index[static_cast<std::size_t>(v)] >=
                r.settle_index[static_cast<std::size_t>(u)])
                continue;
            if (r.weight[static_cast<std::size_t>(u) * n + v] +
                    r.cost[static_cast<std::size_t>(v)] ==
                r.cost[static_cast<std::size_t>(u)]) {
                r.tree_next[static_cast<std::size_t>(u)] = v;
                break;
            }
        }
    }
    return r;
}

namespace detail {

// Tight edge u -> v: following it preserves optimality.  Equality is bitwise
// against the same right-associated sum Dijkstra produced.
inline bool tight_edge(const TopologySnapshot& snap, const RouteResult& r, int u, int v) {
    if (v == u || !snap.has_link(u, v)) return false;
    if (r.settle_index[static_cast<std::size_t>(v)] < 0) return false;
    return r.weight[static_cast<std::size_t>(u) * snap.n + v] +
               r.cost[static_cast<std::size_t>(v)] ==
           r.cost[static_cast<std::size_t>(u)];
}

// Can the gateway be reached from `start` over tight edges without touching
// `blocked`?  Needed because zero-cost clusters make the tight graph cyclic:
// the cheapest-looking branch may strand a simple path.
inline bool gateway_reachable(const TopologySnapshot& snap, const RouteResult& r, int start,
                              const std::vector<char>& blocked) {
    if (start == snap.gateway) return true;
    std::vector<char> seen(static_cast<std::size_t>(snap.n), 0);
    std::vector<int> stack{start};
    seen[static_cast<std::size_t>(start)] = 1;
    while (!stack.empty()) {
        const int u = stack.back();
        stack.pop_back();
        for (int v = 0; v < snap.n; ++v) {
            if (seen[static_cast<std::size_t>(v)] || blocked[static_cast<std::size_t>(v)])
                continue;
            if (!tight_edge(snap, r, u, v)) continue;
            if (v == snap.gateway) return true;
            seen[static_cast<std::size_t>(v)] = 1;
            stack.push_back(v);
        }
    }
    return false;
}

}  // namespace detail

// Lexicographically smallest minimum-cost simple path src -> gateway, or
// nullopt when the gateway is unreachable.  Walks tight edges greedily in
// ascending node id, committing to a successor only if the gateway stays
// reachable past it — every prefix chosen this way extends to a full tight
// path, so the walk cannot dead-end.
inline std::optional<std::vector<int>> shortest_path(const TopologySnapshot& snap,
                                                     const RouteResult& r, int src) {
    if (src < 0 || src >= snap.n)
        throw ValidationError("shortest_path: source " + std::to_string(src) + " out of range");
    if (src == snap.gateway) return std::vector<int>{src};
    if (r.settle_index[static_cast<std::size_t>(src)] < 0) return std::nullopt;

    std::vector<char> visited(static_cast<std::size_t>(snap.n), 0);
    std::vector<int> path{src};
    visited[static_cast<std::size_t>(src)] = 1;
    int cur = src;
    while (cur != snap.gateway) {
        int next = -1;
        for (int v = 0; v < snap.n; ++v) {
            if (visited[static_cast<std::size_t>(v)]) continue;
            if (!detail::tight_edge(snap, r, cur, v)) continue;
            if (detail::gateway_reachable(snap, r, v, visited)) {
                next = v;
                break;
            }
        }
        if (next == -1) return std::nullopt;  // cannot happen for a settled source
        path.push_back(next);
        visited[static_cast<std::size_t>(next)] = 1;
        cur = next;
    }
    return path;
}

inline std::optional<std::vector<int>> shortest_path(const TopologySnapshot& snap,
                                                     const CostModel& m, int src) {
    const RouteResult r = route_to_gateway(snap, m);
    return shortest_path(snap, r, src);
}

// Result of sequential flow assignment: the order processed, each reachable
// source's committed path, and the accumulated forwarding set.
struct FlowPaths {
    std::vector<int> sources;                        // assignment order
    std::map<int, std::vector<int>> path_by_source;  // reachable sources only
    std::set<int> forwarding;
};

// Assigns flows one at a time in the given order.  Every declared source is
// active from the start (they all generate traffic); forwarding activity
// accrues as paths are committed, and each step re-derives the normalization
// constants, so later flows see the interference earlier ones created.
inline FlowPaths assign_flows(const TopologySnapshot& snap, const CostModel& base,
                              const std::vector<int>& sources_in_order) {
    std::set<int> src_set = snap.sources;
    for (int s : sources_in_order) {
        if (s < 0 || s >= snap.n)
            throw ValidationError("assign_flows: source " + std::to_string(s) + " out of range");
        if (s == snap.gateway)
            throw ValidationError("assign_flows: gateway cannot be a source");
        src_set.insert(s);
    }
    std::set<int> seen_order(sources_in_order.begin(), sources_in_order.end());
    if (seen_order.size() != sources_in_order.size())
        throw ValidationError("assign_flows: duplicate source in order list");

    FlowPaths fp;
    fp.sources = sources_in_order;
    std::set<int> fwd = snap.forwarding;
    for (int s : sources_in_order) {
        TopologySnapshot cur = snap.with_activity(src_set, fwd);
        CostModel m = base;
        m.norm = norm_constants(cur);
        const RouteResult r = route_to_gateway(cur, m);
        auto p = shortest_path(cur, r, s);
        if (!p) continue;
        for (std::size_t k = 1; k + 1 < p->size(); ++k) fwd.insert((*p)[k]);
        fp.path_by_source[s] = std::move(*p);
    }
    fp.forwarding = std::move(fwd);
    return fp;
}

// One planning run: everything an evaluator needs about a single instant.
struct PlanConfig {
    RadioParams radio;
    RateTable rates = default_rate_table();
    int gateway = 0;
    std::vector<int> sources;  // assignment order
    MetricKind kind = MetricKind::I2R;
    double alpha = 1.0;
    double airtime_overhead_s = 60.5e-6;
    double airtime_frame_bits = 8192.0;
    SampleEdge edge = SampleEdge::Hold;
};

struct SnapshotPlan {
    TopologySnapshot snapshot;  // with final activity (sources + forwarding)
    FlowPaths flows;
    ForwardingTable table;
};

inline SnapshotPlan plan_at(const MobilityTrace& tr, double t, const PlanConfig& cfg) {
    const std::vector<Vec3> positions = sample_positions(tr, t, cfg.edge);
    std::set<int> src_set(cfg.sources.begin(), cfg.sources.end());
    TopologySnapshot snap =
        build_snapshot(positions, t, cfg.radio, cfg.rates, cfg.gateway, src_set);
    const CostModel base = make_cost_model(cfg.kind, cfg.alpha, NormConstants{},
                                           cfg.airtime_overhead_s, cfg.airtime_frame_bits);

    SnapshotPlan plan;
    plan.flows = assign_flows(snap, base, cfg.sources);
    plan.snapshot = snap.with_activity(src_set, plan.flows.forwarding);
    CostModel final_model = base;
    final_model.norm = norm_constants(plan.snapshot);
    const RouteResult r = route_to_gateway(plan.snapshot, final_model);
    plan.table.t = t;
    plan.table.next_hop = r.tree_next;
    return plan;
}

// Forwarding tables across the whole trace, delta-compressed: an entry is
// stored only when the table differs from the previous instant.
struct ForwardingTimeline {
    std::vector<ForwardingTable> entries;
    double duration_s = 0.0;
    double delta_t_s = 1.0;
};

// Sampling grid t_k = k * delta_t clamped to the duration.  The epsilon keeps
// the final sample when the duration is an exact multiple of delta_t but the
// division rounds just below an integer.
inline std::vector<double> sample_times(double duration_s, double delta_t_s) {
    if (!(delta_t_s > 0.0)) throw ValidationError("sample_times: delta_t_s must be positive");
    if (!(duration_s >= 0.0)) throw ValidationError("sample_times: duration_s must be >= 0");
    const long long steps = static_cast<long long>(duration_s / delta_t_s + 1e-9);
    std::vector<double> ts;
    ts.reserve(static_cast<std::size_t>(steps) + 1);
    for (long long k = 0; k <= steps; ++k)
        ts.push_back(std::min(static_cast<double>(k) * delta_t_s, duration_s));
    return ts;
}

inline ForwardingTimeline build_timeline(const MobilityTrace& tr, const PlanConfig& cfg,
                                         double delta_t_s) {
    ForwardingTimeline tl;
    tl.duration_s = tr.duration_s;
    tl.delta_t_s = delta_t_s;
    for (double t : sample_times(tr.duration_s, delta_t_s)) {
        SnapshotPlan plan = plan_at(tr, t, cfg);
        if (tl.entries.empty() || plan.table.next_hop != tl.entries.back().next_hop)
            tl.entries.push_back(std::move(plan.table));
    }
    return tl;
}

// Text form, one block per stored update.
inline std::string dump_timeline(const ForwardingTimeline& tl) {
    std::string out;
    for (const ForwardingTable& e : tl.entries) {
        out += "t " + fmt_exact(e.t) + "\n";
        for (std::size_t v = 0; v < e.next_hop.size(); ++v) {
            out += std::to_string(v);
            out += " -> ";
            if (e.next_hop[v] == ForwardingTable::kUnreachable)
                out += "unreachable";
            else
                out += std::to_string(e.next_hop[v]);
            out += '\n';
        }
        out += '\n';
    }
    return out;
}

}  // namespace fmn
