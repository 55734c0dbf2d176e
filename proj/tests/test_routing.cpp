#include <catch2/catch_amalgamated.hpp>

#include <limits>
#include <set>
#include <vector>

#include <fmn/routing.hpp>

#include "fig2.hpp"

using namespace fmn;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

TopologySnapshot snap_of(std::vector<Vec3> pos, int gateway, std::set<int> sources = {},
                         std::set<int> forwarding = {}) {
    return build_snapshot(std::move(pos), 0.0, RadioParams{}, default_rate_table(), gateway,
                          std::move(sources), std::move(forwarding));
}

CostModel hop_model(const TopologySnapshot& s) {
    return make_cost_model(MetricKind::Hop, 1.0, norm_constants(s));
}

}  // namespace

TEST_CASE("dijkstra on a line", "[routing]") {
    // 0 --40m-- 1 --40m-- 2(gw); 0-2 is out of range
    const TopologySnapshot s =
        snap_of({{0.0, 0.0, 0.0}, {40.0, 0.0, 0.0}, {80.0, 0.0, 0.0}}, 2);
    const RouteResult r = route_to_gateway(s, hop_model(s));
    CHECK(r.cost == std::vector<double>{2.0, 1.0, 0.0});
    CHECK(r.settle_index == std::vector<int>{2, 1, 0});
    CHECK(r.tree_next == std::vector<int>{1, 2, 2});  // gateway points at itself
    CHECK(r.weight[0 * 3 + 2] == kInf);
    CHECK(r.weight[0 * 3 + 1] == 1.0);
    CHECK(shortest_path(s, r, 0) == std::vector<int>{0, 1, 2});
    CHECK(shortest_path(s, r, 2) == std::vector<int>{2});
}

TEST_CASE("equal-cost ties resolve to the smallest node id", "[routing]") {
    // diamond: 0 reaches gw 3 through 1 or 2 at identical cost
    const TopologySnapshot s = snap_of(
        {{40.0, 40.0, 0.0}, {40.0, 0.0, 0.0}, {0.0, 40.0, 0.0}, {0.0, 0.0, 0.0}}, 3);
    REQUIRE(!s.has_link(0, 3));
    REQUIRE(!s.has_link(1, 2));
    const RouteResult r = route_to_gateway(s, hop_model(s));
    CHECK(r.cost[0] == 2.0);
    CHECK(r.tree_next[0] == 1);
    CHECK(shortest_path(s, r, 0) == std::vector<int>{0, 1, 3});
}

TEST_CASE("greedy successor choice never strands a path", "[routing]") {
    // With nobody active, i2r at alpha=1 prices every link at exactly zero, so
    // every edge between settled nodes is tight.  From 0 the smallest tight
    // successor is the dead-end spur 1; a correct walk must reject it and
    // leave through 2.
    const TopologySnapshot s = snap_of({{80.0, 0.0, 0.0},
                                        {80.0, 40.0, 0.0},
                                        {40.0, 0.0, 0.0},
                                        {500.0, 500.0, 0.0},
                                        {0.0, 0.0, 0.0}},
                                       4);
    REQUIRE(s.has_link(0, 1));
    REQUIRE(!s.has_link(1, 2));
    REQUIRE(!s.has_link(1, 4));
    const CostModel m = make_cost_model(MetricKind::I2R, 1.0, norm_constants(s));
    const RouteResult r = route_to_gateway(s, m);
    CHECK(r.cost[0] == 0.0);
    CHECK(r.cost[1] == 0.0);
    CHECK(detail::tight_edge(s, r, 0, 1));  // the trap is really there
    CHECK(shortest_path(s, r, 0) == std::vector<int>{0, 2, 4});

    // node 3 is marooned
    CHECK(r.cost[3] == kInf);
    CHECK(r.settle_index[3] == -1);
    CHECK(r.tree_next[3] == ForwardingTable::kUnreachable);
    CHECK(shortest_path(s, r, 3) == std::nullopt);
}

TEST_CASE("shortest_path argument checks", "[routing]") {
    const TopologySnapshot s = snap_of({{0.0, 0.0, 0.0}, {40.0, 0.0, 0.0}}, 0);
    const RouteResult r = route_to_gateway(s, hop_model(s));
    CHECK_THROWS_AS(shortest_path(s, r, -1), ValidationError);
    CHECK_THROWS_AS(shortest_path(s, r, 2), ValidationError);
}

TEST_CASE("tree parents settled earlier and tight", "[routing]") {
    const TopologySnapshot s = figtwo::snapshot();
    const CostModel m = make_cost_model(MetricKind::I2R, 0.75, norm_constants(s));
    const RouteResult r = route_to_gateway(s, m);
    for (int u = 0; u < s.n; ++u) {
        if (u == s.gateway || r.settle_index[u] < 0) continue;
        const int v = r.tree_next[u];
        REQUIRE(v != ForwardingTable::kUnreachable);
        CHECK(r.settle_index[v] < r.settle_index[u]);
        CHECK(r.weight[static_cast<std::size_t>(u) * s.n + v] + r.cost[v] == r.cost[u]);
        // following parents reaches the gateway without repeating a node
        int cur = u, hops = 0;
        while (cur != s.gateway && hops <= s.n) {
            cur = r.tree_next[cur];
            ++hops;
        }
        CHECK(cur == s.gateway);
    }
}

TEST_CASE("interference steers the second flow away from the relay", "[routing]") {
    // Two flows toward gateway 8.  Flow 3 has a single possible route and is
    // assigned first; its forwarders make the area around node 7 expensive,
    // so flow 0 exits via node 2 even though node 7 is also three hops out.
    const TopologySnapshot s = snap_of(figtwo::positions(), 8, {0, 3});
    for (double alpha : {1.0, 0.75, 0.5}) {
        const CostModel base = make_cost_model(MetricKind::I2R, alpha, NormConstants{});
        const FlowPaths fp = assign_flows(s, base, {3, 0});
        REQUIRE(fp.sources == std::vector<int>{3, 0});
        CHECK(fp.path_by_source.at(3) == std::vector<int>{3, 4, 5, 6, 8});
        CHECK(fp.path_by_source.at(0) == std::vector<int>{0, 1, 2, 8});
        CHECK(fp.forwarding == std::set<int>{1, 2, 4, 5, 6});
    }
}

TEST_CASE("assign_flows rejects bad source lists", "[routing]") {
    const TopologySnapshot s = snap_of(figtwo::positions(), 8, {0, 3});
    const CostModel base = make_cost_model(MetricKind::Hop, 1.0, NormConstants{});
    CHECK_THROWS_AS(assign_flows(s, base, {8}), ValidationError);       // gateway
    CHECK_THROWS_AS(assign_flows(s, base, {0, 0}), ValidationError);    // duplicate
    CHECK_THROWS_AS(assign_flows(s, base, {9}), ValidationError);       // out of range
    CHECK_THROWS_AS(assign_flows(s, base, {-1}), ValidationError);
}

TEST_CASE("unreachable sources are skipped, not fatal", "[routing]") {
    // node 2 sits alone; its flow is dropped while flow 1 proceeds
    const TopologySnapshot s =
        snap_of({{0.0, 0.0, 0.0}, {40.0, 0.0, 0.0}, {900.0, 0.0, 0.0}}, 0, {1, 2});
    const CostModel base = make_cost_model(MetricKind::Hop, 1.0, NormConstants{});
    const FlowPaths fp = assign_flows(s, base, {1, 2});
    CHECK(fp.path_by_source.size() == 1);
    CHECK(fp.path_by_source.at(1) == std::vector<int>{1, 0});
    CHECK(fp.path_by_source.count(2) == 0);
    CHECK(fp.forwarding.empty());
}

TEST_CASE("plan_at ties the table to the final interference state", "[routing]") {
    MobilityTrace tr;
    for (const Vec3& p : figtwo::positions()) tr.nodes.push_back({{0.0, p}, {10.0, p}});
    tr.duration_s = 10.0;

    PlanConfig pc;
    pc.gateway = 8;
    pc.sources = {3, 0};
    pc.kind = MetricKind::I2R;
    pc.alpha = 1.0;
    const SnapshotPlan plan = plan_at(tr, 4.0, pc);

    CHECK(plan.snapshot.t == 4.0);
    CHECK(plan.table.t == 4.0);
    CHECK(plan.table.next_hop.size() == 9);
    CHECK(plan.snapshot.sources == std::set<int>{0, 3});
    CHECK(plan.snapshot.forwarding == plan.flows.forwarding);
    CHECK(plan.flows.forwarding == std::set<int>{1, 2, 4, 5, 6});
    CHECK(plan.table.next_hop[8] == 8);
    // walking the table from each source reaches the gateway
    for (int src : {0, 3}) {
        int cur = src, hops = 0;
        while (cur != 8 && hops <= 9) {
            cur = plan.table.next_hop[cur];
            REQUIRE(cur != ForwardingTable::kUnreachable);
            ++hops;
        }
        CHECK(cur == 8);
    }
}

TEST_CASE("sample grid covers [0, duration] at delta_t steps", "[routing]") {
    const std::vector<double> ts = sample_times(160.0, 1.0);
    REQUIRE(ts.size() == 161);
    CHECK(ts.front() == 0.0);
    CHECK(ts.back() == 160.0);
    CHECK(ts[37] == 37.0);

    CHECK(sample_times(10.0, 3.0) == std::vector<double>{0.0, 3.0, 6.0, 9.0});

    // 0.3/0.1 rounds to 2.9999...; the epsilon keeps the third step
    const std::vector<double> fine = sample_times(0.3, 0.1);
    REQUIRE(fine.size() == 4);
    CHECK(fine.back() == 0.3);

    CHECK(sample_times(0.0, 1.0) == std::vector<double>{0.0});
    CHECK_THROWS_AS(sample_times(10.0, 0.0), ValidationError);
    CHECK_THROWS_AS(sample_times(-1.0, 1.0), ValidationError);
}

TEST_CASE("timeline stores only table changes", "[routing]") {
    PlanConfig pc;
    pc.gateway = 0;
    pc.sources = {1};

    SECTION("static geometry compresses to one entry") {
        MobilityTrace tr;
        tr.nodes = {{{0.0, {0.0, 0.0, 0.0}}, {8.0, {0.0, 0.0, 0.0}}},
                    {{0.0, {40.0, 0.0, 0.0}}, {8.0, {40.0, 0.0, 0.0}}}};
        tr.duration_s = 8.0;
        const ForwardingTimeline tl = build_timeline(tr, pc, 1.0);
        REQUIRE(tl.entries.size() == 1);
        CHECK(tl.entries[0].t == 0.0);
        CHECK(tl.entries[0].next_hop == std::vector<int>{0, 0});
        CHECK(tl.duration_s == 8.0);
        CHECK(tl.delta_t_s == 1.0);
    }

    SECTION("a link break lands a second entry") {
        // node 1 drifts from 44 m (usable) past the ~45.4 m limit to 46 m
        MobilityTrace tr;
        tr.nodes = {{{0.0, {0.0, 0.0, 0.0}}, {2.0, {0.0, 0.0, 0.0}}},
                    {{0.0, {44.0, 0.0, 0.0}}, {2.0, {46.0, 0.0, 0.0}}}};
        tr.duration_s = 2.0;
        const ForwardingTimeline tl = build_timeline(tr, pc, 1.0);
        REQUIRE(tl.entries.size() == 2);
        CHECK(tl.entries[0].t == 0.0);
        CHECK(tl.entries[0].next_hop == std::vector<int>{0, 0});
        CHECK(tl.entries[1].t == 2.0);
        CHECK(tl.entries[1].next_hop ==
              std::vector<int>{0, ForwardingTable::kUnreachable});

        CHECK(dump_timeline(tl) ==
              "t 0\n0 -> 0\n1 -> 0\n\n"
              "t 2\n0 -> 0\n1 -> unreachable\n\n");
    }
}
