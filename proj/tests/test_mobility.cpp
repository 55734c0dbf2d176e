#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>
#include <stdexcept>

#include <fmn/mobility.hpp>

using namespace fmn;
using Catch::Approx;
using Catch::Matchers::WithinAbs;

TEST_CASE("trace parsing: one line per node, t x y z groups", "[mobility]") {
    const MobilityTrace tr = parse_trace("0 1 2 3 10 4 5 6\n0 0 0 0\n");
    REQUIRE(tr.node_count() == 2);
    REQUIRE(tr.nodes[0].size() == 2);
    CHECK(tr.nodes[0][0].t == 0.0);
    CHECK(tr.nodes[0][0].pos == Vec3{1.0, 2.0, 3.0});
    CHECK(tr.nodes[0][1].t == 10.0);
    CHECK(tr.nodes[0][1].pos == Vec3{4.0, 5.0, 6.0});
    REQUIRE(tr.nodes[1].size() == 1);
    CHECK(tr.duration_s == 10.0);
}

TEST_CASE("trace parsing tolerates blank lines and missing final newline", "[mobility]") {
    const MobilityTrace tr = parse_trace("\n0 1 1 1\n\n0 2 2 2");
    REQUIRE(tr.node_count() == 2);
    CHECK(tr.nodes[1][0].pos == Vec3{2.0, 2.0, 2.0});
}

TEST_CASE("trace parse errors carry position", "[mobility]") {
    try {
        parse_trace("0 1 2 x\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line == 1);
        CHECK(e.column == 7);
        CHECK(std::string(e.what()).find("'x'") != std::string::npos);
    }
    try {
        parse_trace("0 0 0 0\n0 1 2 3 5 6\n");  // second group on line 2 incomplete
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line == 2);
        CHECK(e.column == 9);
    }
}

TEST_CASE("trace validation: times per node strictly increase", "[mobility]") {
    CHECK_THROWS_AS(parse_trace("0 0 0 0 0 1 1 1\n"), ValidationError);
    try {
        parse_trace("0 0 0 0 5 1 1 1\n5 0 0 0 5 1 1 1\n");
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("node 1") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_trace("-1 0 0 0\n"), ValidationError);  // negative time
    CHECK_THROWS_AS(parse_trace(""), ValidationError);            // no nodes
    CHECK_THROWS_AS(parse_trace("   \n  \n"), ValidationError);
}

TEST_CASE("serialization round-trips exactly", "[mobility]") {
    const std::string canonical = "0 1 2 3 10 4 5 6\n0 0 0 0\n";
    CHECK(serialize_trace(parse_trace(canonical)) == canonical);

    RwmParams p;
    p.node_count = 5;
    p.duration_s = 30.0;
    p.seed = 42;
    const MobilityTrace tr = generate_rwm(p);
    const MobilityTrace back = parse_trace(serialize_trace(tr));
    REQUIRE(back.node_count() == tr.node_count());
    CHECK(back.duration_s == tr.duration_s);
    for (int v = 0; v < tr.node_count(); ++v) {
        REQUIRE(back.nodes[v].size() == tr.nodes[v].size());
        for (std::size_t k = 0; k < tr.nodes[v].size(); ++k) {
            CHECK(back.nodes[v][k].t == tr.nodes[v][k].t);
            CHECK(back.nodes[v][k].pos == tr.nodes[v][k].pos);
        }
    }
}

TEST_CASE("random waypoint traces are deterministic in the seed", "[mobility]") {
    RwmParams p;
    p.node_count = 8;
    p.duration_s = 60.0;
    p.seed = 7;
    CHECK(serialize_trace(generate_rwm(p)) == serialize_trace(generate_rwm(p)));
    RwmParams q = p;
    q.seed = 8;
    CHECK(serialize_trace(generate_rwm(p)) != serialize_trace(generate_rwm(q)));
}

TEST_CASE("random waypoint structure: bounds, speeds, exact horizon pin", "[mobility]") {
    RwmParams p;  // defaults: 21 nodes, 160 s, 80x80x25 box, 0.5..3 m/s
    const MobilityTrace tr = generate_rwm(p);
    REQUIRE(tr.node_count() == 21);
    CHECK(tr.duration_s == 160.0);
    for (const auto& wps : tr.nodes) {
        REQUIRE(wps.size() >= 2);
        CHECK(wps.front().t == 0.0);
        CHECK(wps.back().t == 160.0);  // pinned exactly, not approximately
        for (std::size_t k = 0; k < wps.size(); ++k) {
            if (k > 0) {
                CHECK(wps[k].t > wps[k - 1].t);
                const double d = distance(wps[k].pos, wps[k - 1].pos);
                const double speed = d / (wps[k].t - wps[k - 1].t);
                CHECK(speed <= p.speed_max_mps * (1.0 + 1e-12));
                // the final leg may be cut early, any other leg keeps pace
                if (k + 1 < wps.size()) CHECK(speed >= p.speed_min_mps * (1.0 - 1e-12));
            }
            CHECK(wps[k].pos.x >= 0.0);
            CHECK(wps[k].pos.x <= p.box.x);
            CHECK(wps[k].pos.y >= 0.0);
            CHECK(wps[k].pos.y <= p.box.y);
            CHECK(wps[k].pos.z >= 0.0);
            CHECK(wps[k].pos.z <= p.box.z);
        }
    }
}

TEST_CASE("pause inserts a dwell at the reached waypoint", "[mobility]") {
    RwmParams p;
    p.node_count = 4;
    p.duration_s = 120.0;
    p.pause_s = 2.0;
    p.seed = 3;
    const MobilityTrace tr = generate_rwm(p);
    int dwells = 0;
    for (const auto& wps : tr.nodes) {
        for (std::size_t k = 1; k < wps.size(); ++k) {
            if (wps[k].pos == wps[k - 1].pos) {
                ++dwells;
                // full pause (up to accumulated-time rounding), except when
                // cut by the horizon
                const double dt = wps[k].t - wps[k - 1].t;
                if (wps[k].t < tr.duration_s) CHECK_THAT(dt, WithinAbs(2.0, 1e-9));
                CHECK(dt <= 2.0 + 1e-9);
            }
        }
    }
    CHECK(dwells > 0);
}

TEST_CASE("rwm parameter validation", "[mobility]") {
    RwmParams p;
    CHECK_NOTHROW(validate(p));
    RwmParams bad = p;
    bad.node_count = 0;
    CHECK_THROWS_AS(validate(bad), ValidationError);
    bad = p;
    bad.speed_min_mps = 0.0;
    CHECK_THROWS_AS(validate(bad), ValidationError);
    bad = p;
    bad.speed_max_mps = 0.2;  // below speed_min
    CHECK_THROWS_AS(validate(bad), ValidationError);
    bad = p;
    bad.box = Vec3{0.0, 0.0, 0.0};
    CHECK_THROWS_AS(validate(bad), ValidationError);
    bad = p;
    bad.pause_s = -1.0;
    CHECK_THROWS_AS(validate(bad), ValidationError);
}

TEST_CASE("position sampling interpolates linearly and is exact at knots", "[mobility]") {
    const MobilityTrace tr = parse_trace("0 0 0 0 10 10 0 0 20 10 20 0\n");
    CHECK(sample_position(tr, 0, 0.0) == Vec3{0.0, 0.0, 0.0});
    CHECK(sample_position(tr, 0, 10.0) == Vec3{10.0, 0.0, 0.0});
    CHECK(sample_position(tr, 0, 20.0) == Vec3{10.0, 20.0, 0.0});
    CHECK(sample_position(tr, 0, 2.5).x == Approx(2.5).margin(1e-12));
    CHECK(sample_position(tr, 0, 15.0).y == Approx(10.0).margin(1e-12));
    const auto all = sample_positions(tr, 15.0);
    REQUIRE(all.size() == 1);
    CHECK(all[0].y == Approx(10.0).margin(1e-12));
}

TEST_CASE("sampling edge policy: hold clamps, strict refuses", "[mobility]") {
    const MobilityTrace tr = parse_trace("0 1 1 1 10 2 2 2\n");
    CHECK(sample_position(tr, 0, -5.0, SampleEdge::Hold) == Vec3{1.0, 1.0, 1.0});
    CHECK(sample_position(tr, 0, 99.0, SampleEdge::Hold) == Vec3{2.0, 2.0, 2.0});
    CHECK_THROWS_AS(sample_position(tr, 0, -5.0, SampleEdge::Strict), std::out_of_range);
    CHECK_THROWS_AS(sample_position(tr, 0, 10.5, SampleEdge::Strict), std::out_of_range);
    CHECK_NOTHROW(sample_position(tr, 0, 10.0, SampleEdge::Strict));
    CHECK_THROWS_AS(sample_position(tr, 2, 1.0), std::out_of_range);  // no such node
}

TEST_CASE("nodes whose waypoints start late hold their first position", "[mobility]") {
    // node 1's first waypoint is at t=5; before that it holds position
    const MobilityTrace tr = parse_trace("0 0 0 0 10 0 0 0\n5 7 7 7 10 9 9 9\n");
    CHECK(sample_position(tr, 1, 2.0) == Vec3{7.0, 7.0, 7.0});
    CHECK(sample_position(tr, 1, 5.0) == Vec3{7.0, 7.0, 7.0});
}
