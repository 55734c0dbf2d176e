#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "channel.hpp"
#include "errors.hpp"
#include "geom.hpp"
#include "textio.hpp"

namespace fmn {

struct LinkAttr {
    double distance_m = 0.0;
    double snr_db = 0.0;
    double rate_bps = 0.0;
};

// Connectivity at a single sample instant: which directed links are usable,
// their attributes, carrier-sense adjacency, and the current traffic activity
// (which nodes generate or forward).  Geometry is symmetric, so the matrices
// are too; they are stored densely for O(1) lookups.
struct TopologySnapshot {
    double t = 0.0;
    std::vector<Vec3> positions;
    int gateway = 0;
    std::set<int> sources;
    std::set<int> forwarding;
    RadioParams radio;
    RateTable rates;
    int n = 0;
    std::vector<char> link_present;             // n*n, row i = tail
    std::vector<LinkAttr> link_attrs;           // n*n, valid where link_present
    std::vector<char> cs;                       // n*n carrier-sense adjacency
    std::vector<std::pair<int, int>> coincident_pairs;  // raw distance < 1 cm

    bool has_link(int i, int j) const {
        return link_present[static_cast<std::size_t>(i) * n + j] != 0;
    }
    const LinkAttr& link(int i, int j) const {
        if (!has_link(i, j)) throw MissingLinkError(i, j);
        return link_attrs[static_cast<std::size_t>(i) * n + j];
    }
    bool cs_adjacent(int i, int j) const {
        return cs[static_cast<std::size_t>(i) * n + j] != 0;
    }
    // A node is active when it generates traffic or relays someone else's.
    // The gateway only sinks traffic, so it is active only if listed.
    bool active(int v) const { return sources.count(v) != 0 || forwarding.count(v) != 0; }
    std::vector<int> out_neighbors(int i) const {
        std::vector<int> out;
        for (int j = 0; j < n; ++j)
            if (j != i && has_link(i, j)) out.push_back(j);
        return out;
    }
    // Same geometry and radio, different traffic pattern.  Interference
    // counts (and thus i2r costs) depend on activity, so flow assignment
    // re-derives it per step.
    TopologySnapshot with_activity(std::set<int> new_sources,
                                   std::set<int> new_forwarding) const {
        TopologySnapshot s = *this;
        s.sources = std::move(new_sources);
        s.forwarding = std::move(new_forwarding);
        return s;
    }
};

// Derives the full connectivity state from node positions.  Pairs closer than
// 1 cm are evaluated at 1 cm (Friis diverges at 0) and reported in
// coincident_pairs so callers can flag the trace.
inline TopologySnapshot build_snapshot(std::vector<Vec3> positions, double t,
                                       const RadioParams& radio, const RateTable& rates,
                                       int gateway, std::set<int> sources,
                                       std::set<int> forwarding = {}) {
    validate(radio);
    validate(rates);
    const int n = static_cast<int>(positions.size());
    if (n < 2) throw ValidationError("snapshot: need at least 2 nodes");
    if (gateway < 0 || gateway >= n)
        throw ValidationError("snapshot: gateway " + std::to_string(gateway) +
                              " out of range for " + std::to_string(n) + " nodes");
    for (int s : sources)
        if (s < 0 || s >= n)
            throw ValidationError("snapshot: source " + std::to_string(s) + " out of range");
    if (sources.count(gateway) != 0)
        throw ValidationError("snapshot: gateway cannot be a source");
    for (int v : forwarding)
        if (v < 0 || v >= n)
            throw ValidationError("snapshot: forwarding node " + std::to_string(v) +
                                  " out of range");

    TopologySnapshot snap;
    snap.t = t;
    snap.positions = std::move(positions);
    snap.gateway = gateway;
    snap.sources = std::move(sources);
    snap.forwarding = std::move(forwarding);
    snap.radio = radio;
    snap.rates = rates;
    snap.n = n;
    snap.link_present.assign(static_cast<std::size_t>(n) * n, 0);
    snap.link_attrs.assign(static_cast<std::size_t>(n) * n, LinkAttr{});
    snap.cs.assign(static_cast<std::size_t>(n) * n, 0);

    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            double d = distance(snap.positions[static_cast<std::size_t>(i)],
                                snap.positions[static_cast<std::size_t>(j)]);
            if (d < 0.01) {
                snap.coincident_pairs.emplace_back(i, j);
                d = 0.01;
            }
            const double snr = snr_db(d, radio);
            const std::size_t ij = static_cast<std::size_t>(i) * n + j;
            const std::size_t ji = static_cast<std::size_t>(j) * n + i;
            if (snr > radio.snr_threshold_db) {
                LinkAttr a{d, snr, phy_rate_bps(snr, rates)};
                snap.link_present[ij] = snap.link_present[ji] = 1;
                snap.link_attrs[ij] = snap.link_attrs[ji] = a;
            }
            if (in_carrier_sense(d, radio)) snap.cs[ij] = snap.cs[ji] = 1;
        }
    }
    return snap;
}

// Number of active carrier-sense neighbors of `head`, not counting
// `excluded_tail` (the transmitter on the link being costed — its own
// activity is the flow we are routing, not interference to it).
inline int active_neighbor_count(const TopologySnapshot& snap, int head, int excluded_tail) {
    int count = 0;
    for (int v = 0; v < snap.n; ++v) {
        if (v == head || v == excluded_tail) continue;
        if (snap.cs_adjacent(head, v) && snap.active(v)) ++count;
    }
    return count;
}

inline int active_neighbor_count(const TopologySnapshot& snap, int head) {
    return active_neighbor_count(snap, head, -1);
}

// Normalizers for the i2r cost blend: the longest usable link and the largest
// per-node active-neighbor count anywhere in the snapshot.  Both may be 0
// (no links / no active nodes); the cost model handles those degenerate
// cases explicitly.
struct NormConstants {
    double d_max = 0.0;
    int gamma_max = 0;
};

inline NormConstants norm_constants(const TopologySnapshot& snap) {
    NormConstants nc;
    for (int i = 0; i < snap.n; ++i)
        for (int j = i + 1; j < snap.n; ++j)
            if (snap.has_link(i, j)) nc.d_max = std::max(nc.d_max, snap.link(i, j).distance_m);
    for (int v = 0; v < snap.n; ++v)
        nc.gamma_max = std::max(nc.gamma_max, active_neighbor_count(snap, v));
    return nc;
}

// Diagnostic text form: header, nodes, undirected links, then carrier-sense
// pairs that are not usable links.  Order is fixed so dumps diff cleanly.
inline std::string dump_snapshot(const TopologySnapshot& snap) {
    std::string out;
    out += "t " + fmt_g9(snap.t) + "\n";
    out += "nodes " + std::to_string(snap.n) + "\n";
    out += "gateway " + std::to_string(snap.gateway) + "\n";
    out += "sources";
    for (int s : snap.sources) out += " " + std::to_string(s);
    out += "\n";
    out += "forwarding";
    for (int v : snap.forwarding) out += " " + std::to_string(v);
    out += "\n";
    for (int v = 0; v < snap.n; ++v) {
        const Vec3& p = snap.positions[static_cast<std::size_t>(v)];
        out += "node " + std::to_string(v) + " " + fmt_g9(p.x) + " " + fmt_g9(p.y) + " " +
               fmt_g9(p.z) + "\n";
    }
    for (int i = 0; i < snap.n; ++i) {
        for (int j = i + 1; j < snap.n; ++j) {
            if (!snap.has_link(i, j)) continue;
            const LinkAttr& a = snap.link(i, j);
            out += "link " + std::to_string(i) + " " + std::to_string(j) + " dist " +
                   fmt_g9(a.distance_m) + " snr " + fmt_g9(a.snr_db) + " rate " +
                   fmt_g9(a.rate_bps) + "\n";
        }
    }
    for (int i = 0; i < snap.n; ++i)
        for (int j = i + 1; j < snap.n; ++j)
            if (snap.cs_adjacent(i, j) && !snap.has_link(i, j))
                out += "cs " + std::to_string(i) + " " + std::to_string(j) + "\n";
    return out;
}

}  // namespace fmn
