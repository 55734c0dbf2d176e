#pragma once

#include <charconv>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "geom.hpp"
#include "rng.hpp"
#include "textio.hpp"

namespace fmn {

struct Waypoint {
    double t = 0.0;
    Vec3 pos;
};

// One line per node, waypoints as "t x y z" groups.  Times are strictly
// increasing per node; positions are linearly interpolated between waypoints.
struct MobilityTrace {
    std::vector<std::vector<Waypoint>> nodes;
    double duration_s = 0.0;

    int node_count() const { return static_cast<int>(nodes.size()); }
};

struct RwmParams {
    Vec3 box{80.0, 80.0, 25.0};  // extents; positions drawn in [0, box]
    int node_count = 21;
    double duration_s = 160.0;
    double speed_min_mps = 0.5;
    double speed_max_mps = 3.0;
    double pause_s = 0.0;
    std::uint64_t seed = 1;
};

inline void validate(const RwmParams& p) {
    if (p.node_count < 1) throw ValidationError("rwm: node_count must be at least 1");
    if (!(p.duration_s > 0.0)) throw ValidationError("rwm: duration_s must be positive");
    if (!(p.speed_min_mps > 0.0) || !(p.speed_max_mps >= p.speed_min_mps))
        throw ValidationError("rwm: speeds must satisfy 0 < speed_min <= speed_max");
    if (!(p.pause_s >= 0.0)) throw ValidationError("rwm: pause_s must be non-negative");
    if (!(p.box.x >= 0.0) || !(p.box.y >= 0.0) || !(p.box.z >= 0.0))
        throw ValidationError("rwm: box extents must be non-negative");
    if (p.box.x == 0.0 && p.box.y == 0.0 && p.box.z == 0.0)
        throw ValidationError("rwm: box must have at least one positive extent");
}

namespace detail {

inline double parse_double_token(std::string_view tok, int line, int col) {
    double v = 0.0;
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last)
        throw ParseError("malformed number '" + std::string(tok) + "'", line, col);
    return v;
}

}  // namespace detail

// Parses the one-line-per-node waypoint format.  Blank lines are ignored;
// duration is the largest waypoint time in the trace.
inline MobilityTrace parse_trace(std::string_view text) {
    MobilityTrace tr;
    int line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t nl = text.find('\n', start);
        std::string_view line = text.substr(
            start, nl == std::string_view::npos ? text.size() - start : nl - start);
        ++line_no;

        // Tokenize, keeping 1-based start columns for error reporting.
        std::vector<std::pair<std::string_view, int>> toks;
        std::size_t i = 0;
        while (i < line.size()) {
            if (line[i] == ' ' || line[i] == '\t' || line[i] == '\r') {
                ++i;
                continue;
            }
            std::size_t j = i;
            while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
            toks.emplace_back(line.substr(i, j - i), static_cast<int>(i) + 1);
            i = j;
        }

        if (!toks.empty()) {
            std::vector<Waypoint> wps;
            for (std::size_t g = 0; g < toks.size(); g += 4) {
                if (g + 4 > toks.size())
                    throw ParseError("incomplete waypoint group (need t x y z)", line_no,
                                     toks[g].second);
                Waypoint w;
                w.t = detail::parse_double_token(toks[g].first, line_no, toks[g].second);
                w.pos.x = detail::parse_double_token(toks[g + 1].first, line_no, toks[g + 1].second);
                w.pos.y = detail::parse_double_token(toks[g + 2].first, line_no, toks[g + 2].second);
                w.pos.z = detail::parse_double_token(toks[g + 3].first, line_no, toks[g + 3].second);
                wps.push_back(w);
            }
            int node = static_cast<int>(tr.nodes.size());
            for (std::size_t k = 0; k < wps.size(); ++k) {
                if (!std::isfinite(wps[k].t) || wps[k].t < 0.0)
                    throw ValidationError("node " + std::to_string(node) +
                                          ": waypoint times must be finite and non-negative");
                if (k > 0 && !(wps[k].t > wps[k - 1].t))
                    throw ValidationError("node " + std::to_string(node) +
                                          ": waypoint times must be strictly increasing");
            }
            tr.nodes.push_back(std::move(wps));
        }

        if (nl == std::string_view::npos) break;
        start = nl + 1;
    }
    if (tr.nodes.empty()) throw ValidationError("trace: no nodes");
    for (const auto& wps : tr.nodes)
        for (const Waypoint& w : wps) tr.duration_s = std::max(tr.duration_s, w.t);
    return tr;
}

// Inverse of parse_trace; numbers keep their exact values across a round trip.
inline std::string serialize_trace(const MobilityTrace& tr) {
    std::string out;
    for (const auto& wps : tr.nodes) {
        for (std::size_t k = 0; k < wps.size(); ++k) {
            if (k > 0) out += ' ';
            out += fmt_exact(wps[k].t);
            out += ' ';
            out += fmt_exact(wps[k].pos.x);
            out += ' ';
            out += fmt_exact(wps[k].pos.y);
            out += ' ';
            out += fmt_exact(wps[k].pos.z);
        }
        out += '\n';
    }
    return out;
}

// Random-waypoint mobility.  One generator seeds the whole trace; nodes
// consume draws sequentially (node 0 first), so a trace is a pure function of
// the parameters.  Per node: initial x,y,z, then per leg dest x,y,z and a
// speed.  A zero-length leg consumes its draws and is redrawn.  The last leg
// is cut at the horizon with the final waypoint pinned at exactly t=duration.
inline MobilityTrace generate_rwm(const RwmParams& p) {
    validate(p);
    std::mt19937_64 rng(p.seed);
    MobilityTrace tr;
    tr.duration_s = p.duration_s;
    tr.nodes.resize(static_cast<std::size_t>(p.node_count));
    for (auto& wps : tr.nodes) {
        Vec3 pos{uniform(rng, 0.0, p.box.x), uniform(rng, 0.0, p.box.y),
                 uniform(rng, 0.0, p.box.z)};
        double t = 0.0;
        wps.push_back({t, pos});
        while (t < p.duration_s) {
            Vec3 dest{uniform(rng, 0.0, p.box.x), uniform(rng, 0.0, p.box.y),
                      uniform(rng, 0.0, p.box.z)};
            double speed = uniform(rng, p.speed_min_mps, p.speed_max_mps);
            double d = distance(pos, dest);
            if (d == 0.0) continue;
            double travel = d / speed;
            if (t + travel >= p.duration_s) {
                double frac = (p.duration_s - t) / travel;
                wps.push_back({p.duration_s, pos + (dest - pos) * frac});
                t = p.duration_s;
                break;
            }
            t += travel;
            pos = dest;
            wps.push_back({t, pos});
            if (p.pause_s > 0.0) {
                if (t + p.pause_s >= p.duration_s) {
                    wps.push_back({p.duration_s, pos});
                    t = p.duration_s;
                    break;
                }
                t += p.pause_s;
                wps.push_back({t, pos});
            }
        }
    }
    return tr;
}

// Out-of-range sampling policy: Hold clamps to the nearest endpoint position,
// Strict refuses times outside [0, duration].
enum class SampleEdge { Hold, Strict };

inline Vec3 sample_position(const MobilityTrace& tr, int node, double t,
                            SampleEdge edge = SampleEdge::Hold) {
    if (node < 0 || node >= tr.node_count())
        throw std::out_of_range("sample_position: node " + std::to_string(node) +
                                " out of range");
    if (t < 0.0 || t > tr.duration_s) {
        if (edge == SampleEdge::Strict)
            throw std::out_of_range("sample_position: t=" + fmt_exact(t) +
                                    " outside [0, " + fmt_exact(tr.duration_s) + "]");
        t = std::min(std::max(t, 0.0), tr.duration_s);
    }
    const std::vector<Waypoint>& wps = tr.nodes[static_cast<std::size_t>(node)];
    if (wps.empty())
        throw ValidationError("sample_position: node " + std::to_string(node) +
                              " has no waypoints");
    if (t <= wps.front().t) return wps.front().pos;
    if (t >= wps.back().t) return wps.back().pos;
    // Invariant: wps[lo].t <= t < wps[hi].t with hi = lo + 1.
    std::size_t lo = 0, hi = wps.size() - 1;
    while (hi - lo > 1) {
        std::size_t mid = lo + (hi - lo) / 2;
        if (wps[mid].t <= t)
            lo = mid;
        else
            hi = mid;
    }
    if (t == wps[lo].t) return wps[lo].pos;
    double frac = (t - wps[lo].t) / (wps[hi].t - wps[lo].t);
    return wps[lo].pos + (wps[hi].pos - wps[lo].pos) * frac;
}

inline std::vector<Vec3> sample_positions(const MobilityTrace& tr, double t,
                                          SampleEdge edge = SampleEdge::Hold) {
    std::vector<Vec3> out;
    out.reserve(tr.nodes.size());
    for (int k = 0; k < tr.node_count(); ++k) out.push_back(sample_position(tr, k, t, edge));
    return out;
}

}  // namespace fmn
