#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "errors.hpp"
#include "topology.hpp"

namespace fmn {

enum class MetricKind { I2R, Euclidean, Hop, Etx, Airtime };

// A metric plus everything needed to evaluate it on one snapshot.  The i2r
// normalizers are snapshot- and activity-dependent, so a CostModel is built
// per assignment step, not per experiment.
struct CostModel {
    MetricKind kind = MetricKind::I2R;
    double alpha = 1.0;  // i2r blend: 0 = pure distance, 1 = pure interference
    NormConstants norm;
    double airtime_overhead_s = 60.5e-6;  // channel access + protocol framing
    double airtime_frame_bits = 8192.0;   // reference frame for the airtime probe
};

inline CostModel make_cost_model(MetricKind kind, double alpha, NormConstants norm,
                                 double airtime_overhead_s = 60.5e-6,
                                 double airtime_frame_bits = 8192.0) {
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw ValidationError("cost model: alpha must be in [0, 1]");
    if (!(airtime_overhead_s >= 0.0) || !(airtime_frame_bits > 0.0))
        throw ValidationError("cost model: airtime constants must be positive");
    return CostModel{kind, alpha, norm, airtime_overhead_s, airtime_frame_bits};
}

// Directed cost of the usable link i -> j.  Throws MissingLinkError when the
// link is absent.
inline double link_cost(const TopologySnapshot& snap, const CostModel& m, int i, int j) {
    const LinkAttr& a = snap.link(i, j);
    switch (m.kind) {
        case MetricKind::I2R: {
            // Blend of normalized length and normalized interference at the
            // receiver.  A snapshot with no links (d_max 0) cannot reach
            // here; the 1.0 floor also covers a d_max left default-built.
            const double d_max = m.norm.d_max > 0.0 ? m.norm.d_max : 1.0;
            const double d_norm = a.distance_m / d_max;
            const int gamma = active_neighbor_count(snap, j, i);
            const double g_norm =
                m.norm.gamma_max > 0 ? static_cast<double>(gamma) / m.norm.gamma_max : 0.0;
            return (1.0 - m.alpha) * d_norm + m.alpha * g_norm;
        }
        case MetricKind::Euclidean: {
            const double d_max = m.norm.d_max > 0.0 ? m.norm.d_max : 1.0;
            return a.distance_m / d_max;
        }
        case MetricKind::Hop:
            return 1.0;
        case MetricKind::Etx: {
            // Expected transmissions with symmetric per-direction delivery:
            // 1 / (df * dr), df = dr = 1 - fer.
            const double fer = frame_error_rate(a.snr_db, snap.radio.snr_threshold_db);
            const double p = 1.0 - fer;
            return 1.0 / (p * p);
        }
        case MetricKind::Airtime: {
            if (!(a.rate_bps > 0.0)) return std::numeric_limits<double>::infinity();
            const double fer = frame_error_rate(a.snr_db, snap.radio.snr_threshold_db);
            return (m.airtime_overhead_s + m.airtime_frame_bits / a.rate_bps) / (1.0 - fer);
        }
    }
    return std::numeric_limits<double>::quiet_NaN();  // unreachable
}

// Left-to-right sum of link costs along `path`.  Summation order is part of
// the contract: route costs are compared bitwise in tests, and floating-point
// addition is not associative.
inline double path_cost(const TopologySnapshot& snap, const CostModel& m,
                        const std::vector<int>& path) {
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < path.size(); ++k)
        total += link_cost(snap, m, path[k], path[k + 1]);
    return total;
}

}  // namespace fmn
