#pragma once

// Shared reference layout: nine nodes at hand-picked positions (ids 0..7 are
// mesh access points, 8 is the gateway; all at z=10).  Two disjoint uplink
// paths exist, [0,1,2,8] and [3,4,5,6,8], plus a tempting relay via node 7
// that is carrier-sense adjacent to both of them.
//
// Usable links (distance m): 0-1 (40), 1-2 (31), 1-7 (41.23), 2-7 (17.46),
// 2-8 (31), 3-4 (40), 4-5 (40), 5-6 (40), 6-8 (43.86), 7-8 (28.84).
// Carrier-sense-only pairs: 5-7 (49.03), 6-7 (48.37).

#include <set>
#include <vector>

#include <fmn/topology.hpp>

namespace figtwo {

inline std::vector<fmn::Vec3> positions() {
    return {
        {102.0, 0.0, 10.0},    // 0
        {62.0, 0.0, 10.0},     // 1
        {31.0, 0.0, 10.0},     // 2
        {14.0, -144.0, 10.0},  // 3
        {14.0, -104.0, 10.0},  // 4
        {14.0, -64.0, 10.0},   // 5
        {-18.0, -40.0, 10.0},  // 6
        {24.0, -16.0, 10.0},   // 7
        {0.0, 0.0, 10.0},      // 8 (gateway)
    };
}

inline fmn::TopologySnapshot snapshot(std::set<int> sources = {0, 3},
                                      std::set<int> forwarding = {4, 5, 6}) {
    return fmn::build_snapshot(positions(), 0.0, fmn::RadioParams{}, fmn::default_rate_table(),
                               8, std::move(sources), std::move(forwarding));
}

}  // namespace figtwo
