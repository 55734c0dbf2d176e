#pragma once

#include <cstdint>
#include <random>

namespace fmn {

// mt19937_64 output is pinned by the C++ standard, so a seed reproduces the
// same stream on every platform.  uniform_real_distribution is not pinned;
// mapping the top 53 bits ourselves keeps generated traces portable.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

}  // namespace fmn
