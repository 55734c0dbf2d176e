#pragma once

#include <charconv>
#include <string>

namespace fmn {

// Shortest decimal form that re-parses to the identical double.  Used in
// trace files and dumps so serialization round-trips bit-exactly and never
// depends on the process locale.
inline std::string fmt_exact(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

// Nine significant digits; the fixed formatting of all result files.
inline std::string fmt_g9(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 9);
    return std::string(buf, res.ptr);
}

}  // namespace fmn
