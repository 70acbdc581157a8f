// format.hpp -- locale-independent number formatting for CSV and JSON output.
#pragma once

#include <charconv>
#include <string>
#include <system_error>

namespace more {

/// Shortest decimal string that round-trips to the same double. Infinities
/// and NaN come out as "inf" / "-inf" / "nan".
inline std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) return "nan";
    return std::string(buf, ptr);
}

}  // namespace more
