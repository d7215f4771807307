#pragma once

#include <charconv>
#include <string>

namespace emopipe::detail {

/// Shortest decimal form that parses back to exactly the same double.
inline std::string format_double(double value) {
    char buf[40];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    (void)ec;
    return std::string(buf, end);
}

}  // namespace emopipe::detail
