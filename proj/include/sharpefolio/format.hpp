#pragma once

#include <charconv>
#include <cmath>
#include <optional>
#include <string>

namespace sharpefolio {

/// Shortest text that parses back to the identical double; empty for NaN.
inline std::string format_number(double value) {
    if (std::isnan(value)) return {};
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

inline std::string format_number(const std::optional<double>& value) {
    return value ? format_number(*value) : std::string{};
}

} // namespace sharpefolio
