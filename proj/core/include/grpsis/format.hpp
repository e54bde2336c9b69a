#pragma once

#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace grpsis {

/// Shortest round-trippable decimal form of a double ("0.5", "1e-06").
inline std::string format_number(double value) {
    char buffer[32];
    auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
    if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
    return std::string(buffer, end);
}

/// Strict decimal parse: the whole token must be consumed.
inline double parse_number(std::string_view token, std::string_view what) {
    std::string text(token);
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size())
        throw std::invalid_argument("malformed number for " + std::string(what) + ": '" + text + "'");
    return value;
}

} // namespace grpsis
