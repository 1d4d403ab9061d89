#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace glmp {

/// Shortest fixed-notation text that parses back to the same double
/// ("0.1", "12", "-0.0001"). Never uses an exponent.
std::string format_decimal(double v);

/// Parses a decimal literal with '.' separator (optional sign and exponent).
/// Rejects empty input, trailing characters and non-finite results.
std::optional<double> parse_decimal(std::string_view s);

}  // namespace glmp
