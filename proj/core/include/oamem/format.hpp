#pragma once

#include <string>
#include <string_view>

namespace oamem {

/// Shortest decimal text that parses back to exactly `x`.
std::string format_double(double x);

/// Strict parse of a complete decimal string; throws std::invalid_argument.
double parse_double(std::string_view text);

}  // namespace oamem
