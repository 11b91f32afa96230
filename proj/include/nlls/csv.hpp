#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace nlls {

// Shortest decimal text that parses back to exactly `v`. Infinities and NaN
// print as "inf", "-inf" and "nan".
std::string format_double(double v);
// Inverse of format_double; throws std::invalid_argument on junk.
double parse_double(std::string_view s);

std::vector<std::string> split(std::string_view line, char sep);

}  // namespace nlls
