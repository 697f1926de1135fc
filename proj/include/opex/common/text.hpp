#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace opex::text {

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);
std::vector<std::string> split_lines(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
bool starts_with_ci(std::string_view s, std::string_view prefix);
bool iequals(std::string_view a, std::string_view b);
// Collapses runs of whitespace into one space and trims.
std::string collapse_ws(std::string_view s);

}  // namespace opex::text
