#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace mri {

/// Shortest-safe decimal text: 17 significant digits, round-trips exactly.
std::string fmt17(double x);

/// Splits one CSV line on commas (no quoting; our files never need it).
std::vector<std::string> split_csv(std::string_view line);

}  // namespace mri
