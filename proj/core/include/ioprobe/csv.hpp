#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ioprobe {

/// Shortest decimal string that parses back to exactly `x`; platform
/// independent. Non-finite values print as nan / inf / -inf.
std::string format_double(double x);
std::string format_optional(const std::optional<double>& x);

/// Splits on commas, trimming surrounding blanks; no quoting support.
std::vector<std::string> split_csv_line(std::string_view line);

/// Strict full-string parse; nullopt on trailing garbage.
std::optional<double> parse_double(std::string_view text);

}  // namespace ioprobe
