#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fffopt::text {

/// Shortest round-trip decimal form, always carrying a decimal point or exponent ("1.0", "0.25", "1e-05").
std::string format_number(double value);

/// Splits one CSV line on commas. No quoting: none of the formats here need it.
std::vector<std::string_view> split_csv(std::string_view line);

/// Strict parse of a whole field; nullopt on any trailing garbage or non-finite value.
std::optional<double> parse_double(std::string_view field);
std::optional<long long> parse_int(std::string_view field);

/// Strips a trailing '\r' so files written on Windows parse the same.
std::string_view chomp(std::string_view line);

}  // namespace fffopt::text
