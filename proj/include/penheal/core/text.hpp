#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace penheal::text {

std::string to_lower(std::string_view s);
std::string to_upper(std::string_view s);
std::string_view trim(std::string_view s);
bool iequals(std::string_view a, std::string_view b);
bool istarts_with(std::string_view s, std::string_view prefix);
bool icontains(std::string_view haystack, std::string_view needle);
std::vector<std::string_view> split_lines(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
std::vector<std::string> split_ws(std::string_view s);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// Fixed-point rendering, e.g. format_fixed(9.0, 1) == "9.0".
std::string format_fixed(double value, int decimals);

/// Cuts `s` so the result (including `marker`) is at most `limit` bytes.
std::string truncate_with_marker(std::string_view s, std::size_t limit,
                                 std::string_view marker);

/// Lowercase hex SHA-256 digest.
std::string sha256_hex(std::string_view data);

}  // namespace penheal::text
