#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace advalstm::text {

/// Shortest decimal string that parses back to exactly `value`.
std::string format_double(double value);
/// Fixed-point rendering with `precision` fractional digits.
std::string format_fixed(double value, int precision);

std::optional<double> parse_double(std::string_view text);
std::optional<std::uint64_t> parse_uint(std::string_view text);

std::string_view trim(std::string_view text);
std::vector<std::string_view> split(std::string_view text, char delimiter);

/// Hex SHA-1 of `blob <size>\0<content>`, i.e. the git object id.
std::string git_blob_hash(std::string_view content);

}  // namespace advalstm::text
