#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace clara::detail {

/// Double-quoted literal with \" \\ \n \t escapes.
std::string quote(std::string_view s);

bool is_valid_utf8(std::string_view s);

std::string_view trim(std::string_view s);

std::vector<std::string> split(std::string_view s, char sep);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// Lowercase hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

}  // namespace clara::detail
