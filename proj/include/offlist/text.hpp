#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace offlist {

// Splits on '\n' and strips a trailing '\r' from every line. A trailing
// newline does not produce an empty final line.
std::vector<std::string_view> split_lines(std::string_view text);

std::string to_lower_ascii(std::string_view s);
std::string_view trim(std::string_view s);

// Case-insensitive shell glob (`*`, `?`, `[...]`).
bool glob_match(std::string_view pattern, std::string_view text);
bool glob_match_any(std::span<const std::string> patterns, std::string_view text);

// Replaces every invalid UTF-8 sequence by U+FFFD.
std::string sanitize_utf8(std::string_view bytes);
std::string latin1_to_utf8(std::string_view bytes);

std::string sha256_hex(std::string_view data);

// FNV-1a; stable across runs and platforms.
std::uint64_t fnv1a64(std::string_view data);

}  // namespace offlist
