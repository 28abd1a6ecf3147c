// SPDX-License-Identifier: Apache-2.0
#pragma once

// Small string helpers shared by the parser and renderers.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace retro::text {

inline bool is_space(char c)
{
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

inline char ascii_lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

std::string to_lower(std::string_view s);
bool iequals(std::string_view a, std::string_view b);
bool istarts_with(std::string_view s, std::string_view prefix);
std::string_view trim(std::string_view s);
std::string_view ltrim(std::string_view s);
std::vector<std::string_view> split_lines(std::string_view s);

/// Double-quoted with `"` and `\` escaped.
std::string quote(std::string_view s);
/// True when a bare VALUE token could not carry `s` unchanged.
bool needs_quoting(std::string_view s);

/// Number of UTF-8 code points in s (continuation bytes are not counted).
std::size_t codepoint_count(std::string_view s);
/// Longest prefix of at most `max_codepoints` code points, cut at a code point boundary.
std::size_t prefix_bytes(std::string_view s, std::size_t max_codepoints);

/// Integers without decimals, otherwise up to 4 decimals with trailing zeros trimmed.
std::string format_number(double v);
/// format_number with an explicit sign (+0 for zero).
std::string format_signed(double v);

} // namespace retro::text
