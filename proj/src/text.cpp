// SPDX-License-Identifier: Apache-2.0
#include "retro/text.hpp"

#include <fmt/format.h>

#include <cmath>

namespace retro::text {

std::string to_lower(std::string_view s)
{
    std::string out(s);
    for (auto& c : out)
        c = ascii_lower(c);
    return out;
}

bool iequals(std::string_view a, std::string_view b)
{
    if (a.size() != b.size())
        return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (ascii_lower(a[i]) != ascii_lower(b[i]))
            return false;
    return true;
}

bool istarts_with(std::string_view s, std::string_view prefix)
{
    return s.size() >= prefix.size() && iequals(s.substr(0, prefix.size()), prefix);
}

std::string_view ltrim(std::string_view s)
{
    std::size_t i = 0;
    while (i < s.size() && is_space(s[i]))
        ++i;
    return s.substr(i);
}

std::string_view trim(std::string_view s)
{
    s = ltrim(s);
    while (!s.empty() && is_space(s.back()))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_lines(std::string_view s)
{
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= s.size()) {
        auto nl = s.find('\n', start);
        if (nl == std::string_view::npos) {
            if (start < s.size())
                lines.push_back(s.substr(start));
            break;
        }
        lines.push_back(s.substr(start, nl - start));
        start = nl + 1;
    }
    return lines;
}

std::string quote(std::string_view s)
{
    std::string out;
    out.reserve(s.size() + 2);
    out += '"';
    for (char c : s) {
        if (c == '"' || c == '\\')
            out += '\\';
        out += c;
    }
    out += '"';
    return out;
}

bool needs_quoting(std::string_view s)
{
    if (s.empty() || s.front() == '"')
        return true;
    for (char c : s)
        if (is_space(c))
            return true;
    return false;
}

std::size_t codepoint_count(std::string_view s)
{
    std::size_t n = 0;
    for (unsigned char c : s)
        if ((c & 0xC0) != 0x80)
            ++n;
    return n;
}

std::size_t prefix_bytes(std::string_view s, std::size_t max_codepoints)
{
    std::size_t seen = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        auto c = static_cast<unsigned char>(s[i]);
        if ((c & 0xC0) != 0x80) {
            if (seen == max_codepoints)
                return i;
            ++seen;
        }
    }
    return s.size();
}

std::string format_number(double v)
{
    double rounded = std::round(v);
    if (std::fabs(v - rounded) < 1e-9 && std::fabs(rounded) < 1e15)
        return fmt::format("{}", static_cast<long long>(rounded));
    std::string s = fmt::format("{:.4f}", v);
    while (!s.empty() && s.back() == '0')
        s.pop_back();
    if (!s.empty() && s.back() == '.')
        s.pop_back();
    if (s == "-0")
        s = "0";
    return s;
}

std::string format_signed(double v)
{
    std::string s = format_number(v);
    if (s.front() != '-')
        s.insert(s.begin(), '+');
    return s;
}

} // namespace retro::text
