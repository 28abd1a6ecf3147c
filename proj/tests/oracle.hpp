// SPDX-License-Identifier: Apache-2.0
#pragma once

// Brute-force reference implementations of the builtin metrics. They share no
// code with src/ beyond the record types: each walks the raw records with the
// plainest possible loop.

#include "retro/artifacts.hpp"

#include <cctype>
#include <regex>
#include <string>
#include <vector>

namespace retro::oracle {

inline std::size_t unique_contributors(const std::vector<CommitRecord>& commits)
{
    std::vector<std::string> seen;
    for (const auto& c : commits) {
        std::string folded;
        for (unsigned char ch : c.author_email)
            folded += static_cast<char>(std::tolower(ch));
        bool found = false;
        for (const auto& s : seen)
            found = found || s == folded;
        if (!found)
            seen.push_back(folded);
    }
    return seen.size();
}

inline bool test_path(const std::string& path)
{
    std::vector<std::string> segments{""};
    for (char ch : path) {
        if (ch == '/')
            segments.emplace_back();
        else
            segments.back() += ch;
    }
    for (const auto& s : segments)
        if (s == "test" || s == "tests" || s == "spec")
            return true;
    const std::string& name = segments.back();
    if (name.find("_test.") != std::string::npos || name.find(".test.") != std::string::npos)
        return true;
    std::string stem = name;
    auto dot = name.find_last_of('.');
    if (dot != std::string::npos && dot > 0)
        stem = name.substr(0, dot);
    return stem.size() >= 4 && stem.compare(stem.size() - 4, 4, "Test") == 0;
}

// Token check by scanning every identifier run.
inline bool branchy(const std::string& line)
{
    if (line.find("&&") != std::string::npos || line.find("||") != std::string::npos ||
        line.find('?') != std::string::npos)
        return true;
    static const std::regex ident("[A-Za-z0-9_]+");
    for (auto it = std::sregex_iterator(line.begin(), line.end(), ident); it != std::sregex_iterator(); ++it) {
        auto w = it->str();
        if (w == "if" || w == "else" || w == "for" || w == "while" || w == "case" || w == "when" || w == "catch" ||
            w == "except")
            return true;
    }
    return false;
}

inline long long complexity(const CommitRecord& c)
{
    long long total = 0;
    for (const auto& ch : c.changes) {
        if (test_path(ch.path))
            continue;
        if (ch.patch) {
            std::string line;
            auto flush = [&] {
                bool header = line.rfind("+++ ", 0) == 0 || line.rfind("--- ", 0) == 0;
                if (!header && !line.empty() && line[0] == '+' && branchy(line.substr(1)))
                    ++total;
                if (!header && !line.empty() && line[0] == '-' && branchy(line.substr(1)))
                    --total;
                line.clear();
            };
            for (char x : *ch.patch) {
                if (x == '\n')
                    flush();
                else
                    line += x;
            }
            flush();
        } else {
            total += (ch.added ? *ch.added : 0) - (ch.removed ? *ch.removed : 0);
        }
    }
    return total;
}

inline std::size_t untested_complexity(const std::vector<CommitRecord>& commits)
{
    std::size_t n = 0;
    for (const auto& c : commits) {
        bool tests = false;
        for (const auto& ch : c.changes)
            tests = tests || test_path(ch.path);
        if (!tests && complexity(c) > 0)
            ++n;
    }
    return n;
}

inline bool closed_within(const IssueRecord& r, Timestamp from, Timestamp to)
{
    return r.status == IssueStatus::done && r.closed_at && from <= *r.closed_at && *r.closed_at < to;
}

inline double velocity(const std::vector<IssueRecord>& issues, Timestamp from, Timestamp to)
{
    double sum = 0;
    for (const auto& r : issues)
        if (closed_within(r, from, to) && r.story_points)
            sum += *r.story_points;
    return sum;
}

inline std::size_t stories(const std::vector<IssueRecord>& issues, Timestamp from, Timestamp to)
{
    std::size_t n = 0;
    for (const auto& r : issues)
        if (r.kind == IssueKind::story && closed_within(r, from, to))
            ++n;
    return n;
}

inline std::size_t defects(const std::vector<IssueRecord>& issues, Timestamp when)
{
    std::size_t n = 0;
    for (const auto& r : issues) {
        if (r.kind != IssueKind::bug || r.created_at > when)
            continue;
        if (r.closed_at && *r.closed_at <= when)
            continue;
        ++n;
    }
    return n;
}

// Recomputes the remaining total from scratch at every day boundary.
inline std::vector<double> burndown(const std::vector<IssueRecord>& issues, Timestamp start, int days)
{
    std::vector<double> out;
    for (int d = 1; d <= days; ++d) {
        Timestamp day_end = start + std::chrono::hours(24 * d);
        double remaining = 0;
        for (const auto& r : issues) {
            bool created = r.created_at < day_end;
            bool closed = r.closed_at.has_value() && *r.closed_at < day_end;
            if (created && !closed)
                remaining += r.story_points.value_or(0);
        }
        out.push_back(remaining);
    }
    return out;
}

inline std::size_t matching(const std::vector<CommitRecord>& commits, const std::string& pattern)
{
    std::regex re(pattern, std::regex::icase);
    std::size_t n = 0;
    for (const auto& c : commits)
        if (std::regex_search(c.message, re))
            ++n;
    return n;
}

inline std::size_t commits_in(const std::vector<CommitRecord>& commits, Timestamp from, Timestamp to)
{
    std::size_t n = 0;
    for (const auto& c : commits)
        if (from <= c.authored_at && c.authored_at < to)
            ++n;
    return n;
}

} // namespace retro::oracle
