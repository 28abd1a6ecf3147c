// SPDX-License-Identifier: Apache-2.0
#pragma once
// Randomized artifact generators for the property tests.

#include "retro/artifacts.hpp"
#include "support.hpp"

#include <random>
#include <string>
#include <vector>

namespace retro::testing {

inline Timestamp random_time(std::mt19937_64& rng, Timestamp base, int days)
{
    return base + Duration{static_cast<std::int64_t>(rng() % (static_cast<std::uint64_t>(days) * 86400))};
}

inline std::string random_patch(std::mt19937_64& rng)
{
    static const char* lines[] = {
        "+if (x) {",     "-if (y) {",         "+  return a && b;", "-  x = y ? 1 : 2;", "+  call();",
        "-  call();",    "+} else {",         "+iffy = 3;",        "+for_each(v);",     "+while (k--) {",
        "+case 3:",      "-} catch (e) {",    "+except Foo:",      "+--- comment",      "--- a/file",
        "+++ b/file",    "+when x -> y",      "+ notify();",       "-elsewhere();",     "+a || b",
    };
    std::string out;
    for (auto n = rng() % 6; n > 0; --n) {
        out += lines[rng() % std::size(lines)];
        out += '\n';
    }
    return out;
}

inline std::vector<CommitRecord> random_commits(std::mt19937_64& rng, std::size_t n, Timestamp base, int days)
{
    static const char* paths[] = {"src/a.cpp",   "tests/a_test.cpp", "docs/x.png", "lib/Util.java",
                                  "spec/y.rb",   "src/ParserTest.java", "web/app.test.ts", "src/contest.c"};
    static const char* authors[] = {"ann@x.org", "Ann@X.org", "bob@x.org", "cy@y.net", "dee@y.net", "EVE@z.io"};
    static const char* messages[] = {"Refactor parser", "fix bug", "REFACTOR: tidy", "add feature", "Fix #12",
                                     "merge branch 'main'", "Update docs"};
    std::vector<CommitRecord> out;
    for (std::size_t i = 0; i < n; ++i) {
        CommitRecord c;
        c.hash = "h" + std::to_string(i);
        c.author_email = authors[rng() % std::size(authors)];
        c.authored_at = random_time(rng, base, days);
        c.message = messages[rng() % std::size(messages)];
        for (auto k = rng() % 4; k > 0; --k) {
            bool binary = rng() % 5 == 0;
            std::optional<std::string> patch;
            if (!binary && rng() % 2)
                patch = random_patch(rng);
            auto count = [&]() { return binary ? std::nullopt : std::optional<std::int64_t>(rng() % 30); };
            auto added = count();
            auto removed = count();
            c.changes.push_back(FileChange::make(paths[rng() % std::size(paths)], added, removed, patch));
        }
        out.push_back(std::move(c));
    }
    return out;
}

inline std::vector<IssueRecord> random_issues(std::mt19937_64& rng, std::size_t n, Timestamp base, int days)
{
    std::vector<IssueRecord> out;
    for (std::size_t i = 0; i < n; ++i) {
        IssueRecord r;
        r.id = "I-" + std::to_string(i);
        r.kind = static_cast<IssueKind>(rng() % 3);
        if (rng() % 4)
            r.story_points = static_cast<double>(rng() % 17) / 2.0;
        r.created_at = random_time(rng, base, days);
        if (rng() % 2) {
            r.status = IssueStatus::done;
            r.closed_at = r.created_at + Duration{static_cast<std::int64_t>(rng() % (10 * 86400))};
        }
        out.push_back(r);
    }
    return out;
}

} // namespace retro::testing
