// SPDX-License-Identifier: Apache-2.0
#pragma once
// A bot wired to the iteration-sweep commit fixture and a scratch journal.

#include "retro/gateway.hpp"
#include "support.hpp"

namespace retro::testing {

inline BotConfig contributor_config(const TempDir& dir, AdapterKind adapter = AdapterKind::cli)
{
    BotConfig c;
    c.team = team("2019-01-07T00:00:00Z", 14);
    c.team.team_name = "demo";
    c.team.workdir = dir.path();
    c.allow_command_metrics = adapter == AdapterKind::cli;
    c.journal_path = dir / "retro-journal.jsonl";
    c.artifact_paths = {fixture_dir() / "contributors" / "commits.jsonl", dir / "issues.jsonl", dir / "builds.jsonl"};
    return c;
}

inline std::vector<std::string> read_lines(const std::filesystem::path& p)
{
    std::ifstream in(p);
    std::vector<std::string> out;
    for (std::string line; std::getline(in, line);)
        out.push_back(line);
    return out;
}

/// Feeds the scripted console session and returns everything printed.
inline std::string run_console_script(Bot& bot, Timestamp start)
{
    ConsoleSession console(bot, start);
    std::string printed;
    for (const auto& line : read_lines(fixture_dir() / "contributors" / "session.txt"))
        printed += console.process_line(line);
    return printed;
}

} // namespace retro::testing
