// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "retro/model.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace retro {

struct ArtifactPaths {
    std::filesystem::path commits;
    std::filesystem::path issues;
    std::filesystem::path builds;
};

/// Which adapter the bot is serving; only changes defaults.
enum class AdapterKind { cli, http };

/// Bot configuration file: TeamConfig fields plus service settings. Relative
/// paths resolve against the directory holding the config file.
struct BotConfig {
    TeamConfig team;
    bool allow_command_metrics = true;
    std::filesystem::path journal_path{"retro-journal.jsonl"};
    ArtifactPaths artifact_paths{"artifacts/commits.jsonl", "artifacts/issues.jsonl", "artifacts/builds.jsonl"};
    unsigned max_parallel_commands = 2;
    std::string console_author{"console"};
    std::string reminder_channel{"general"};
    Duration tick_interval{60};
    std::optional<std::string> reminder_webhook;
};

/// Parses a JSON config document. `allow_command_metrics` defaults to on for
/// the CLI adapter and off for HTTP. Durations are `<n>d|h|m|s` strings or
/// integer seconds; iteration_length also accepts integer days.
/// Throws Error(config).
BotConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir, AdapterKind adapter);
BotConfig load_config(const std::filesystem::path& file, AdapterKind adapter);

} // namespace retro
