// SPDX-License-Identifier: Apache-2.0
#include "retro/config.hpp"

#include "retro/error.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <fstream>
#include <sstream>

namespace retro {

using nlohmann::json;

namespace {

Duration duration_value(const json& j, const char* key, bool bare_number_is_days = false)
{
    if (j.is_number_integer()) {
        auto n = j.get<std::int64_t>();
        return bare_number_is_days ? n * kOneDay : Duration{n};
    }
    if (j.is_string()) {
        if (auto d = try_parse_duration(j.get<std::string>()))
            return *d;
    }
    throw Error(Errc::config, fmt::format("'{}' must be a duration such as \"14d\", \"12h\" or \"30m\"", key));
}

std::string string_value(const json& j, const char* key)
{
    if (!j.is_string())
        throw Error(Errc::config, fmt::format("'{}' must be a string", key));
    return j.get<std::string>();
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::filesystem::path& p)
{
    return p.is_absolute() ? p : base / p;
}

} // namespace

BotConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir, AdapterKind adapter)
{
    json root = json::parse(json_text, nullptr, false);
    if (root.is_discarded() || !root.is_object())
        throw Error(Errc::config, "config must be a JSON object");

    BotConfig cfg;
    cfg.allow_command_metrics = adapter == AdapterKind::cli;
    auto& team = cfg.team;
    if (!root.contains("iteration_start"))
        throw Error(Errc::config, "'iteration_start' is required");

    for (const auto& [key, value] : root.items()) {
        if (key == "team_name")
            team.team_name = string_value(value, "team_name");
        else if (key == "iteration_start") {
            auto t = try_parse_timestamp(string_value(value, "iteration_start"));
            if (!t)
                throw Error(Errc::config, "'iteration_start' must be an ISO-8601 timestamp");
            team.iteration_start = *t;
        } else if (key == "iteration_length")
            team.iteration_length = duration_value(value, "iteration_length", true);
        else if (key == "reminder_lead")
            team.reminder_lead = duration_value(value, "reminder_lead");
        else if (key == "default_cadence")
            team.default_cadence = duration_value(value, "default_cadence");
        else if (key == "command_timeout")
            team.command_timeout = duration_value(value, "command_timeout");
        else if (key == "workdir")
            team.workdir = string_value(value, "workdir");
        else if (key == "allow_command_metrics") {
            if (!value.is_boolean())
                throw Error(Errc::config, "'allow_command_metrics' must be a boolean");
            cfg.allow_command_metrics = value.get<bool>();
        } else if (key == "journal_path")
            cfg.journal_path = string_value(value, "journal_path");
        else if (key == "artifact_paths") {
            if (!value.is_object())
                throw Error(Errc::config, "'artifact_paths' must be an object");
            for (const auto& [kind, path] : value.items()) {
                if (kind == "commits")
                    cfg.artifact_paths.commits = string_value(path, "artifact_paths.commits");
                else if (kind == "issues")
                    cfg.artifact_paths.issues = string_value(path, "artifact_paths.issues");
                else if (kind == "builds")
                    cfg.artifact_paths.builds = string_value(path, "artifact_paths.builds");
                else
                    throw Error(Errc::config, fmt::format("unknown artifact kind '{}'", kind));
            }
        } else if (key == "max_parallel_commands") {
            if (!value.is_number_unsigned() || value.get<unsigned>() == 0)
                throw Error(Errc::config, "'max_parallel_commands' must be a positive integer");
            cfg.max_parallel_commands = value.get<unsigned>();
        } else if (key == "console_author")
            cfg.console_author = string_value(value, "console_author");
        else if (key == "reminder_channel")
            cfg.reminder_channel = string_value(value, "reminder_channel");
        else if (key == "tick_interval")
            cfg.tick_interval = duration_value(value, "tick_interval");
        else if (key == "reminder_webhook")
            cfg.reminder_webhook = string_value(value, "reminder_webhook");
        else
            throw Error(Errc::config, fmt::format("unknown config key '{}'", key));
    }

    team.workdir = resolve(base_dir, team.workdir);
    cfg.journal_path = resolve(base_dir, cfg.journal_path);
    cfg.artifact_paths.commits = resolve(base_dir, cfg.artifact_paths.commits);
    cfg.artifact_paths.issues = resolve(base_dir, cfg.artifact_paths.issues);
    cfg.artifact_paths.builds = resolve(base_dir, cfg.artifact_paths.builds);
    team.validate();
    if (cfg.tick_interval < Duration{1})
        throw Error(Errc::config, "'tick_interval' must be positive");
    return cfg;
}

BotConfig load_config(const std::filesystem::path& file, AdapterKind adapter)
{
    std::ifstream in(file);
    if (!in)
        throw Error(Errc::config, fmt::format("cannot read config '{}'", file.string()));
    std::stringstream buf;
    buf << in.rdbuf();
    auto base = file.parent_path();
    return parse_config(buf.str(), base.empty() ? std::filesystem::path(".") : base, adapter);
}

} // namespace retro
