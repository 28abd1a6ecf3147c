// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace retro {

enum class BuiltinMetric {
    unique_contributors,
    commit_count,
    untested_complexity_commits,
    velocity,
    defect_count,
    stories_completed,
    commits_matching,
    burndown_remaining,
};

std::string_view builtin_name(BuiltinMetric m) noexcept;
std::optional<BuiltinMetric> builtin_from_name(std::string_view name) noexcept;
const std::vector<BuiltinMetric>& all_builtins();

struct BuiltinSpec {
    BuiltinMetric name = BuiltinMetric::commit_count;
    std::map<std::string, std::string> params;

    friend bool operator==(const BuiltinSpec&, const BuiltinSpec&) = default;
};

struct CommandSpec {
    std::string command_line;

    friend bool operator==(const CommandSpec&, const CommandSpec&) = default;
};

using MetricSpec = std::variant<BuiltinSpec, CommandSpec>;

// Recognised builtin parameters.
inline constexpr std::string_view kParamPattern = "pattern";
inline constexpr std::string_view kParamWindow = "window";

/// Returns a reason when the spec breaks an invariant: commits_matching needs
/// `pattern`, `window` is `iteration` or `all`, no other keys, command line
/// non-empty.
std::optional<std::string> metric_violation(const MetricSpec& spec);

/// True when the metric measures all history instead of the current iteration.
bool uses_full_history(const MetricSpec& spec);

/// Canonical grammar text, e.g. `builtin:commits_matching pattern=refactor`.
std::string render_metric(const MetricSpec& spec);

/// Unit word used in chat replies ("contributors", "points", ...). Empty for
/// command metrics.
std::string_view metric_unit(const MetricSpec& spec);

} // namespace retro
