// SPDX-License-Identifier: Apache-2.0
#pragma once

// Measurement evaluation: the builtin artifact metrics and command-line
// metrics run through the platform shell.

#include "retro/artifacts.hpp"
#include "retro/metric_spec.hpp"
#include "retro/model.hpp"

#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace retro {

struct MetricValue {
    double value = 0;
    Timestamp evaluated_at{};
    std::string detail;
};

std::size_t unique_contributors(std::span<const CommitRecord> commits);
std::size_t commit_count(std::span<const CommitRecord> commits);

/// Net branch-token lines over non-test changes. With a patch: added lines
/// holding a branch token minus removed lines holding one. Without: added minus
/// removed (binary changes contribute 0).
std::int64_t complexity_delta(const CommitRecord& commit);

/// Whether a single source line holds a branch token: the words if, else, for,
/// while, case, when, catch, except, or one of `&&`, `||`, `?`.
bool has_branch_token(std::string_view line);

std::size_t untested_complexity_commits(std::span<const CommitRecord> commits);

double velocity(std::span<const IssueRecord> issues, Timestamp from, Timestamp to);
std::size_t defect_count(std::span<const IssueRecord> issues, Timestamp at);
std::size_t stories_completed(std::span<const IssueRecord> issues, Timestamp from, Timestamp to);

/// Remaining story points at the end of each day of the iteration.
std::vector<double> burndown_remaining(std::span<const IssueRecord> issues, const Iteration& iteration);

/// Case-insensitive ECMAScript regex search over commit messages. Throws
/// Error(pattern) on an invalid expression.
std::size_t commits_matching(std::span<const CommitRecord> commits, std::string_view pattern);

/// Runs `command_line` through /bin/sh in `workdir`. The value is the last
/// non-empty stdout line parsed as a decimal number; detail keeps the first
/// KiB of output. Throws Error(exec_timeout | non_zero_exit |
/// output_not_numeric | exec_failed).
MetricValue run_command_metric(const std::string& command_line, const std::filesystem::path& workdir,
                               Duration timeout, Timestamp now);

/// Caps the number of command metrics running at once.
class CommandGate {
public:
    explicit CommandGate(unsigned max_parallel = 2) : limit_(max_parallel == 0 ? 1 : max_parallel) {}
    CommandGate(const CommandGate&) = delete;
    CommandGate& operator=(const CommandGate&) = delete;

    MetricValue run(const std::string& command_line, const std::filesystem::path& workdir, Duration timeout,
                    Timestamp now);

    unsigned limit() const { return limit_; }
    unsigned peak() const;

private:
    unsigned limit_;
    unsigned running_ = 0;
    unsigned peak_ = 0;
    mutable std::mutex mu_;
    std::condition_variable cv_;
};

struct EvalContext {
    const TeamConfig& config;
    bool allow_command_metrics = true;
    CommandGate* gate = nullptr; ///< optional; ungated when null
};

/// Evaluates `spec` over [from, to). Builtins pick their own records from
/// `store` (whole or pre-windowed): commit metrics use the commits inside the
/// window, velocity and stories_completed the issues closed inside it,
/// defect_count the open bugs at `to`, burndown_remaining the remaining points
/// of the iteration containing `to` as known at `to`.
MetricValue eval_metric(const MetricSpec& spec, const ArtifactStore& store, Timestamp from, Timestamp to,
                        const EvalContext& ctx);

} // namespace retro
