// SPDX-License-Identifier: Apache-2.0
#include "retro/metrics.hpp"

#include "retro/error.hpp"
#include "retro/text.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <regex>
#include <set>

namespace retro {

namespace {

constexpr std::array<std::string_view, 8> kBranchWords{"if", "else", "for", "while", "case", "when", "catch", "except"};
constexpr std::array<std::string_view, 3> kBranchOperators{"&&", "||", "?"};

bool is_word_char(char c)
{
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

bool contains_word(std::string_view line, std::string_view word)
{
    for (auto pos = line.find(word); pos != std::string_view::npos; pos = line.find(word, pos + 1)) {
        bool left_ok = pos == 0 || !is_word_char(line[pos - 1]);
        auto end = pos + word.size();
        bool right_ok = end == line.size() || !is_word_char(line[end]);
        if (left_ok && right_ok)
            return true;
    }
    return false;
}

bool closed_in(const IssueRecord& r, Timestamp from, Timestamp to)
{
    return r.status == IssueStatus::done && r.closed_at && *r.closed_at >= from && *r.closed_at < to;
}

std::string join_values(const std::vector<double>& values)
{
    std::string out;
    for (double v : values) {
        if (!out.empty())
            out += ", ";
        out += text::format_number(v);
    }
    return out;
}

} // namespace

std::size_t unique_contributors(std::span<const CommitRecord> commits)
{
    std::set<std::string> authors;
    for (const auto& c : commits)
        authors.insert(text::to_lower(c.author_email));
    return authors.size();
}

std::size_t commit_count(std::span<const CommitRecord> commits) { return commits.size(); }

bool has_branch_token(std::string_view line)
{
    for (auto op : kBranchOperators)
        if (line.find(op) != std::string_view::npos)
            return true;
    for (auto word : kBranchWords)
        if (contains_word(line, word))
            return true;
    return false;
}

std::int64_t complexity_delta(const CommitRecord& commit)
{
    std::int64_t delta = 0;
    for (const auto& change : commit.changes) {
        if (change.is_test)
            continue;
        if (!change.patch) {
            delta += change.added.value_or(0) - change.removed.value_or(0);
            continue;
        }
        for (auto line : text::split_lines(*change.patch)) {
            if (line.rfind("+++ ", 0) == 0 || line.rfind("--- ", 0) == 0)
                continue;
            if (line.empty() || (line.front() != '+' && line.front() != '-'))
                continue;
            if (has_branch_token(line.substr(1)))
                delta += line.front() == '+' ? 1 : -1;
        }
    }
    return delta;
}

std::size_t untested_complexity_commits(std::span<const CommitRecord> commits)
{
    return static_cast<std::size_t>(std::count_if(commits.begin(), commits.end(), [](const CommitRecord& c) {
        bool touches_tests = std::any_of(c.changes.begin(), c.changes.end(), [](const auto& ch) { return ch.is_test; });
        return !touches_tests && complexity_delta(c) > 0;
    }));
}

double velocity(std::span<const IssueRecord> issues, Timestamp from, Timestamp to)
{
    double points = 0;
    for (const auto& r : issues)
        if (closed_in(r, from, to))
            points += r.story_points.value_or(0);
    return points;
}

std::size_t defect_count(std::span<const IssueRecord> issues, Timestamp at)
{
    return static_cast<std::size_t>(std::count_if(issues.begin(), issues.end(), [&](const IssueRecord& r) {
        return r.kind == IssueKind::bug && r.created_at <= at && (!r.closed_at || *r.closed_at > at);
    }));
}

std::size_t stories_completed(std::span<const IssueRecord> issues, Timestamp from, Timestamp to)
{
    return static_cast<std::size_t>(std::count_if(issues.begin(), issues.end(), [&](const IssueRecord& r) {
        return r.kind == IssueKind::story && closed_in(r, from, to);
    }));
}

std::vector<double> burndown_remaining(std::span<const IssueRecord> issues, const Iteration& iteration)
{
    auto days = (iteration.ends_at - iteration.starts_at) / kOneDay;
    std::vector<double> remaining(static_cast<std::size_t>(days), 0.0);
    for (std::int64_t d = 0; d < days; ++d) {
        Timestamp day_end = iteration.starts_at + (d + 1) * kOneDay;
        double sum = 0;
        for (const auto& r : issues)
            if (r.created_at < day_end && !(r.closed_at && *r.closed_at < day_end))
                sum += r.story_points.value_or(0);
        remaining[static_cast<std::size_t>(d)] = sum;
    }
    return remaining;
}

std::size_t commits_matching(std::span<const CommitRecord> commits, std::string_view pattern)
{
    std::regex re;
    try {
        re = std::regex(pattern.begin(), pattern.end(), std::regex::ECMAScript | std::regex::icase);
    } catch (const std::regex_error& e) {
        throw Error(Errc::pattern, fmt::format("invalid pattern '{}': {}", pattern, e.what()));
    }
    return static_cast<std::size_t>(std::count_if(
        commits.begin(), commits.end(), [&](const CommitRecord& c) { return std::regex_search(c.message, re); }));
}

MetricValue CommandGate::run(const std::string& command_line, const std::filesystem::path& workdir, Duration timeout,
                             Timestamp now)
{
    {
        std::unique_lock lock(mu_);
        cv_.wait(lock, [&] { return running_ < limit_; });
        ++running_;
        peak_ = std::max(peak_, running_);
    }
    struct Release {
        CommandGate& gate;
        ~Release()
        {
            {
                std::lock_guard lock(gate.mu_);
                --gate.running_;
            }
            gate.cv_.notify_one();
        }
    } release{*this};
    return run_command_metric(command_line, workdir, timeout, now);
}

unsigned CommandGate::peak() const
{
    std::lock_guard lock(mu_);
    return peak_;
}

MetricValue eval_metric(const MetricSpec& spec, const ArtifactStore& store, Timestamp from, Timestamp to,
                        const EvalContext& ctx)
{
    if (from > to)
        throw Error(Errc::invalid_window, "metric window start is after its end");

    if (auto* cmd = std::get_if<CommandSpec>(&spec)) {
        if (!ctx.allow_command_metrics)
            throw Error(Errc::command_metrics_disabled, "command metrics are disabled on this bot");
        if (ctx.gate)
            return ctx.gate->run(cmd->command_line, ctx.config.workdir, ctx.config.command_timeout, to);
        return run_command_metric(cmd->command_line, ctx.config.workdir, ctx.config.command_timeout, to);
    }

    const auto& builtin = std::get<BuiltinSpec>(spec);
    if (auto why = metric_violation(spec))
        throw Error(Errc::invalid_argument, *why);

    MetricValue out;
    out.evaluated_at = to;
    auto windowed = [&] { return window(store, from, to); };

    switch (builtin.name) {
    case BuiltinMetric::unique_contributors: {
        auto w = windowed();
        auto n = unique_contributors(w.commits());
        out.value = static_cast<double>(n);
        out.detail = fmt::format("{} distinct author emails across {} commits", n, w.commits().size());
        break;
    }
    case BuiltinMetric::commit_count: {
        auto n = commit_count(windowed().commits());
        out.value = static_cast<double>(n);
        out.detail = fmt::format("{} commits", n);
        break;
    }
    case BuiltinMetric::untested_complexity_commits: {
        auto w = windowed();
        auto n = untested_complexity_commits(w.commits());
        out.value = static_cast<double>(n);
        out.detail = fmt::format("{} of {} commits raise complexity without touching tests", n, w.commits().size());
        break;
    }
    case BuiltinMetric::velocity:
        out.value = velocity(store.issues(), from, to);
        out.detail = fmt::format("{} story points closed", text::format_number(out.value));
        break;
    case BuiltinMetric::defect_count: {
        auto n = defect_count(store.issues(), to);
        out.value = static_cast<double>(n);
        out.detail = fmt::format("{} open bugs", n);
        break;
    }
    case BuiltinMetric::stories_completed: {
        auto n = stories_completed(store.issues(), from, to);
        out.value = static_cast<double>(n);
        out.detail = fmt::format("{} stories done", n);
        break;
    }
    case BuiltinMetric::commits_matching: {
        auto w = windowed();
        const auto& pattern = builtin.params.at(std::string(kParamPattern));
        auto n = commits_matching(w.commits(), pattern);
        out.value = static_cast<double>(n);
        out.detail = fmt::format("approximation: {} of {} commit messages match /{}/", n, w.commits().size(), pattern);
        break;
    }
    case BuiltinMetric::burndown_remaining: {
        auto iteration = iteration_for(ctx.config, to - Duration{1});
        // Only what was known at `to`: later issues and later closures are ignored.
        std::vector<IssueRecord> known;
        for (const auto& r : store.issues()) {
            if (r.created_at >= to)
                continue;
            auto copy = r;
            if (copy.closed_at && *copy.closed_at >= to) {
                copy.closed_at.reset();
                copy.status = IssueStatus::open;
            }
            known.push_back(std::move(copy));
        }
        auto series = burndown_remaining(known, iteration);
        out.value = series.empty() ? 0.0 : series.back();
        out.detail = fmt::format("iteration {} burndown [{}]", iteration.index, join_values(series));
        break;
    }
    }
    return out;
}

} // namespace retro
