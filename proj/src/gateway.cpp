// SPDX-License-Identifier: Apache-2.0
#include "retro/gateway.hpp"

#include "retro/error.hpp"
#include "retro/text.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>

namespace retro {

namespace {

constexpr std::array<std::string_view, 8> kRamp{"▁", "▂", "▃", "▄", "▅", "▆", "▇", "█"};

const char* arrow(Direction d)
{
    switch (d) {
    case Direction::up: return "↑";
    case Direction::down: return "↓";
    case Direction::flat: return "→";
    }
    return "→";
}

std::string value_with_unit(double value, const MetricSpec& metric)
{
    auto unit = metric_unit(metric);
    if (unit.empty())
        return text::format_number(value);
    return fmt::format("{} {}", text::format_number(value), unit);
}

struct Dispatcher {
    const InboundMessage& msg;
    SampleStore& store;
    const ArtifactStore& artifacts;
    const BotConfig& config;
    CommandGate* gate;

    EvalContext ctx() const { return EvalContext{config.team, config.allow_command_metrics, gate}; }

    std::string operator()(const TrackCommand& cmd) const
    {
        if (std::holds_alternative<CommandSpec>(cmd.metric) && !config.allow_command_metrics)
            return "Command metrics are disabled on this bot.";
        const auto& item =
            store.register_item(cmd.description, cmd.metric, cmd.cadence, msg.author, msg.at, artifacts, ctx());
        const auto& baseline = store.series(item.id).back();
        if (baseline.ok())
            return fmt::format("Tracking #{} {} — baseline: {}", item.id, text::quote(item.description),
                               value_with_unit(baseline.value(), item.metric));
        return fmt::format("Tracking #{} {} — baseline failed: {}", item.id, text::quote(item.description),
                           baseline.error_text());
    }

    std::string operator()(const StatusCommand& cmd) const
    {
        auto entries = store.retrospective_report(config.team, msg.at);
        if (!cmd.item_id)
            return render_report(entries, store);
        const auto& item = store.item(*cmd.item_id);
        auto it = std::find_if(entries.begin(), entries.end(), [&](const auto& e) { return e.item_id == item.id; });
        if (it != entries.end())
            return render_report({*it}, store);
        // Closed items are not part of the report; show their overall trend.
        ReportEntry entry{item.id, std::nullopt};
        try {
            entry.trend = compute_trend(store.series(item.id));
        } catch (const Error&) {
        }
        return render_report({entry}, store) + " [closed]";
    }

    std::string operator()(const ListCommand&) const { return render_list(store); }

    std::string operator()(const CloseCommand& cmd) const
    {
        const auto& item = store.close(cmd.item_id, msg.at, msg.author);
        return fmt::format("Closed #{} {}", item.id, text::quote(item.description));
    }

    std::string operator()(const ReportCommand&) const
    {
        return render_report(store.retrospective_report(config.team, msg.at), store);
    }

    std::string operator()(const HelpCommand&) const { return render_help(); }
};

std::optional<std::filesystem::file_time_type> stamp_of(const std::filesystem::path& p)
{
    std::error_code ec;
    auto t = std::filesystem::last_write_time(p, ec);
    if (ec)
        return std::nullopt;
    return t;
}

template <typename Parse>
auto read_artifact_file(const std::filesystem::path& path, Parse parse) -> decltype(parse(std::declval<std::istream&>()))
{
    if (path.empty() || !std::filesystem::exists(path))
        return {};
    std::ifstream in(path);
    if (!in)
        throw Error(Errc::io, fmt::format("cannot read '{}'", path.string()));
    try {
        return parse(in);
    } catch (const Error& e) {
        throw Error(e.code(), fmt::format("{}: {}", path.string(), e.what()));
    }
}

} // namespace

std::vector<OutboundMessage> split_message(const std::string& channel, std::string_view body)
{
    std::vector<OutboundMessage> out;
    std::string current;
    std::size_t current_cp = 0;
    auto flush = [&] {
        if (!current.empty())
            out.push_back({channel, std::move(current)});
        current.clear();
        current_cp = 0;
    };
    std::size_t start = 0;
    while (start <= body.size()) {
        auto nl = body.find('\n', start);
        std::string_view line = body.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
        std::size_t line_cp = text::codepoint_count(line);
        std::size_t needed = current.empty() ? line_cp : line_cp + 1;
        if (current_cp + needed > kMaxMessageCodepoints)
            flush();
        while (line_cp > kMaxMessageCodepoints) {
            auto cut = text::prefix_bytes(line, kMaxMessageCodepoints);
            out.push_back({channel, std::string(line.substr(0, cut))});
            line = line.substr(cut);
            line_cp = text::codepoint_count(line);
        }
        if (!current.empty()) {
            current += '\n';
            ++current_cp;
        }
        current += line;
        current_cp += line_cp;
        if (nl == std::string_view::npos)
            break;
        start = nl + 1;
    }
    flush();
    return out;
}

std::string sparkline(std::span<const double> values)
{
    if (values.empty())
        return {};
    auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    double min = *lo, max = *hi;
    std::string out;
    for (double v : values) {
        std::size_t index = 3;
        if (max > min) {
            double scaled = std::round(7.0 * (v - min) / (max - min));
            index = static_cast<std::size_t>(std::clamp(scaled, 0.0, 7.0));
        }
        out += kRamp[index];
    }
    return out;
}

std::string render_report(const std::vector<ReportEntry>& reports, const SampleStore& store)
{
    if (reports.empty())
        return "No open action items.";
    std::string out;
    for (const auto& entry : reports) {
        if (!out.empty())
            out += '\n';
        const auto& item = store.item(entry.item_id);
        if (!entry.trend) {
            out += fmt::format("#{} {}: (no data yet)", item.id, item.description);
            continue;
        }
        const auto& t = *entry.trend;
        std::vector<double> values;
        for (const auto& s : store.series(item.id).samples())
            if (s.ok() && s.taken_at >= t.baseline.taken_at && s.taken_at <= t.latest.taken_at)
                values.push_back(s.value());
        out += fmt::format("#{} {}: {} → {} (Δ{} {}) {}", item.id, item.description,
                           text::format_number(t.baseline.value()), text::format_number(t.latest.value()),
                           text::format_signed(t.delta), arrow(t.direction), sparkline(values));
    }
    return out;
}

std::string render_list(const SampleStore& store)
{
    if (store.items().empty())
        return "No action items.";
    std::string out;
    for (const auto& [id, item] : store.items()) {
        if (!out.empty())
            out += '\n';
        auto n = store.series(id).size();
        out += fmt::format("#{} [{}] {} using {} every {} ({} sample{})", id, item.is_open() ? "open" : "closed",
                           text::quote(item.description), render_metric(item.metric), format_duration(item.cadence),
                           n, n == 1 ? "" : "s");
    }
    return out;
}

std::optional<OutboundMessage> reminder_due(const TeamConfig& config, std::optional<Timestamp> last_reminded,
                                            Timestamp now, std::string_view report_text, const std::string& channel)
{
    if (now < config.iteration_start)
        return std::nullopt;
    auto it = iteration_for(config, now);
    if (now < it.ends_at - config.reminder_lead)
        return std::nullopt;
    if (last_reminded && *last_reminded >= it.starts_at && *last_reminded < it.ends_at)
        return std::nullopt;
    return OutboundMessage{channel, fmt::format("Reminder: the retrospective for iteration {} is due by {}.\n{}",
                                                it.index + 1, format_timestamp(it.ends_at), report_text)};
}

std::vector<OutboundMessage> handle_message(const InboundMessage& msg, SampleStore& store,
                                            const ArtifactStore& artifacts, const BotConfig& config, CommandGate* gate)
{
    auto outcome = parse_command(msg.text);
    if (std::holds_alternative<NotACommand>(outcome))
        return {};

    std::string reply;
    if (auto* err = std::get_if<ParseError>(&outcome)) {
        reply = fmt::format("Sorry, I could not read that command: expected {} at position {}. Try \"!retro help\".",
                            err->expected, err->position);
    } else {
        try {
            reply = std::visit(Dispatcher{msg, store, artifacts, config, gate}, std::get<Command>(outcome).body);
        } catch (const Error& e) {
            reply = e.what();
        }
    }
    return split_message(msg.channel, reply);
}

ArtifactStore load_artifacts(const ArtifactPaths& paths)
{
    auto commits = read_artifact_file(paths.commits, [](std::istream& in) {
        // Accept either normalized JSONL or raw `git log --numstat` output.
        std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        auto first = text::ltrim(content);
        if (!first.empty() && first.front() == '@')
            return parse_git_numstat(content);
        std::istringstream again(content);
        return parse_commit_jsonl(again);
    });
    auto issues = read_artifact_file(paths.issues, [](std::istream& in) { return parse_issue_jsonl(in); });
    auto builds = read_artifact_file(paths.builds, [](std::istream& in) { return parse_build_jsonl(in); });
    return ArtifactStore(std::move(commits), std::move(issues), std::move(builds));
}

Timestamp system_now()
{
    return std::chrono::time_point_cast<Duration>(std::chrono::system_clock::now());
}

// --- Bot ---------------------------------------------------------------------

Bot::Bot(BotConfig config)
    : config_(std::move(config)), store_(SampleStore::load(config_.journal_path)), gate_(config_.max_parallel_commands)
{
    refresh_artifacts_locked();
}

EvalContext Bot::context() const
{
    return EvalContext{config_.team, config_.allow_command_metrics, &gate_};
}

void Bot::refresh_artifacts_locked()
{
    const std::filesystem::path* paths[3] = {&config_.artifact_paths.commits, &config_.artifact_paths.issues,
                                             &config_.artifact_paths.builds};
    bool changed = false;
    for (int i = 0; i < 3; ++i) {
        auto stamp = stamp_of(*paths[i]);
        if (stamp != artifact_stamps_[i]) {
            artifact_stamps_[i] = stamp;
            changed = true;
        }
    }
    if (changed)
        artifacts_ = load_artifacts(config_.artifact_paths);
}

void Bot::persist_locked()
{
    try {
        store_.persist(config_.journal_path);
        journal_ok_ = true;
    } catch (const Error&) {
        journal_ok_ = false;
        throw;
    }
}

std::vector<OutboundMessage> Bot::handle(const InboundMessage& msg)
{
    std::lock_guard lock(mu_);
    refresh_artifacts_locked();
    auto replies = handle_message(msg, store_, artifacts_, config_, &gate_);
    persist_locked();
    return replies;
}

std::vector<Sample> Bot::tick(Timestamp now)
{
    std::lock_guard lock(mu_);
    refresh_artifacts_locked();
    auto samples = store_.tick(artifacts_, context(), now);
    persist_locked();
    return samples;
}

std::optional<OutboundMessage> Bot::reminder(Timestamp now)
{
    std::lock_guard lock(mu_);
    auto text = render_report(store_.retrospective_report(config_.team, now), store_);
    auto msg = reminder_due(config_.team, last_reminded_, now, text, config_.reminder_channel);
    if (msg)
        last_reminded_ = now;
    return msg;
}

std::vector<ReportEntry> Bot::report(Timestamp now)
{
    std::lock_guard lock(mu_);
    return store_.retrospective_report(config_.team, now);
}

std::string Bot::report_text(Timestamp now)
{
    std::lock_guard lock(mu_);
    return render_report(store_.retrospective_report(config_.team, now), store_);
}

std::vector<ActionItem> Bot::actions() const
{
    std::lock_guard lock(mu_);
    std::vector<ActionItem> out;
    for (const auto& [id, item] : store_.items())
        out.push_back(item);
    return out;
}

TimeSeries Bot::series(ItemId id) const
{
    std::lock_guard lock(mu_);
    return store_.series(id);
}

SampleStore Bot::snapshot() const
{
    std::lock_guard lock(mu_);
    return store_;
}

bool Bot::journal_healthy() const
{
    std::lock_guard lock(mu_);
    return journal_ok_;
}

// --- console -----------------------------------------------------------------

Timestamp ConsoleSession::now() const { return now_ ? *now_ : system_now(); }

std::string ConsoleSession::process_line(std::string_view raw)
{
    auto line = text::trim(raw);
    if (line.empty())
        return {};

    auto first_space = line.find_first_of(" \t");
    auto word = line.substr(0, first_space);
    if (word == "tick" || word == "report") {
        auto rest = first_space == std::string_view::npos ? std::string_view{} : text::trim(line.substr(first_space));
        if (!rest.empty()) {
            constexpr std::string_view flag = "--now";
            if (rest.substr(0, flag.size()) != flag)
                return fmt::format("usage: {} [--now <iso8601>]\n", word);
            auto value = text::trim(rest.substr(flag.size()));
            if (!value.empty() && value.front() == '=')
                value = text::trim(value.substr(1));
            auto t = try_parse_timestamp(value);
            if (!t)
                return fmt::format("invalid timestamp '{}'\n", value);
            now_ = *t;
        }
        std::string out;
        if (word == "report")
            return bot_.report_text(now()) + "\n";
        auto samples = bot_.tick(now());
        for (const auto& s : samples) {
            if (s.ok())
                out += fmt::format("#{} sampled {} at {}\n", s.item_id, text::format_number(s.value()),
                                   format_timestamp(s.taken_at));
            else
                out += fmt::format("#{} sample failed at {}: {}\n", s.item_id, format_timestamp(s.taken_at),
                                   s.error_text());
        }
        if (samples.empty())
            out += "Nothing due.\n";
        if (auto reminder = bot_.reminder(now()))
            out += reminder->text + "\n";
        return out;
    }

    InboundMessage msg{"console", bot_.config().console_author, std::string(line), now()};
    std::string out;
    for (const auto& reply : bot_.handle(msg)) {
        out += reply.text;
        out += '\n';
    }
    return out;
}

} // namespace retro
