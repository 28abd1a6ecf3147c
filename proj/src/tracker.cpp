// SPDX-License-Identifier: Apache-2.0
#include "retro/tracker.hpp"

#include "json_codec.hpp"
#include "retro/error.hpp"
#include "retro/text.hpp"

#include <fmt/format.h>

#include <cerrno>
#include <cmath>
#include <cstring>
#include <fstream>
#include <future>
#include <istream>
#include <ostream>
#include <set>

#include <fcntl.h>
#include <unistd.h>

namespace retro {

using codec::json;

namespace {

// Journal event field sets, excluding "ev".
const std::set<std::string> kRegisteredFields{"at", "id", "description", "metric", "cadence_seconds", "by"};
const std::set<std::string> kClosedFields{"at", "id", "by"};
const std::set<std::string> kSampledValueFields{"at", "id", "value"};
const std::set<std::string> kSampledErrorFields{"at", "id", "error"};

std::string describe_error(const std::exception& e)
{
    if (auto* err = dynamic_cast<const Error*>(&e))
        return fmt::format("{}: {}", errc_name(err->code()), err->what());
    return e.what();
}

struct Corrupt {
    std::string reason;
};

std::set<std::string> keys_of(const json& obj)
{
    std::set<std::string> keys;
    for (const auto& [k, v] : obj.items())
        if (k != "ev")
            keys.insert(k);
    return keys;
}

Timestamp event_time(const json& ev)
{
    if (!ev["at"].is_string())
        throw Corrupt{"'at' must be a string"};
    auto t = try_parse_timestamp(ev["at"].get<std::string>());
    if (!t)
        throw Corrupt{"'at' is not an ISO-8601 timestamp"};
    return *t;
}

ItemId event_id(const json& ev)
{
    if (!ev["id"].is_number_integer() || ev["id"].get<ItemId>() < 1)
        throw Corrupt{"'id' must be a positive integer"};
    return ev["id"].get<ItemId>();
}

std::string event_string(const json& ev, const char* key)
{
    if (!ev[key].is_string())
        throw Corrupt{fmt::format("'{}' must be a string", key)};
    return ev[key].get<std::string>();
}

} // namespace

std::pair<Timestamp, Timestamp> sampling_window(const ActionItem& item, const TeamConfig& config, Timestamp now)
{
    if (uses_full_history(item.metric))
        return {Timestamp::min(), now};
    return {iteration_for(config, now).starts_at, now};
}

void SampleStore::record(std::string event_line) { pending_.push_back(std::move(event_line)); }

void SampleStore::apply_registered(ItemId id, std::string description, MetricSpec metric, Duration cadence,
                                   Timestamp at, std::string by)
{
    ActionItem item;
    item.id = id;
    item.description = std::move(description);
    item.metric = std::move(metric);
    item.cadence = cadence;
    item.created_at = at;
    item.created_by = std::move(by);
    items_.emplace(id, std::move(item));
    series_.emplace(id, TimeSeries(id));
}

void SampleStore::apply_closed(ItemId id, Timestamp at, std::string by)
{
    auto& item = items_.at(id);
    item.status = ItemStatus::closed;
    item.closed_at = at;
    item.closed_by = std::move(by);
}

void SampleStore::apply_sampled(Sample sample) { series_.at(sample.item_id).append(std::move(sample)); }

Sample SampleStore::take_sample(const ActionItem& item, const ArtifactStore& artifacts, const EvalContext& ctx,
                                Timestamp now) const
{
    Sample sample{item.id, now, std::string{}};
    try {
        auto [from, to] = sampling_window(item, ctx.config, now);
        sample.outcome = eval_metric(item.metric, artifacts, from, to, ctx).value;
    } catch (const std::exception& e) {
        sample.outcome = describe_error(e);
    }
    return sample;
}

const ActionItem& SampleStore::register_item(std::string description, MetricSpec metric,
                                             std::optional<Duration> cadence, std::string created_by, Timestamp now,
                                             const ArtifactStore& artifacts, const EvalContext& ctx)
{
    if (description.empty())
        throw Error(Errc::invalid_argument, "action item description must not be empty");
    if (auto why = metric_violation(metric))
        throw Error(Errc::invalid_argument, *why);
    Duration effective = cadence.value_or(ctx.config.default_cadence);
    if (effective < kOneMinute)
        throw Error(Errc::invalid_argument, "cadence must be at least 1 minute");

    ItemId id = static_cast<ItemId>(items_.size()) + 1;
    json ev{{"ev", "registered"},
            {"at", format_timestamp(now)},
            {"id", id},
            {"description", description},
            {"metric", codec::to_json(metric)},
            {"cadence_seconds", effective.count()},
            {"by", created_by}};
    apply_registered(id, std::move(description), std::move(metric), effective, now, std::move(created_by));
    record(ev.dump());

    const auto& item = items_.at(id);
    Sample baseline = take_sample(item, artifacts, ctx, now);
    json sev{{"ev", "sampled"}, {"at", format_timestamp(now)}, {"id", id}};
    if (baseline.ok())
        sev["value"] = baseline.value();
    else
        sev["error"] = baseline.error_text();
    apply_sampled(std::move(baseline));
    record(sev.dump());
    return item;
}

const ActionItem& SampleStore::close(ItemId id, Timestamp now, std::string by)
{
    auto it = items_.find(id);
    if (it == items_.end())
        throw Error(Errc::unknown_item, fmt::format("No action item #{}", id));
    if (!it->second.is_open())
        throw Error(Errc::already_closed, fmt::format("Action item #{} is already closed", id));
    json ev{{"ev", "closed"}, {"at", format_timestamp(now)}, {"id", id}, {"by", by}};
    apply_closed(id, now, std::move(by));
    record(ev.dump());
    return it->second;
}

std::vector<Sample> SampleStore::tick(const ArtifactStore& artifacts, const EvalContext& ctx, Timestamp now)
{
    std::vector<const ActionItem*> due;
    for (const auto& [id, item] : items_) {
        if (!item.is_open())
            continue;
        const auto& s = series_.at(id);
        if (s.empty() || now - s.back().taken_at >= item.cadence)
            due.push_back(&item);
    }

    // Command metrics run concurrently (bounded by the gate); builtins inline.
    std::vector<std::future<Sample>> pending;
    std::vector<Sample> taken(due.size());
    for (std::size_t i = 0; i < due.size(); ++i) {
        if (std::holds_alternative<CommandSpec>(due[i]->metric) && ctx.allow_command_metrics)
            pending.push_back(std::async(std::launch::async, [&, item = due[i]] {
                return take_sample(*item, artifacts, ctx, now);
            }));
        else
            taken[i] = take_sample(*due[i], artifacts, ctx, now);
    }
    for (std::size_t i = 0, next = 0; i < due.size(); ++i)
        if (std::holds_alternative<CommandSpec>(due[i]->metric) && ctx.allow_command_metrics)
            taken[i] = pending[next++].get();

    for (auto& sample : taken) {
        json ev{{"ev", "sampled"}, {"at", format_timestamp(now)}, {"id", sample.item_id}};
        if (sample.ok())
            ev["value"] = sample.value();
        else
            ev["error"] = sample.error_text();
        apply_sampled(sample);
        record(ev.dump());
    }
    return taken;
}

const ActionItem& SampleStore::item(ItemId id) const
{
    auto it = items_.find(id);
    if (it == items_.end())
        throw Error(Errc::unknown_item, fmt::format("No action item #{}", id));
    return it->second;
}

const TimeSeries& SampleStore::series(ItemId id) const
{
    auto it = series_.find(id);
    if (it == series_.end())
        throw Error(Errc::unknown_item, fmt::format("No action item #{}", id));
    return it->second;
}

std::vector<ReportEntry> SampleStore::retrospective_report(const TeamConfig& config, Timestamp now) const
{
    std::optional<Timestamp> window_start;
    if (now >= config.iteration_start) {
        auto current = iteration_for(config, now);
        window_start = iteration_at(config, current.index > 0 ? current.index - 1 : 0).starts_at;
    }
    std::vector<ReportEntry> out;
    for (const auto& [id, item] : items_) {
        if (!item.is_open())
            continue;
        ReportEntry entry{id, std::nullopt};
        try {
            entry.trend = compute_trend(series_.at(id), window_start);
        } catch (const Error& e) {
            if (e.code() != Errc::empty_series)
                throw;
        }
        out.push_back(std::move(entry));
    }
    return out;
}

void SampleStore::persist(std::ostream& sink)
{
    for (const auto& line : pending_)
        sink << line << '\n';
    sink.flush();
    if (!sink)
        throw Error(Errc::io, "failed to write journal events");
    pending_.clear();
}

void SampleStore::persist(const std::filesystem::path& journal)
{
    if (pending_.empty())
        return;
    std::string data;
    for (const auto& line : pending_) {
        data += line;
        data += '\n';
    }
    int fd = ::open(journal.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
    if (fd < 0)
        throw Error(Errc::io, fmt::format("cannot open journal '{}': {}", journal.string(), std::strerror(errno)));
    std::size_t written = 0;
    while (written < data.size()) {
        ssize_t n = ::write(fd, data.data() + written, data.size() - written);
        if (n < 0 && errno == EINTR)
            continue;
        if (n <= 0) {
            int saved = errno;
            ::close(fd);
            throw Error(Errc::io, fmt::format("cannot append to journal '{}': {}", journal.string(), std::strerror(saved)));
        }
        written += static_cast<std::size_t>(n);
    }
    if (::fsync(fd) != 0) {
        int saved = errno;
        ::close(fd);
        throw Error(Errc::io, fmt::format("cannot sync journal '{}': {}", journal.string(), std::strerror(saved)));
    }
    ::close(fd);
    pending_.clear();
}

SampleStore SampleStore::load(std::istream& source)
{
    SampleStore store;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(source, line)) {
        ++line_number;
        if (text::trim(line).empty())
            continue;
        try {
            json ev = json::parse(line, nullptr, false);
            if (ev.is_discarded() || !ev.is_object())
                throw Corrupt{"not a JSON object"};
            if (!ev.contains("ev") || !ev["ev"].is_string())
                throw Corrupt{"missing event kind"};
            auto kind = ev["ev"].get<std::string>();
            auto keys = keys_of(ev);

            if (kind == "registered") {
                if (keys != kRegisteredFields)
                    throw Corrupt{"unexpected field set for 'registered'"};
                ItemId id = event_id(ev);
                if (id != static_cast<ItemId>(store.items_.size()) + 1)
                    throw Corrupt{fmt::format("item id {} out of sequence", id)};
                MetricSpec metric;
                try {
                    metric = codec::metric_from_json(ev["metric"]);
                } catch (const std::invalid_argument& e) {
                    throw Corrupt{std::string("bad metric: ") + e.what()};
                }
                if (!ev["cadence_seconds"].is_number_integer() || ev["cadence_seconds"].get<std::int64_t>() < 60)
                    throw Corrupt{"cadence_seconds must be an integer of at least 60"};
                auto description = event_string(ev, "description");
                if (description.empty())
                    throw Corrupt{"empty description"};
                store.apply_registered(id, std::move(description), std::move(metric),
                                       Duration{ev["cadence_seconds"].get<std::int64_t>()}, event_time(ev),
                                       event_string(ev, "by"));
            } else if (kind == "closed") {
                if (keys != kClosedFields)
                    throw Corrupt{"unexpected field set for 'closed'"};
                ItemId id = event_id(ev);
                auto it = store.items_.find(id);
                if (it == store.items_.end())
                    throw Corrupt{fmt::format("close of unknown item #{}", id)};
                if (!it->second.is_open())
                    throw Corrupt{fmt::format("item #{} closed twice", id)};
                store.apply_closed(id, event_time(ev), event_string(ev, "by"));
            } else if (kind == "sampled") {
                bool has_value = keys == kSampledValueFields;
                if (!has_value && keys != kSampledErrorFields)
                    throw Corrupt{"unexpected field set for 'sampled'"};
                ItemId id = event_id(ev);
                auto it = store.items_.find(id);
                if (it == store.items_.end())
                    throw Corrupt{fmt::format("sample for unknown item #{}", id)};
                if (!it->second.is_open())
                    throw Corrupt{fmt::format("sample for closed item #{}", id)};
                Sample sample{id, event_time(ev), std::string{}};
                if (has_value) {
                    if (!ev["value"].is_number() || !std::isfinite(ev["value"].get<double>()))
                        throw Corrupt{"'value' must be a finite number"};
                    sample.outcome = ev["value"].get<double>();
                } else {
                    sample.outcome = event_string(ev, "error");
                }
                const auto& series = store.series_.at(id);
                if (!series.empty() && sample.taken_at <= series.back().taken_at)
                    throw Corrupt{"sample timestamps must strictly increase"};
                store.apply_sampled(std::move(sample));
            } else {
                throw Corrupt{fmt::format("unknown event kind '{}'", kind)};
            }
        } catch (const Corrupt& c) {
            throw Error::at_line(Errc::journal_corrupt, line_number, c.reason);
        } catch (const json::exception& e) {
            throw Error::at_line(Errc::journal_corrupt, line_number, e.what());
        }
    }
    return store;
}

SampleStore SampleStore::load(const std::filesystem::path& journal)
{
    std::ifstream in(journal);
    if (!in) {
        if (!std::filesystem::exists(journal))
            return {};
        throw Error(Errc::io, fmt::format("cannot read journal '{}'", journal.string()));
    }
    return load(in);
}

} // namespace retro
