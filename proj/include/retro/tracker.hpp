// SPDX-License-Identifier: Apache-2.0
#pragma once

// Action-item registry, sampling scheduler and the append-only sample store.
// Every mutation is expressed as a journal event; replaying the journal
// reproduces the store.

#include "retro/artifacts.hpp"
#include "retro/metric_spec.hpp"
#include "retro/metrics.hpp"
#include "retro/model.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace retro {

enum class ItemStatus { open, closed };

struct ActionItem {
    ItemId id = 0;
    std::string description;
    MetricSpec metric;
    Duration cadence{kOneDay};
    Timestamp created_at{};
    std::string created_by;
    ItemStatus status = ItemStatus::open;
    std::optional<Timestamp> closed_at;
    std::optional<std::string> closed_by;

    bool is_open() const { return status == ItemStatus::open; }
    friend bool operator==(const ActionItem&, const ActionItem&) = default;
};

/// One line of the retrospective report. `trend` is empty when the item has
/// no successful sample in the reporting window yet.
struct ReportEntry {
    ItemId item_id = 0;
    std::optional<TrendReport> trend;
};

class SampleStore {
public:
    /// Creates the next item and takes its baseline sample at `now`. A failing
    /// baseline is stored as an error-sample.
    const ActionItem& register_item(std::string description, MetricSpec metric, std::optional<Duration> cadence,
                                    std::string created_by, Timestamp now, const ArtifactStore& artifacts,
                                    const EvalContext& ctx);

    /// Throws Error(unknown_item) or Error(already_closed).
    const ActionItem& close(ItemId id, Timestamp now, std::string by);

    /// Samples every open item whose last sample is at least `cadence` old.
    /// Failures become error-samples; returns the appended samples in id order.
    std::vector<Sample> tick(const ArtifactStore& artifacts, const EvalContext& ctx, Timestamp now);

    const ActionItem& item(ItemId id) const;
    const TimeSeries& series(ItemId id) const;
    const std::map<ItemId, ActionItem>& items() const { return items_; }

    /// Trend per open item over samples since the start of the iteration
    /// preceding the one containing `now`.
    std::vector<ReportEntry> retrospective_report(const TeamConfig& config, Timestamp now) const;

    /// Writes journal events not yet persisted. They are dropped from the
    /// pending list only when the stream reports success.
    void persist(std::ostream& sink);
    /// Same, appending to a journal file with fsync. Throws Error(io).
    void persist(const std::filesystem::path& journal);
    bool has_unpersisted() const { return !pending_.empty(); }
    const std::vector<std::string>& unpersisted() const { return pending_; }

    /// Replays a journal. Throws Error(journal_corrupt) with the line number.
    static SampleStore load(std::istream& source);
    /// Missing file loads as an empty store.
    static SampleStore load(const std::filesystem::path& journal);

    /// Observable state only (items and series).
    friend bool operator==(const SampleStore& a, const SampleStore& b)
    {
        return a.items_ == b.items_ && a.series_ == b.series_;
    }

private:
    void record(std::string event_line);
    void apply_registered(ItemId id, std::string description, MetricSpec metric, Duration cadence, Timestamp at,
                          std::string by);
    void apply_closed(ItemId id, Timestamp at, std::string by);
    void apply_sampled(Sample sample);
    Sample take_sample(const ActionItem& item, const ArtifactStore& artifacts, const EvalContext& ctx,
                       Timestamp now) const;

    std::map<ItemId, ActionItem> items_;
    std::map<ItemId, TimeSeries> series_;
    std::vector<std::string> pending_;
};

/// Window measured for `item` at `now`: the current iteration, or all history
/// for `window=all` metrics. Throws Error(before_project_start).
std::pair<Timestamp, Timestamp> sampling_window(const ActionItem& item, const TeamConfig& config, Timestamp now);

} // namespace retro
