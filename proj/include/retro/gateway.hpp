// SPDX-License-Identifier: Apache-2.0
#pragma once

// Chat-facing surface: message dispatch, reply rendering, reminders and the
// Bot service shared by the console and HTTP adapters.

#include "retro/artifacts.hpp"
#include "retro/cmdparse.hpp"
#include "retro/config.hpp"
#include "retro/metrics.hpp"
#include "retro/tracker.hpp"

#include <filesystem>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace retro {

struct InboundMessage {
    std::string channel;
    std::string author;
    std::string text;
    Timestamp at{};
};

struct OutboundMessage {
    std::string channel;
    std::string text;
    friend bool operator==(const OutboundMessage&, const OutboundMessage&) = default;
};

inline constexpr std::size_t kMaxMessageCodepoints = 4000;

/// Splits text into messages of at most kMaxMessageCodepoints code points,
/// preferring line boundaries.
std::vector<OutboundMessage> split_message(const std::string& channel, std::string_view text);

/// One glyph per value from the ramp ▁▂▃▄▅▆▇█.
std::string sparkline(std::span<const double> values);

/// `#<id> <description>: <baseline> → <latest> (Δ<delta> <arrow>) <sparkline>`
/// per entry; `(no data yet)` without a trend.
std::string render_report(const std::vector<ReportEntry>& reports, const SampleStore& store);
std::string render_list(const SampleStore& store);

/// A reminder when `now` lies in [ends_at - lead, ends_at) of its iteration
/// and none was sent during that iteration.
std::optional<OutboundMessage> reminder_due(const TeamConfig& config, std::optional<Timestamp> last_reminded,
                                            Timestamp now, std::string_view report_text,
                                            const std::string& channel);

/// Parses and dispatches one chat message. Command failures become reply text.
std::vector<OutboundMessage> handle_message(const InboundMessage& msg, SampleStore& store,
                                            const ArtifactStore& artifacts, const BotConfig& config,
                                            CommandGate* gate = nullptr);

/// Reads the configured artifact files; a missing file contributes nothing.
ArtifactStore load_artifacts(const ArtifactPaths& paths);

/// The service: owns the sample store, the artifacts and the journal. Every
/// call is serialized by one lock, so state changes are totally ordered.
/// Journal write failures throw Error(io) after the in-memory change; the
/// unwritten events are retried on the next call.
class Bot {
public:
    explicit Bot(BotConfig config);

    const BotConfig& config() const { return config_; }

    std::vector<OutboundMessage> handle(const InboundMessage& msg);
    std::vector<Sample> tick(Timestamp now);
    /// Returns the reminder for `now` if one is due and marks it sent.
    std::optional<OutboundMessage> reminder(Timestamp now);

    std::vector<ReportEntry> report(Timestamp now);
    std::string report_text(Timestamp now);
    std::vector<ActionItem> actions() const;
    TimeSeries series(ItemId id) const;
    SampleStore snapshot() const;

    /// False after a failed journal write until a later write succeeds.
    bool journal_healthy() const;

private:
    void persist_locked();
    void refresh_artifacts_locked();
    EvalContext context() const;

    BotConfig config_;
    mutable std::mutex mu_;
    SampleStore store_;
    ArtifactStore artifacts_;
    std::optional<std::filesystem::file_time_type> artifact_stamps_[3];
    std::optional<Timestamp> last_reminded_;
    bool journal_ok_ = true;
    mutable CommandGate gate_;
};

/// Console adapter: one input line in, the text to print out. Lines starting
/// with `tick` or `report` (optionally `--now <iso8601>`) step the clock;
/// everything else is a chat message on channel `console`.
class ConsoleSession {
public:
    explicit ConsoleSession(Bot& bot, std::optional<Timestamp> now = std::nullopt) : bot_(bot), now_(now) {}

    std::string process_line(std::string_view line);
    Timestamp now() const;

private:
    Bot& bot_;
    std::optional<Timestamp> now_;
};

Timestamp system_now();

} // namespace retro
