// SPDX-License-Identifier: Apache-2.0
#pragma once

// Domain types shared by every module: timestamps, iterations, samples and
// trend reports.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace retro {

using Timestamp = std::chrono::sys_seconds;
using Duration = std::chrono::seconds;
using ItemId = std::int64_t;

inline constexpr Duration kOneDay{86400};
inline constexpr Duration kOneHour{3600};
inline constexpr Duration kOneMinute{60};

/// Accepts `YYYY-MM-DDTHH:MM[:SS[.frac]][Z|+HH:MM|-HH:MM|+HHMM]`; a missing
/// zone designator means UTC. Fractional seconds are truncated.
std::optional<Timestamp> try_parse_timestamp(std::string_view text);
Timestamp parse_timestamp(std::string_view text);
/// Always `YYYY-MM-DDTHH:MM:SSZ`.
std::string format_timestamp(Timestamp t);

/// `<n>d|h|m|s` with n a positive integer.
std::optional<Duration> try_parse_duration(std::string_view text);
/// Largest of d/h/m/s that divides the duration exactly.
std::string format_duration(Duration d);

struct TeamConfig {
    std::string team_name;
    Timestamp iteration_start{};
    Duration iteration_length{14 * kOneDay};
    Duration reminder_lead{kOneDay};
    Duration default_cadence{kOneDay};
    Duration command_timeout{10};
    std::filesystem::path workdir{"."};

    /// Throws Error(config) when an invariant is violated.
    void validate() const;
};

struct Iteration {
    std::int64_t index = 0;
    Timestamp starts_at{};
    Timestamp ends_at{};

    bool contains(Timestamp t) const { return t >= starts_at && t < ends_at; }
    friend bool operator==(const Iteration&, const Iteration&) = default;
};

/// Throws Error(before_project_start) when t precedes the first iteration.
Iteration iteration_for(const TeamConfig& config, Timestamp t);
Iteration iteration_at(const TeamConfig& config, std::int64_t index);

struct Sample {
    ItemId item_id = 0;
    Timestamp taken_at{};
    std::variant<double, std::string> outcome;

    bool ok() const { return std::holds_alternative<double>(outcome); }
    double value() const { return std::get<double>(outcome); }
    const std::string& error_text() const { return std::get<std::string>(outcome); }

    friend bool operator==(const Sample&, const Sample&) = default;
};

class TimeSeries {
public:
    TimeSeries() = default;
    explicit TimeSeries(ItemId item_id) : item_id_(item_id) {}

    ItemId item_id() const { return item_id_; }
    const std::vector<Sample>& samples() const { return samples_; }
    bool empty() const { return samples_.empty(); }
    std::size_t size() const { return samples_.size(); }
    const Sample& back() const { return samples_.back(); }

    /// Enforces matching item id and strictly increasing taken_at.
    void append(Sample sample);

    friend bool operator==(const TimeSeries&, const TimeSeries&) = default;

private:
    ItemId item_id_ = 0;
    std::vector<Sample> samples_;
};

enum class Direction { up, down, flat };
const char* direction_name(Direction d) noexcept;

inline constexpr double kFlatAbsTolerance = 1e-9;
inline constexpr double kFlatRelTolerance = 0.01;

/// flat iff |delta| <= max(abs_tol, rel_tol * |baseline|).
Direction classify_change(double delta, double baseline);

struct TrendReport {
    ItemId item_id = 0;
    Sample baseline;
    Sample latest;
    double delta = 0;
    Direction direction = Direction::flat;
    std::size_t sample_count = 0;
};

/// Baseline is the first successful sample at/after window_start (the first
/// overall without one), latest the last successful sample. Throws
/// Error(empty_series) when nothing qualifies.
TrendReport compute_trend(const TimeSeries& series, std::optional<Timestamp> window_start = std::nullopt);

} // namespace retro
