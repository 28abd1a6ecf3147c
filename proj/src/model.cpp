// SPDX-License-Identifier: Apache-2.0
#include "retro/model.hpp"

#include "retro/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace retro {

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }

// Reads exactly `width` digits at `pos`.
std::optional<int> read_fixed(std::string_view s, std::size_t& pos, std::size_t width)
{
    if (pos + width > s.size())
        return std::nullopt;
    int v = 0;
    for (std::size_t i = 0; i < width; ++i) {
        char c = s[pos + i];
        if (!is_digit(c))
            return std::nullopt;
        v = v * 10 + (c - '0');
    }
    pos += width;
    return v;
}

bool expect(std::string_view s, std::size_t& pos, char c)
{
    if (pos < s.size() && s[pos] == c) {
        ++pos;
        return true;
    }
    return false;
}

} // namespace

std::optional<Timestamp> try_parse_timestamp(std::string_view s)
{
    using namespace std::chrono;
    std::size_t pos = 0;
    auto y = read_fixed(s, pos, 4);
    if (!y || !expect(s, pos, '-'))
        return std::nullopt;
    auto mo = read_fixed(s, pos, 2);
    if (!mo || !expect(s, pos, '-'))
        return std::nullopt;
    auto d = read_fixed(s, pos, 2);
    if (!d || !expect(s, pos, 'T'))
        return std::nullopt;
    auto hh = read_fixed(s, pos, 2);
    if (!hh || !expect(s, pos, ':'))
        return std::nullopt;
    auto mm = read_fixed(s, pos, 2);
    if (!mm)
        return std::nullopt;
    int ss = 0;
    if (expect(s, pos, ':')) {
        auto sec = read_fixed(s, pos, 2);
        if (!sec)
            return std::nullopt;
        ss = *sec;
        if (expect(s, pos, '.')) {
            std::size_t start = pos;
            while (pos < s.size() && is_digit(s[pos]))
                ++pos;
            if (pos == start)
                return std::nullopt;
        }
    }
    int offset_minutes = 0;
    if (pos < s.size()) {
        char z = s[pos];
        if (z == 'Z') {
            ++pos;
        } else if (z == '+' || z == '-') {
            ++pos;
            auto oh = read_fixed(s, pos, 2);
            if (!oh)
                return std::nullopt;
            expect(s, pos, ':');
            auto om = read_fixed(s, pos, 2);
            if (!om || *oh > 23 || *om > 59)
                return std::nullopt;
            offset_minutes = (*oh * 60 + *om) * (z == '-' ? -1 : 1);
        } else {
            return std::nullopt;
        }
    }
    if (pos != s.size())
        return std::nullopt;

    year_month_day ymd{year{*y}, month{static_cast<unsigned>(*mo)}, day{static_cast<unsigned>(*d)}};
    if (!ymd.ok() || *hh > 23 || *mm > 59 || ss > 60)
        return std::nullopt;
    auto t = sys_days{ymd} + hours{*hh} + minutes{*mm} + seconds{ss} - minutes{offset_minutes};
    return time_point_cast<seconds>(t);
}

Timestamp parse_timestamp(std::string_view text)
{
    if (auto t = try_parse_timestamp(text))
        return *t;
    throw Error(Errc::invalid_argument, fmt::format("invalid ISO-8601 timestamp '{}'", text));
}

std::string format_timestamp(Timestamp t)
{
    using namespace std::chrono;
    auto day_point = floor<days>(t);
    year_month_day ymd{day_point};
    hh_mm_ss hms{t - day_point};
    return fmt::format("{:04}-{:02}-{:02}T{:02}:{:02}:{:02}Z", static_cast<int>(ymd.year()),
                       static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                       hms.hours().count(), hms.minutes().count(), hms.seconds().count());
}

std::optional<Duration> try_parse_duration(std::string_view text)
{
    if (text.size() < 2 || text.size() > 12)
        return std::nullopt;
    std::int64_t n = 0;
    for (char c : text.substr(0, text.size() - 1)) {
        if (!is_digit(c))
            return std::nullopt;
        n = n * 10 + (c - '0');
    }
    if (n <= 0)
        return std::nullopt;
    switch (text.back()) {
    case 'd': case 'D': return n * kOneDay;
    case 'h': case 'H': return n * kOneHour;
    case 'm': case 'M': return n * kOneMinute;
    case 's': case 'S': return Duration{n};
    default: return std::nullopt;
    }
}

std::string format_duration(Duration d)
{
    auto s = d.count();
    if (s != 0 && s % kOneDay.count() == 0)
        return fmt::format("{}d", s / kOneDay.count());
    if (s != 0 && s % kOneHour.count() == 0)
        return fmt::format("{}h", s / kOneHour.count());
    if (s != 0 && s % kOneMinute.count() == 0)
        return fmt::format("{}m", s / kOneMinute.count());
    return fmt::format("{}s", s);
}

void TeamConfig::validate() const
{
    if (iteration_length < kOneDay || iteration_length % kOneDay != Duration::zero())
        throw Error(Errc::config, "iteration_length must be a whole number of days (at least 1)");
    if (reminder_lead < Duration::zero() || reminder_lead >= iteration_length)
        throw Error(Errc::config, "reminder_lead must be non-negative and shorter than iteration_length");
    if (command_timeout <= Duration::zero())
        throw Error(Errc::config, "command_timeout must be positive");
    if (default_cadence < kOneMinute)
        throw Error(Errc::config, "default_cadence must be at least 1 minute");
}

Iteration iteration_at(const TeamConfig& config, std::int64_t index)
{
    Iteration it;
    it.index = index;
    it.starts_at = config.iteration_start + index * config.iteration_length;
    it.ends_at = it.starts_at + config.iteration_length;
    return it;
}

Iteration iteration_for(const TeamConfig& config, Timestamp t)
{
    if (t < config.iteration_start)
        throw Error(Errc::before_project_start,
                    fmt::format("{} is before the project start {}", format_timestamp(t),
                                format_timestamp(config.iteration_start)));
    auto offset = t - config.iteration_start;
    return iteration_at(config, offset / config.iteration_length);
}

void TimeSeries::append(Sample sample)
{
    if (sample.item_id != item_id_)
        throw Error(Errc::invalid_argument, "sample belongs to a different action item");
    if (!samples_.empty() && sample.taken_at <= samples_.back().taken_at)
        throw Error(Errc::invalid_argument, "sample timestamps must strictly increase");
    samples_.push_back(std::move(sample));
}

const char* direction_name(Direction d) noexcept
{
    switch (d) {
    case Direction::up: return "up";
    case Direction::down: return "down";
    case Direction::flat: return "flat";
    }
    return "flat";
}

Direction classify_change(double delta, double baseline)
{
    double threshold = std::max(kFlatAbsTolerance, kFlatRelTolerance * std::fabs(baseline));
    if (delta > threshold)
        return Direction::up;
    if (delta < -threshold)
        return Direction::down;
    return Direction::flat;
}

TrendReport compute_trend(const TimeSeries& series, std::optional<Timestamp> window_start)
{
    const auto& samples = series.samples();
    auto in_window = [&](const Sample& s) {
        return s.ok() && (!window_start || s.taken_at >= *window_start);
    };
    auto first = std::find_if(samples.begin(), samples.end(), in_window);
    if (first == samples.end())
        throw Error(Errc::empty_series, fmt::format("action item #{} has no successful sample", series.item_id()));
    auto last = std::find_if(samples.rbegin(), samples.rend(), in_window);

    TrendReport r;
    r.item_id = series.item_id();
    r.baseline = *first;
    r.latest = *last;
    r.delta = r.latest.value() - r.baseline.value();
    r.direction = classify_change(r.delta, r.baseline.value());
    r.sample_count = static_cast<std::size_t>(std::count_if(first, last.base(), in_window));
    return r;
}

} // namespace retro
