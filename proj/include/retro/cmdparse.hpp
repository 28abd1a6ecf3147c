// SPDX-License-Identifier: Apache-2.0
#pragma once

// Chat command grammar:
//
//   command := "!retro" (track | status | list | close | report | help)
//   track   := "track" QUOTED "using" metric ("every" DURATION)?
//   metric  := "builtin:" IDENT (IDENT "=" VALUE)* | "cmd:" QUOTED
//   status  := "status" ("#" INT)?
//   close   := "close" "#" INT
//   list := "list" ; report := "report" ; help := "help"
//
// Keywords match case-insensitively. QUOTED uses double quotes with `\"` and
// `\\` escapes. DURATION is <n>d, <n>h or <n>m. VALUE is a bare word or QUOTED.

#include "retro/metric_spec.hpp"
#include "retro/model.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace retro {

struct TrackCommand {
    std::string description;
    MetricSpec metric;
    std::optional<Duration> cadence;
    friend bool operator==(const TrackCommand&, const TrackCommand&) = default;
};
struct StatusCommand {
    std::optional<ItemId> item_id;
    friend bool operator==(const StatusCommand&, const StatusCommand&) = default;
};
struct ListCommand {
    friend bool operator==(const ListCommand&, const ListCommand&) = default;
};
struct CloseCommand {
    ItemId item_id = 0;
    friend bool operator==(const CloseCommand&, const CloseCommand&) = default;
};
struct ReportCommand {
    friend bool operator==(const ReportCommand&, const ReportCommand&) = default;
};
struct HelpCommand {
    friend bool operator==(const HelpCommand&, const HelpCommand&) = default;
};

using CommandBody =
    std::variant<TrackCommand, StatusCommand, ListCommand, CloseCommand, ReportCommand, HelpCommand>;

struct Command {
    CommandBody body;
    std::string raw_text;
};

struct NotACommand {};

struct ParseError {
    std::size_t position = 0; ///< offset in code points from the start of the text
    std::string expected;
};

using ParseOutcome = std::variant<Command, NotACommand, ParseError>;

inline constexpr std::string_view kCommandPrefix = "!retro";

/// Total: returns a ParseOutcome for every input, including invalid UTF-8.
ParseOutcome parse_command(std::string_view text);

std::string render_command(const CommandBody& cmd);
inline std::string render_command(const Command& cmd) { return render_command(cmd.body); }

/// One runnable example line per production.
std::string render_help();

} // namespace retro
