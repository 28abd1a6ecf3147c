// SPDX-License-Identifier: Apache-2.0
#include "retro/error.hpp"

namespace retro {

const char* errc_name(Errc code) noexcept
{
    switch (code) {
    case Errc::invalid_argument: return "InvalidArgument";
    case Errc::config: return "ConfigError";
    case Errc::io: return "IoError";
    case Errc::format: return "FormatError";
    case Errc::invalid_window: return "InvalidWindow";
    case Errc::before_project_start: return "BeforeProjectStart";
    case Errc::empty_series: return "EmptySeries";
    case Errc::pattern: return "PatternError";
    case Errc::exec_timeout: return "ExecTimeout";
    case Errc::non_zero_exit: return "NonZeroExit";
    case Errc::output_not_numeric: return "OutputNotNumeric";
    case Errc::exec_failed: return "ExecFailed";
    case Errc::unknown_item: return "UnknownItem";
    case Errc::already_closed: return "AlreadyClosed";
    case Errc::journal_corrupt: return "JournalCorrupt";
    case Errc::command_metrics_disabled: return "CommandMetricsDisabled";
    }
    return "Error";
}

Error Error::at_line(Errc code, std::size_t line, const std::string& reason)
{
    Error e(code, "line " + std::to_string(line) + ": " + reason);
    e.line_ = line;
    return e;
}

Error Error::with_exit_code(int code, const std::string& what)
{
    Error e(Errc::non_zero_exit, what);
    e.exit_code_ = code;
    return e;
}

} // namespace retro
