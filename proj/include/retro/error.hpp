// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace retro {

enum class Errc {
    invalid_argument,
    config,
    io,
    format,
    invalid_window,
    before_project_start,
    empty_series,
    pattern,
    exec_timeout,
    non_zero_exit,
    output_not_numeric,
    exec_failed,
    unknown_item,
    already_closed,
    journal_corrupt,
    command_metrics_disabled,
};

const char* errc_name(Errc code) noexcept;

/// Single exception type for the library. `line()` is set for FormatError and
/// JournalCorrupt, `exit_code()` for NonZeroExit.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

    Errc code() const noexcept { return code_; }
    std::optional<std::size_t> line() const noexcept { return line_; }
    std::optional<int> exit_code() const noexcept { return exit_code_; }

    static Error at_line(Errc code, std::size_t line, const std::string& reason);
    static Error with_exit_code(int code, const std::string& what);

private:
    Errc code_;
    std::optional<std::size_t> line_;
    std::optional<int> exit_code_;
};

} // namespace retro
