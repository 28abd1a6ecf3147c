// SPDX-License-Identifier: Apache-2.0
#include "retro/cmdparse.hpp"

#include "retro/text.hpp"

#include <fmt/format.h>

namespace retro {

namespace {

constexpr std::string_view kSubcommands = "subcommand (track, status, list, close, report or help)";
constexpr ItemId kMaxItemId = 2147483647;

struct Failure {
    std::size_t byte_pos;
    std::string expected;
};

bool is_ident_char(char c)
{
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

class Cursor {
public:
    explicit Cursor(std::string_view text, std::size_t pos) : text_(text), pos_(pos) {}

    std::size_t pos() const { return pos_; }
    bool at_end() const { return pos_ >= text_.size(); }
    char peek() const { return at_end() ? '\0' : text_[pos_]; }

    void skip_space()
    {
        while (!at_end() && text::is_space(text_[pos_]))
            ++pos_;
    }

    /// Non-whitespace run at the cursor, without consuming it.
    std::string_view peek_word() const
    {
        std::size_t end = pos_;
        while (end < text_.size() && !text::is_space(text_[end]))
            ++end;
        return text_.substr(pos_, end - pos_);
    }

    void advance(std::size_t n) { pos_ += n; }

    /// Consumes a keyword that is followed by whitespace or the end of input.
    bool accept_keyword(std::string_view keyword)
    {
        if (!text::iequals(peek_word(), keyword))
            return false;
        pos_ += keyword.size();
        return true;
    }

    std::string quoted(std::string_view what)
    {
        if (peek() != '"')
            throw Failure{pos_, std::string(what)};
        std::size_t open = pos_++;
        std::string out;
        while (!at_end()) {
            char c = text_[pos_++];
            if (c == '"')
                return out;
            if (c == '\\' && !at_end() && (text_[pos_] == '"' || text_[pos_] == '\\')) {
                out += text_[pos_++];
                continue;
            }
            out += c;
        }
        (void)open;
        throw Failure{pos_, "closing quote"};
    }

    std::string ident()
    {
        std::size_t start = pos_;
        while (!at_end() && is_ident_char(text_[pos_]))
            ++pos_;
        return text::to_lower(text_.substr(start, pos_ - start));
    }

    ItemId item_ref()
    {
        if (peek() != '#')
            throw Failure{pos_, "'#<id>'"};
        ++pos_;
        std::size_t start = pos_;
        ItemId id = 0;
        while (!at_end() && text_[pos_] >= '0' && text_[pos_] <= '9') {
            id = id * 10 + (text_[pos_] - '0');
            if (id > kMaxItemId)
                throw Failure{start, "positive item id"};
            ++pos_;
        }
        if (pos_ == start || id < 1 || (!at_end() && !text::is_space(peek())))
            throw Failure{start, "positive item id"};
        return id;
    }

    void expect_end()
    {
        skip_space();
        if (!at_end())
            throw Failure{pos_, "end of command"};
    }

private:
    std::string_view text_;
    std::size_t pos_;
};

MetricSpec parse_metric(Cursor& in)
{
    std::size_t metric_pos = in.pos();
    std::string_view word = in.peek_word();
    if (text::istarts_with(word, "cmd:")) {
        in.advance(4);
        std::size_t quote_pos = in.pos();
        auto line = in.quoted("quoted command line after cmd:");
        if (line.empty())
            throw Failure{quote_pos, "non-empty command line"};
        return CommandSpec{std::move(line)};
    }
    if (!text::istarts_with(word, "builtin:"))
        throw Failure{metric_pos, "metric (builtin:<name> or cmd:\"<command line>\")"};

    in.advance(8);
    std::size_t name_pos = in.pos();
    auto name = in.ident();
    auto metric = builtin_from_name(name);
    if (!metric || (!in.at_end() && !text::is_space(in.peek()))) {
        std::string names;
        for (auto m : all_builtins()) {
            if (!names.empty())
                names += ", ";
            names += builtin_name(m);
        }
        throw Failure{name_pos, "builtin metric name (" + names + ")"};
    }

    BuiltinSpec spec{*metric, {}};
    for (;;) {
        in.skip_space();
        if (in.at_end())
            break;
        auto next = in.peek_word();
        if (text::iequals(next, "every"))
            break;
        std::size_t key_pos = in.pos();
        auto eq = next.find('=');
        if (eq == std::string_view::npos || eq == 0)
            throw Failure{key_pos, "parameter <name>=<value>, 'every' or end of command"};
        auto key = in.ident();
        if (in.peek() != '=')
            throw Failure{key_pos, "parameter <name>=<value>, 'every' or end of command"};
        in.advance(1);
        std::string value;
        if (in.peek() == '"') {
            value = in.quoted("parameter value");
        } else {
            auto bare = in.peek_word();
            if (bare.empty())
                throw Failure{in.pos(), "parameter value"};
            value = std::string(bare);
            in.advance(bare.size());
        }
        if (!in.at_end() && !text::is_space(in.peek()))
            throw Failure{in.pos(), "whitespace after parameter value"};
        if (spec.params.count(key))
            throw Failure{key_pos, "parameter not already given"};
        spec.params.emplace(std::move(key), std::move(value));
        if (auto why = metric_violation(spec); why && why->rfind("commits_matching requires", 0) != 0)
            throw Failure{key_pos, "valid parameter (" + *why + ")"};
    }
    if (auto why = metric_violation(spec))
        throw Failure{in.pos(), *why};
    return spec;
}

CommandBody parse_track(Cursor& in)
{
    in.skip_space();
    std::size_t desc_pos = in.pos();
    auto description = in.quoted("quoted description");
    if (description.empty())
        throw Failure{desc_pos, "non-empty description"};
    in.skip_space();
    if (!in.accept_keyword("using"))
        throw Failure{in.pos(), "'using'"};
    in.skip_space();
    TrackCommand track{std::move(description), parse_metric(in), std::nullopt};
    in.skip_space();
    if (in.accept_keyword("every")) {
        in.skip_space();
        auto token = in.peek_word();
        auto cadence = try_parse_duration(token);
        if (!cadence || text::ascii_lower(token.back()) == 's')
            throw Failure{in.pos(), "duration such as 1d, 12h or 30m"};
        in.advance(token.size());
        track.cadence = cadence;
    }
    in.expect_end();
    return track;
}

CommandBody parse_body(Cursor& in)
{
    in.skip_space();
    std::size_t word_pos = in.pos();
    if (in.accept_keyword("track"))
        return parse_track(in);
    if (in.accept_keyword("status")) {
        in.skip_space();
        StatusCommand status;
        if (!in.at_end()) {
            if (in.peek() != '#')
                throw Failure{in.pos(), "'#<id>' or end of command"};
            status.item_id = in.item_ref();
        }
        in.expect_end();
        return status;
    }
    if (in.accept_keyword("close")) {
        in.skip_space();
        CloseCommand close{in.item_ref()};
        in.expect_end();
        return close;
    }
    if (in.accept_keyword("list")) {
        in.expect_end();
        return ListCommand{};
    }
    if (in.accept_keyword("report")) {
        in.expect_end();
        return ReportCommand{};
    }
    if (in.accept_keyword("help")) {
        in.expect_end();
        return HelpCommand{};
    }
    throw Failure{word_pos, std::string(kSubcommands)};
}

} // namespace

ParseOutcome parse_command(std::string_view text)
{
    std::string_view body = text::ltrim(text);
    if (!text::istarts_with(body, kCommandPrefix))
        return NotACommand{};

    std::size_t after_prefix = (text.size() - body.size()) + kCommandPrefix.size();
    try {
        Cursor in(text, after_prefix);
        if (in.at_end())
            throw Failure{in.pos(), std::string(kSubcommands)};
        if (!text::is_space(in.peek()))
            throw Failure{in.pos(), "whitespace after !retro"};
        return Command{parse_body(in), std::string(text)};
    } catch (const Failure& f) {
        return ParseError{text::codepoint_count(text.substr(0, f.byte_pos)), f.expected};
    }
}

std::string render_command(const CommandBody& cmd)
{
    struct Renderer {
        std::string operator()(const TrackCommand& t) const
        {
            auto out = fmt::format("!retro track {} using {}", text::quote(t.description), render_metric(t.metric));
            if (t.cadence)
                out += " every " + format_duration(*t.cadence);
            return out;
        }
        std::string operator()(const StatusCommand& s) const
        {
            return s.item_id ? fmt::format("!retro status #{}", *s.item_id) : "!retro status";
        }
        std::string operator()(const ListCommand&) const { return "!retro list"; }
        std::string operator()(const CloseCommand& c) const { return fmt::format("!retro close #{}", c.item_id); }
        std::string operator()(const ReportCommand&) const { return "!retro report"; }
        std::string operator()(const HelpCommand&) const { return "!retro help"; }
    };
    return std::visit(Renderer{}, cmd);
}

std::string render_help()
{
    const CommandBody examples[] = {
        TrackCommand{"Everyone checks in code", BuiltinSpec{BuiltinMetric::unique_contributors, {}}, kOneDay},
        StatusCommand{1},
        ListCommand{},
        CloseCommand{1},
        ReportCommand{},
        HelpCommand{},
    };
    std::string out;
    for (const auto& cmd : examples) {
        if (!out.empty())
            out += '\n';
        out += render_command(cmd);
    }
    return out;
}

} // namespace retro
