// SPDX-License-Identifier: Apache-2.0
#include "bot_fixture.hpp"
#include "retro/gateway.hpp"
#include "retro/text.hpp"

#include <doctest.h>

#include <random>

using namespace retro;
using namespace retro::testing;

namespace {

const std::string_view kRamp[] = {"▁", "▂", "▃", "▄", "▅", "▆", "▇", "█"};

std::vector<int> glyph_indices(const std::string& s)
{
    std::vector<int> out;
    for (std::size_t i = 0; i < s.size(); i += 3) {
        auto g = std::string_view(s).substr(i, 3);
        for (int k = 0; k < 8; ++k)
            if (g == kRamp[k])
                out.push_back(k);
    }
    return out;
}

InboundMessage msg(std::string text, const char* when = "2019-01-19T12:00:00Z", std::string channel = "team")
{
    return InboundMessage{std::move(channel), "ann", std::move(text), at(when)};
}

} // namespace

TEST_CASE("sparkline examples")
{
    CHECK(sparkline(std::vector<double>{1, 2, 3}) == "▁▅█");
    CHECK(sparkline(std::vector<double>{5, 5}) == "▄▄");
    CHECK(sparkline(std::vector<double>{}) == "");
    CHECK(sparkline(std::vector<double>{7}) == "▄");
    CHECK(sparkline(std::vector<double>{3, 3, 5}) == "▁▁█");
}

TEST_CASE("sparkline properties")
{
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> dist(-100, 100);
    for (int round = 0; round < 500; ++round) {
        std::vector<double> v(rng() % 30);
        for (auto& x : v)
            x = rng() % 4 == 0 ? std::round(dist(rng)) : dist(rng);
        auto idx = glyph_indices(sparkline(v));
        CHECK(idx.size() == v.size());
        std::sort(v.begin(), v.end());
        auto sorted = glyph_indices(sparkline(v));
        CHECK(std::is_sorted(sorted.begin(), sorted.end()));
    }
}

TEST_CASE("split_message")
{
    CHECK(split_message("c", "short").size() == 1);
    std::string line(3000, 'a');
    auto two = split_message("c", line + "\n" + line);
    REQUIRE(two.size() == 2);
    CHECK(two[0].text == line);
    CHECK(two[1].channel == "c");

    std::string wide;
    for (int i = 0; i < 4500; ++i)
        wide += "é";
    auto parts = split_message("c", wide);
    REQUIRE(parts.size() == 2);
    CHECK(text::codepoint_count(parts[0].text) == kMaxMessageCodepoints);
    CHECK(parts[0].text + parts[1].text == wide);
}

TEST_CASE("reminder_due")
{
    auto config = team("2019-01-07T00:00:00Z", 14);
    auto ends = at("2019-01-21T00:00:00Z");
    auto due = reminder_due(config, std::nullopt, ends - kOneHour, "No open action items.", "general");
    REQUIRE(due);
    CHECK(due->channel == "general");
    CHECK(due->text == "Reminder: the retrospective for iteration 1 is due by 2019-01-21T00:00:00Z.\n"
                       "No open action items.");
    CHECK_FALSE(reminder_due(config, ends - 2 * kOneHour, ends - kOneHour, "", "general"));
    CHECK_FALSE(reminder_due(config, std::nullopt, at("2019-01-14T00:00:00Z"), "", "general"));
    CHECK(reminder_due(config, std::nullopt, ends - kOneDay, "", "general"));
    CHECK_FALSE(reminder_due(config, std::nullopt, ends - kOneDay - Duration{1}, "", "general"));
    CHECK(reminder_due(config, ends - kOneHour, ends + 13 * kOneDay, "", "general"));
    CHECK_FALSE(reminder_due(config, std::nullopt, at("2018-12-31T00:00:00Z"), "", "general"));
}

TEST_CASE("render_report")
{
    auto config = team();
    EvalContext ctx{config};
    SampleStore store;
    CHECK(render_report({}, store) == "No open action items.");

    store.register_item("up", CommandSpec{"echo 3"}, kOneHour, "ann", at("2019-01-08T00:00Z"), {}, ctx);
    store.register_item("broken", CommandSpec{"echo x"}, kOneHour, "ann", at("2019-01-08T00:00Z"), {}, ctx);
    auto report = store.retrospective_report(config, at("2019-01-09T00:00Z"));
    CHECK(render_report(report, store) == "#1 up: 3 → 3 (Δ+0 →) ▄\n#2 broken: (no data yet)");

    TrendReport down{};
    down.item_id = 1;
    down.baseline = Sample{1, at("2019-01-08T00:00Z"), 2.5};
    down.latest = Sample{1, at("2019-01-09T00:00Z"), 1.0};
    down.delta = -1.5;
    down.direction = Direction::down;
    down.sample_count = 2;
    auto line = render_report({ReportEntry{1, down}}, store);
    CHECK(line.find("#1 up: 2.5 → 1 (Δ-1.5 ↓)") == 0);
}

TEST_CASE("handle_message replies")
{
    TempDir dir;
    auto config = contributor_config(dir);
    auto artifacts = load_artifacts(config.artifact_paths);
    SampleStore store;

    auto track = handle_message(
        msg(R"(!retro track "Everyone checks in code" using builtin:unique_contributors every 1d)"), store, artifacts,
        config);
    REQUIRE(track.size() == 1);
    CHECK(track[0].channel == "team");
    CHECK(track[0].text == "Tracking #1 \"Everyone checks in code\" — baseline: 3 contributors");

    auto help = handle_message(msg("!retro help"), store, artifacts, config);
    REQUIRE(help.size() == 1);
    CHECK(help[0].text == render_help());

    auto missing = handle_message(msg("!retro close #99"), store, artifacts, config);
    REQUIRE(missing.size() == 1);
    CHECK(missing[0].text == "No action item #99");

    CHECK(handle_message(msg("nice weather"), store, artifacts, config).empty());

    auto cmd = handle_message(msg(R"(!retro track "Count" using cmd:"exit 3")"), store, artifacts, config);
    REQUIRE(cmd.size() == 1);
    CHECK(cmd[0].text.rfind("Tracking #2 \"Count\" — baseline failed: ", 0) == 0);

    auto locked_config = contributor_config(dir, AdapterKind::http);
    auto locked = handle_message(msg(R"(!retro track "Count" using cmd:"echo 1")"), store, artifacts, locked_config);
    REQUIRE(locked.size() == 1);
    CHECK(locked[0].text == "Command metrics are disabled on this bot.");
    CHECK(store.items().size() == 2);

    auto list = handle_message(msg("!retro list"), store, artifacts, config);
    REQUIRE(list.size() == 1);
    CHECK(list[0].text == "#1 [open] \"Everyone checks in code\" using builtin:unique_contributors every 1d (1 sample)\n"
                          "#2 [open] \"Count\" using cmd:\"exit 3\" every 1d (1 sample)");
}

TEST_CASE("every message yields zero or more replies on its own channel")
{
    TempDir dir;
    auto config = contributor_config(dir);
    config.allow_command_metrics = false;
    auto artifacts = load_artifacts(config.artifact_paths);
    SampleStore store;
    std::mt19937_64 rng(4);
    const char* stems[] = {"!retro ", "!retro track \"x\" using builtin:", "!retro close #", "!retro status #",
                           "hello", "!RETRO list", "!retro report"};
    for (int i = 0; i < 400; ++i) {
        std::string text = stems[rng() % std::size(stems)];
        for (auto n = rng() % 12; n > 0; --n)
            text += static_cast<char>(32 + rng() % 95);
        auto channel = "c" + std::to_string(rng() % 3);
        auto replies = handle_message(msg(text, "2019-01-19T12:00:00Z", channel), store, artifacts, config);
        bool command = text::istarts_with(text, "!retro");
        CHECK(replies.empty() != command);
        for (const auto& r : replies) {
            CHECK(r.channel == channel);
            CHECK_FALSE(r.text.empty());
        }
    }
}

TEST_CASE("console session matches the golden transcript")
{
    TempDir dir;
    Bot bot(contributor_config(dir));
    auto printed = run_console_script(bot, at("2019-01-19T12:00:00Z"));
    CHECK(printed == read_file(fixture_dir() / "contributors" / "session.golden"));

    Bot replayed(contributor_config(dir));
    CHECK(replayed.snapshot() == bot.snapshot());
}

TEST_CASE("console utility lines")
{
    TempDir dir;
    Bot bot(contributor_config(dir));
    ConsoleSession console(bot, at("2019-01-10T00:00:00Z"));
    CHECK(console.process_line("") == "");
    CHECK(console.process_line("tick") == "Nothing due.\n");
    CHECK(console.process_line("tick --now yesterday") == "invalid timestamp 'yesterday'\n");
    CHECK(console.process_line("report") == "No open action items.\n");
    CHECK(console.process_line("report --now 2019-01-20T01:00:00Z") == "No open action items.\n");
    CHECK(console.now() == at("2019-01-20T01:00:00Z"));
}
