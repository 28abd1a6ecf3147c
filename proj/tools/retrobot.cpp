// SPDX-License-Identifier: Apache-2.0
//
// retrobot command-line front end. Talks to the bot only through the C API.

#include "retrobot.h"

#include <CLI11.hpp>

#include <csignal>
#include <cstdio>
#include <iostream>
#include <memory>
#include <optional>
#include <pthread.h>
#include <string>
#include <thread>
#include <unistd.h>

namespace {

struct BotDeleter {
    void operator()(retro_bot* b) const { retro_bot_free(b); }
};
struct ConsoleDeleter {
    void operator()(retro_console* c) const { retro_console_free(c); }
};
using BotPtr = std::unique_ptr<retro_bot, BotDeleter>;
using ConsolePtr = std::unique_ptr<retro_console, ConsoleDeleter>;

struct OwnedString {
    char* p = nullptr;
    ~OwnedString() { retro_string_free(p); }
    std::string str() const { return p ? p : ""; }
};

int fail(retro_status st)
{
    std::fprintf(stderr, "retrobot: %s: %s\n", retro_status_name(st), retro_last_error());
    return 1;
}

const char* opt(const std::optional<std::string>& s) { return s ? s->c_str() : nullptr; }

BotPtr open_bot(const std::string& config, retro_adapter adapter, int& exit_code)
{
    retro_bot* raw = nullptr;
    auto st = retro_bot_open(config.c_str(), adapter, &raw);
    if (st != RETRO_OK) {
        exit_code = fail(st);
        return nullptr;
    }
    return BotPtr(raw);
}

int run_repl(const std::string& config, const std::optional<std::string>& now)
{
    int rc = 0;
    auto bot = open_bot(config, RETRO_ADAPTER_CLI, rc);
    if (!bot)
        return rc;
    retro_console* raw = nullptr;
    if (auto st = retro_console_open(bot.get(), opt(now), &raw); st != RETRO_OK)
        return fail(st);
    ConsolePtr console(raw);

    bool interactive = ::isatty(STDIN_FILENO);
    std::string line;
    for (;;) {
        if (interactive) {
            std::cout << "> " << std::flush;
        }
        if (!std::getline(std::cin, line))
            break;
        OwnedString out;
        auto st = retro_console_line(console.get(), line.c_str(), &out.p);
        if (st != RETRO_OK)
            return fail(st);
        std::cout << out.str() << std::flush;
    }
    return 0;
}

int run_serve(const std::string& config, const std::string& host, int port)
{
    int rc = 0;
    auto bot = open_bot(config, RETRO_ADAPTER_HTTP, rc);
    if (!bot)
        return rc;

    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);
    std::thread waiter([&] {
        int sig = 0;
        sigwait(&signals, &sig);
        retro_bot_stop(bot.get());
    });

    auto st = retro_bot_serve(bot.get(), host.c_str(), port);
    // Wake the waiter if serving ended for another reason.
    pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();
    return st == RETRO_OK ? 0 : fail(st);
}

int run_tick(const std::string& config, const std::optional<std::string>& now)
{
    int rc = 0;
    auto bot = open_bot(config, RETRO_ADAPTER_CLI, rc);
    if (!bot)
        return rc;
    retro_console* raw = nullptr;
    if (auto st = retro_console_open(bot.get(), opt(now), &raw); st != RETRO_OK)
        return fail(st);
    ConsolePtr console(raw);
    OwnedString out;
    if (auto st = retro_console_line(console.get(), "tick", &out.p); st != RETRO_OK)
        return fail(st);
    std::cout << out.str();
    return 0;
}

int run_report(const std::string& config, const std::optional<std::string>& now)
{
    int rc = 0;
    auto bot = open_bot(config, RETRO_ADAPTER_CLI, rc);
    if (!bot)
        return rc;
    OwnedString text;
    if (auto st = retro_bot_report(bot.get(), opt(now), &text.p); st != RETRO_OK)
        return fail(st);
    std::cout << text.str() << "\n";
    return 0;
}

int run_ingest(const std::string& config, const std::optional<std::string>& commits,
               const std::optional<std::string>& issues, const std::optional<std::string>& builds)
{
    OwnedString summary;
    if (auto st = retro_ingest(config.c_str(), opt(commits), opt(issues), opt(builds), &summary.p); st != RETRO_OK)
        return fail(st);
    std::cout << summary.str() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"retrobot: tracks retrospective action items against project data"};
    app.require_subcommand(1);

    std::string config = "retrobot.json";
    std::optional<std::string> now;
    app.add_option("--config", config, "Bot configuration file")->capture_default_str();

    auto* repl = app.add_subcommand("repl", "Chat with the bot on the console");
    repl->add_option("--config", config, "Bot configuration file");
    repl->add_option("--now", now, "Start the session clock at this ISO-8601 time");

    auto* serve = app.add_subcommand("serve", "Serve the HTTP API");
    std::string host = "0.0.0.0";
    int port = 8080;
    serve->add_option("--config", config, "Bot configuration file");
    serve->add_option("--port", port, "Port to listen on")->capture_default_str();
    serve->add_option("--host", host, "Address to bind")->capture_default_str();

    auto* ingest = app.add_subcommand("ingest", "Validate and store artifact exports");
    std::optional<std::string> commits, issues, builds;
    ingest->add_option("--config", config, "Bot configuration file");
    ingest->add_option("--commits", commits, "commits.jsonl or git log --numstat output")->required();
    ingest->add_option("--issues", issues, "issues.jsonl");
    ingest->add_option("--builds", builds, "builds.jsonl");

    auto* tick = app.add_subcommand("tick", "Sample every due action item");
    tick->add_option("--config", config, "Bot configuration file");
    tick->add_option("--now", now, "Evaluation time (ISO-8601, default: now)");

    auto* report = app.add_subcommand("report", "Print the retrospective report");
    report->add_option("--config", config, "Bot configuration file");
    report->add_option("--now", now, "Report time (ISO-8601, default: now)");

    CLI11_PARSE(app, argc, argv);

    if (*repl)
        return run_repl(config, now);
    if (*serve)
        return run_serve(config, host, port);
    if (*ingest)
        return run_ingest(config, commits, issues, builds);
    if (*tick)
        return run_tick(config, now);
    if (*report)
        return run_report(config, now);
    return 0;
}
