// SPDX-License-Identifier: Apache-2.0
#include "retrobot.h"

#include "json_codec.hpp"
#include "retro/error.hpp"
#include "retro/gateway.hpp"
#include "retro/http.hpp"

#include <fmt/format.h>

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

using retro::codec::json;

struct retro_bot {
    explicit retro_bot(retro::BotConfig config) : bot(std::move(config)) {}

    retro::Bot bot;
    std::mutex serve_mu;
    retro::HttpServer* server = nullptr;
};

struct retro_console {
    retro::ConsoleSession session;
};

namespace {

thread_local std::string g_last_error;

retro_status status_for(retro::Errc code)
{
    switch (code) {
    case retro::Errc::config: return RETRO_E_CONFIG;
    case retro::Errc::io: return RETRO_E_IO;
    case retro::Errc::format: return RETRO_E_FORMAT;
    case retro::Errc::journal_corrupt: return RETRO_E_JOURNAL_CORRUPT;
    case retro::Errc::unknown_item: return RETRO_E_UNKNOWN_ITEM;
    case retro::Errc::already_closed: return RETRO_E_ALREADY_CLOSED;
    default: return RETRO_E_INVALID_ARGUMENT;
    }
}

template <typename Fn>
retro_status guarded(Fn&& fn)
{
    try {
        g_last_error.clear();
        return fn();
    } catch (const retro::Error& e) {
        g_last_error = e.what();
        return status_for(e.code());
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return RETRO_E_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return RETRO_E_INTERNAL;
    }
}

char* dup_string(const std::string& s)
{
    auto* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out)
        throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

retro::Timestamp time_or_now(const char* iso)
{
    return iso ? retro::parse_timestamp(iso) : retro::system_now();
}

retro_status invalid(const char* what)
{
    g_last_error = what;
    return RETRO_E_INVALID_ARGUMENT;
}

std::string read_file(const char* path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw retro::Error(retro::Errc::io, fmt::format("cannot read '{}'", path));
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

template <typename Write>
void write_file(const std::filesystem::path& path, Write write)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw retro::Error(retro::Errc::io, fmt::format("cannot write '{}'", tmp.string()));
        write(out);
        out.flush();
        if (!out)
            throw retro::Error(retro::Errc::io, fmt::format("cannot write '{}'", tmp.string()));
    }
    std::filesystem::rename(tmp, path);
}

} // namespace

extern "C" {

const char* retro_last_error(void) { return g_last_error.c_str(); }

const char* retro_status_name(retro_status status)
{
    switch (status) {
    case RETRO_OK: return "ok";
    case RETRO_E_INVALID_ARGUMENT: return "invalid argument";
    case RETRO_E_CONFIG: return "config error";
    case RETRO_E_IO: return "I/O error";
    case RETRO_E_FORMAT: return "format error";
    case RETRO_E_JOURNAL_CORRUPT: return "journal corrupt";
    case RETRO_E_UNKNOWN_ITEM: return "unknown item";
    case RETRO_E_ALREADY_CLOSED: return "already closed";
    case RETRO_E_BIND: return "cannot bind";
    case RETRO_E_INTERNAL: return "internal error";
    }
    return "unknown status";
}

void retro_string_free(char* s) { std::free(s); }

retro_status retro_bot_open(const char* config_path, retro_adapter adapter, retro_bot** out)
{
    if (!config_path || !out)
        return invalid("config_path and out are required");
    return guarded([&] {
        auto kind = adapter == RETRO_ADAPTER_HTTP ? retro::AdapterKind::http : retro::AdapterKind::cli;
        *out = new retro_bot(retro::load_config(config_path, kind));
        return RETRO_OK;
    });
}

void retro_bot_free(retro_bot* bot) { delete bot; }

retro_status retro_bot_handle_message(retro_bot* bot, const char* channel, const char* author, const char* text,
                                      const char* at, char** replies_json)
{
    if (!bot || !channel || !author || !text || !replies_json)
        return invalid("bot, channel, author, text and replies_json are required");
    if (!*text)
        return invalid("text must not be empty");
    return guarded([&] {
        retro::InboundMessage msg{channel, author, text, time_or_now(at)};
        json replies = json::array();
        for (const auto& r : bot->bot.handle(msg))
            replies.push_back(json{{"channel", r.channel}, {"text", r.text}});
        *replies_json = dup_string(json{{"replies", std::move(replies)}}.dump());
        return RETRO_OK;
    });
}

retro_status retro_bot_tick(retro_bot* bot, const char* now, char** samples_json)
{
    if (!bot || !samples_json)
        return invalid("bot and samples_json are required");
    return guarded([&] {
        json out = json::array();
        for (const auto& s : bot->bot.tick(time_or_now(now)))
            out.push_back(retro::codec::to_json(s));
        *samples_json = dup_string(out.dump());
        return RETRO_OK;
    });
}

retro_status retro_bot_report(retro_bot* bot, const char* now, char** text)
{
    if (!bot || !text)
        return invalid("bot and text are required");
    return guarded([&] {
        *text = dup_string(bot->bot.report_text(time_or_now(now)));
        return RETRO_OK;
    });
}

retro_status retro_bot_reminder(retro_bot* bot, const char* now, char** text)
{
    if (!bot || !text)
        return invalid("bot and text are required");
    return guarded([&] {
        auto msg = bot->bot.reminder(time_or_now(now));
        *text = msg ? dup_string(msg->text) : nullptr;
        return RETRO_OK;
    });
}

retro_status retro_bot_actions(retro_bot* bot, char** actions_json)
{
    if (!bot || !actions_json)
        return invalid("bot and actions_json are required");
    return guarded([&] {
        json out = json::array();
        for (const auto& item : bot->bot.actions())
            out.push_back(retro::codec::to_json(item));
        *actions_json = dup_string(out.dump());
        return RETRO_OK;
    });
}

retro_status retro_bot_serve(retro_bot* bot, const char* host, int port)
{
    if (!bot || port < 0 || port > 65535)
        return invalid("bot and a valid port are required");
    return guarded([&] {
        retro::HttpServer server(bot->bot);
        int bound = server.bind(host ? host : "0.0.0.0", port);
        if (bound < 0) {
            g_last_error = fmt::format("cannot bind port {}", port);
            return RETRO_E_BIND;
        }
        const auto& cfg = bot->bot.config();
        retro::Scheduler::Deliver deliver = [](const retro::OutboundMessage& m) {
            std::printf("[%s] %s\n", m.channel.c_str(), m.text.c_str());
            std::fflush(stdout);
        };
        if (cfg.reminder_webhook) {
            auto webhook = retro::webhook_delivery(*cfg.reminder_webhook);
            deliver = [deliver, webhook](const retro::OutboundMessage& m) {
                deliver(m);
                webhook(m);
            };
        }
        retro::Scheduler scheduler(bot->bot, deliver);
        {
            std::lock_guard lock(bot->serve_mu);
            bot->server = &server;
        }
        std::fprintf(stderr, "retrobot: listening on %s:%d\n", host ? host : "0.0.0.0", bound);
        scheduler.start();
        server.listen();
        scheduler.stop();
        {
            std::lock_guard lock(bot->serve_mu);
            bot->server = nullptr;
        }
        return RETRO_OK;
    });
}

void retro_bot_stop(retro_bot* bot)
{
    if (!bot)
        return;
    std::lock_guard lock(bot->serve_mu);
    if (bot->server)
        bot->server->stop();
}

retro_status retro_console_open(retro_bot* bot, const char* now, retro_console** out)
{
    if (!bot || !out)
        return invalid("bot and out are required");
    return guarded([&] {
        std::optional<retro::Timestamp> start;
        if (now)
            start = retro::parse_timestamp(now);
        *out = new retro_console{retro::ConsoleSession(bot->bot, start)};
        return RETRO_OK;
    });
}

retro_status retro_console_line(retro_console* console, const char* line, char** output)
{
    if (!console || !line || !output)
        return invalid("console, line and output are required");
    return guarded([&] {
        *output = dup_string(console->session.process_line(line));
        return RETRO_OK;
    });
}

void retro_console_free(retro_console* console) { delete console; }

retro_status retro_ingest(const char* config_path, const char* commits, const char* issues, const char* builds,
                          char** summary)
{
    if (!config_path || !summary)
        return invalid("config_path and summary are required");
    return guarded([&] {
        auto cfg = retro::load_config(config_path, retro::AdapterKind::cli);
        std::vector<retro::CommitRecord> commit_records;
        std::vector<retro::IssueRecord> issue_records;
        std::vector<retro::BuildRecord> build_records;
        if (commits) {
            auto content = read_file(commits);
            auto first = content.find_first_not_of(" \t\r\n");
            if (first != std::string::npos && content[first] == '@') {
                commit_records = retro::parse_git_numstat(content);
            } else {
                std::istringstream in(content);
                commit_records = retro::parse_commit_jsonl(in);
            }
        }
        if (issues) {
            std::istringstream in(read_file(issues));
            issue_records = retro::parse_issue_jsonl(in);
        }
        if (builds) {
            std::istringstream in(read_file(builds));
            build_records = retro::parse_build_jsonl(in);
        }
        // Validates uniqueness and yields the canonical ordering.
        retro::ArtifactStore store(std::move(commit_records), std::move(issue_records), std::move(build_records));
        if (commits)
            write_file(cfg.artifact_paths.commits, [&](std::ostream& o) { retro::write_commit_jsonl(o, store.commits()); });
        if (issues)
            write_file(cfg.artifact_paths.issues, [&](std::ostream& o) { retro::write_issue_jsonl(o, store.issues()); });
        if (builds)
            write_file(cfg.artifact_paths.builds, [&](std::ostream& o) { retro::write_build_jsonl(o, store.builds()); });
        *summary = dup_string(fmt::format("ingested {} commits, {} issues, {} builds", store.commits().size(),
                                          store.issues().size(), store.builds().size()));
        return RETRO_OK;
    });
}

} // extern "C"
