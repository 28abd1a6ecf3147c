// SPDX-License-Identifier: Apache-2.0
#pragma once

// JSON-over-HTTP adapter:
//
//   POST /api/messages          {channel, author, text, at?} -> {replies:[{channel,text}]}
//   GET  /api/actions           -> [ActionItem]
//   GET  /api/actions/{id}/samples -> [Sample]
//   GET  /api/report?now=<iso>  -> [TrendReport]
//   POST /api/tick              {now?} -> [Sample]
//
// 400 on schema violations, 404 on unknown ids, 503 while the journal cannot
// be written.

#include "retro/gateway.hpp"

#include <atomic>
#include <condition_variable>
#include <mutex>
#include <functional>
#include <memory>
#include <string>
#include <thread>

namespace retro {

struct HttpResponse {
    int status = 200;
    std::string body;
};

/// Transport-independent request handling; the server below only forwards.
class HttpApi {
public:
    explicit HttpApi(Bot& bot, std::function<Timestamp()> clock = system_now) : bot_(bot), clock_(std::move(clock)) {}

    HttpResponse post_message(const std::string& body);
    HttpResponse list_actions();
    HttpResponse samples(const std::string& id_text);
    HttpResponse report(const std::string* now_param);
    HttpResponse post_tick(const std::string& body);

private:
    Bot& bot_;
    std::function<Timestamp()> clock_;
};

class HttpServer {
public:
    explicit HttpServer(Bot& bot, std::function<Timestamp()> clock = system_now);
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Binds; port 0 picks a free port. Returns the bound port, or -1.
    int bind(const std::string& host, int port);
    /// Blocks until stop().
    bool listen();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Periodically ticks the bot and delivers reminders until stopped.
class Scheduler {
public:
    using Deliver = std::function<void(const OutboundMessage&)>;

    Scheduler(Bot& bot, Deliver deliver);
    ~Scheduler();

    void start();
    void stop();
    /// One scheduling round at `now`; exposed for tests.
    void run_once(Timestamp now);

private:
    Bot& bot_;
    Deliver deliver_;
    std::thread thread_;
    std::mutex mu_;
    std::condition_variable cv_;
    bool stopping_ = false;
};

/// Delivery to an `http://host[:port]/path` webhook as `{channel, text}`.
Scheduler::Deliver webhook_delivery(const std::string& url);

} // namespace retro
