// SPDX-License-Identifier: Apache-2.0
#include "retro/http.hpp"

#include "json_codec.hpp"
#include "retro/error.hpp"

#include <fmt/format.h>
#include <httplib.h>

#include <charconv>
#include <cstdio>

namespace retro {

using codec::json;

namespace {

HttpResponse json_response(int status, const json& body) { return {status, body.dump()}; }

HttpResponse error_response(int status, const std::string& message)
{
    return json_response(status, json{{"error", message}});
}

HttpResponse journal_failure(const Error& e) { return error_response(503, fmt::format("journal unavailable: {}", e.what())); }

std::optional<Timestamp> optional_time(const json& body, const char* key, std::string& problem)
{
    auto it = body.find(key);
    if (it == body.end() || it->is_null())
        return std::nullopt;
    if (!it->is_string()) {
        problem = fmt::format("'{}' must be an ISO-8601 string", key);
        return std::nullopt;
    }
    auto t = try_parse_timestamp(it->get<std::string>());
    if (!t)
        problem = fmt::format("'{}' is not an ISO-8601 timestamp", key);
    return t;
}

} // namespace

HttpResponse HttpApi::post_message(const std::string& body)
{
    json req = json::parse(body, nullptr, false);
    if (req.is_discarded() || !req.is_object())
        return error_response(400, "body must be a JSON object");
    for (const char* key : {"channel", "author", "text"}) {
        if (!req.contains(key) || !req[key].is_string())
            return error_response(400, fmt::format("'{}' must be a string", key));
    }
    if (req["text"].get<std::string>().empty())
        return error_response(400, "'text' must not be empty");
    std::string problem;
    auto at = optional_time(req, "at", problem);
    if (!problem.empty())
        return error_response(400, problem);

    InboundMessage msg{req["channel"].get<std::string>(), req["author"].get<std::string>(),
                       req["text"].get<std::string>(), at ? *at : clock_()};
    try {
        json replies = json::array();
        for (const auto& r : bot_.handle(msg))
            replies.push_back(json{{"channel", r.channel}, {"text", r.text}});
        return json_response(200, json{{"replies", std::move(replies)}});
    } catch (const Error& e) {
        if (e.code() == Errc::io)
            return journal_failure(e);
        throw;
    }
}

HttpResponse HttpApi::list_actions()
{
    json out = json::array();
    for (const auto& item : bot_.actions())
        out.push_back(codec::to_json(item));
    return json_response(200, out);
}

HttpResponse HttpApi::samples(const std::string& id_text)
{
    ItemId id = 0;
    auto [ptr, ec] = std::from_chars(id_text.data(), id_text.data() + id_text.size(), id);
    if (ec != std::errc() || ptr != id_text.data() + id_text.size())
        return error_response(404, fmt::format("No action item #{}", id_text));
    try {
        auto series = bot_.series(id);
        json out = json::array();
        for (const auto& s : series.samples())
            out.push_back(codec::to_json(s));
        return json_response(200, out);
    } catch (const Error& e) {
        if (e.code() == Errc::unknown_item)
            return error_response(404, e.what());
        throw;
    }
}

HttpResponse HttpApi::report(const std::string* now_param)
{
    Timestamp now = clock_();
    if (now_param) {
        auto t = try_parse_timestamp(*now_param);
        if (!t)
            return error_response(400, "'now' is not an ISO-8601 timestamp");
        now = *t;
    }
    json out = json::array();
    for (const auto& entry : bot_.report(now))
        out.push_back(codec::to_json(entry));
    return json_response(200, out);
}

HttpResponse HttpApi::post_tick(const std::string& body)
{
    json req = json::object();
    if (!body.empty()) {
        req = json::parse(body, nullptr, false);
        if (req.is_discarded() || !req.is_object())
            return error_response(400, "body must be a JSON object");
    }
    std::string problem;
    auto now = optional_time(req, "now", problem);
    if (!problem.empty())
        return error_response(400, problem);
    try {
        json out = json::array();
        for (const auto& s : bot_.tick(now ? *now : clock_()))
            out.push_back(codec::to_json(s));
        return json_response(200, out);
    } catch (const Error& e) {
        if (e.code() == Errc::io)
            return journal_failure(e);
        throw;
    }
}

// --- server ------------------------------------------------------------------

struct HttpServer::Impl {
    HttpApi api;
    httplib::Server server;

    Impl(Bot& bot, std::function<Timestamp()> clock) : api(bot, std::move(clock)) {}
};

HttpServer::HttpServer(Bot& bot, std::function<Timestamp()> clock) : impl_(std::make_unique<Impl>(bot, std::move(clock)))
{
    auto& srv = impl_->server;
    auto& api = impl_->api;
    auto send = [](httplib::Response& res, const HttpResponse& r) {
        res.status = r.status;
        res.set_content(r.body, "application/json");
    };
    srv.Post("/api/messages",
             [&api, send](const httplib::Request& req, httplib::Response& res) { send(res, api.post_message(req.body)); });
    srv.Get("/api/actions",
            [&api, send](const httplib::Request&, httplib::Response& res) { send(res, api.list_actions()); });
    srv.Get(R"(/api/actions/([^/]+)/samples)", [&api, send](const httplib::Request& req, httplib::Response& res) {
        send(res, api.samples(req.matches[1]));
    });
    srv.Get("/api/report", [&api, send](const httplib::Request& req, httplib::Response& res) {
        std::string now;
        bool has_now = req.has_param("now");
        if (has_now)
            now = req.get_param_value("now");
        send(res, api.report(has_now ? &now : nullptr));
    });
    srv.Post("/api/tick",
             [&api, send](const httplib::Request& req, httplib::Response& res) { send(res, api.post_tick(req.body)); });
    srv.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        std::string what = "internal error";
        try {
            std::rethrow_exception(ep);
        } catch (const std::exception& e) {
            what = e.what();
        } catch (...) {
        }
        res.status = 500;
        res.set_content(json{{"error", what}}.dump(), "application/json");
    });
    srv.set_error_handler([](const httplib::Request&, httplib::Response& res) {
        if (res.body.empty())
            res.set_content(json{{"error", res.status == 404 ? "not found" : "request failed"}}.dump(),
                            "application/json");
    });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port)
{
    if (port == 0)
        return impl_->server.bind_to_any_port(host);
    return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpServer::listen() { return impl_->server.listen_after_bind(); }

void HttpServer::stop()
{
    if (impl_)
        impl_->server.stop();
}

// --- scheduler ---------------------------------------------------------------

Scheduler::Scheduler(Bot& bot, Deliver deliver) : bot_(bot), deliver_(std::move(deliver)) {}

Scheduler::~Scheduler() { stop(); }

void Scheduler::run_once(Timestamp now)
{
    try {
        bot_.tick(now);
    } catch (const Error& e) {
        std::fprintf(stderr, "retrobot: tick failed: %s\n", e.what());
    }
    if (auto msg = bot_.reminder(now)) {
        for (const auto& part : split_message(msg->channel, msg->text))
            deliver_(part);
    }
}

void Scheduler::start()
{
    stopping_ = false;
    thread_ = std::thread([this] {
        std::unique_lock lock(mu_);
        while (!stopping_) {
            lock.unlock();
            run_once(system_now());
            lock.lock();
            cv_.wait_for(lock, bot_.config().tick_interval, [this] { return stopping_; });
        }
    });
}

void Scheduler::stop()
{
    {
        std::lock_guard lock(mu_);
        stopping_ = true;
    }
    cv_.notify_all();
    if (thread_.joinable())
        thread_.join();
}

Scheduler::Deliver webhook_delivery(const std::string& url)
{
    constexpr std::string_view scheme = "http://";
    if (url.rfind(scheme, 0) != 0)
        throw Error(Errc::config, "reminder_webhook must start with http://");
    auto rest = url.substr(scheme.size());
    auto slash = rest.find('/');
    std::string host_port = rest.substr(0, slash);
    std::string path = slash == std::string::npos ? "/" : rest.substr(slash);
    return [host_port, path](const OutboundMessage& msg) {
        httplib::Client client("http://" + host_port);
        client.set_connection_timeout(5);
        auto res = client.Post(path, json{{"channel", msg.channel}, {"text", msg.text}}.dump(), "application/json");
        if (!res || res->status >= 300)
            std::fprintf(stderr, "retrobot: reminder webhook delivery failed\n");
    };
}

} // namespace retro
