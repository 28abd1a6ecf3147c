// SPDX-License-Identifier: Apache-2.0
#include "json_codec.hpp"

#include <stdexcept>

namespace retro::codec {

json to_json(const MetricSpec& spec)
{
    if (auto* cmd = std::get_if<CommandSpec>(&spec))
        return json{{"kind", "command"}, {"command_line", cmd->command_line}};
    const auto& b = std::get<BuiltinSpec>(spec);
    json params = json::object();
    for (const auto& [k, v] : b.params)
        params[k] = v;
    return json{{"kind", "builtin"}, {"name", std::string(builtin_name(b.name))}, {"params", std::move(params)}};
}

MetricSpec metric_from_json(const json& j)
{
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
        throw std::invalid_argument("metric needs a kind");
    auto kind = j["kind"].get<std::string>();
    MetricSpec spec;
    if (kind == "command") {
        if (!j.contains("command_line") || !j["command_line"].is_string())
            throw std::invalid_argument("command metric needs command_line");
        spec = CommandSpec{j["command_line"].get<std::string>()};
    } else if (kind == "builtin") {
        if (!j.contains("name") || !j["name"].is_string())
            throw std::invalid_argument("builtin metric needs a name");
        auto name = builtin_from_name(j["name"].get<std::string>());
        if (!name)
            throw std::invalid_argument("unknown builtin metric");
        BuiltinSpec b{*name, {}};
        if (j.contains("params")) {
            if (!j["params"].is_object())
                throw std::invalid_argument("params must be an object");
            for (const auto& [k, v] : j["params"].items()) {
                if (!v.is_string())
                    throw std::invalid_argument("param values must be strings");
                b.params[k] = v.get<std::string>();
            }
        }
        spec = std::move(b);
    } else {
        throw std::invalid_argument("unknown metric kind");
    }
    if (auto why = metric_violation(spec))
        throw std::invalid_argument(*why);
    return spec;
}

json to_json(const Sample& sample)
{
    json j{{"item_id", sample.item_id}, {"taken_at", format_timestamp(sample.taken_at)}};
    if (sample.ok())
        j["value"] = sample.value();
    else
        j["error"] = sample.error_text();
    return j;
}

json to_json(const ActionItem& item)
{
    return json{{"id", item.id},
                {"description", item.description},
                {"metric", render_metric(item.metric)},
                {"metric_spec", to_json(item.metric)},
                {"cadence", format_duration(item.cadence)},
                {"cadence_seconds", item.cadence.count()},
                {"created_at", format_timestamp(item.created_at)},
                {"created_by", item.created_by},
                {"status", item.is_open() ? "open" : "closed"},
                {"closed_at", item.closed_at ? json(format_timestamp(*item.closed_at)) : json(nullptr)},
                {"closed_by", item.closed_by ? json(*item.closed_by) : json(nullptr)}};
}

json to_json(const TrendReport& report)
{
    return json{{"item_id", report.item_id},
                {"baseline", to_json(report.baseline)},
                {"latest", to_json(report.latest)},
                {"delta", report.delta},
                {"direction", direction_name(report.direction)},
                {"sample_count", report.sample_count}};
}

json to_json(const ReportEntry& entry)
{
    if (entry.trend)
        return to_json(*entry.trend);
    return json{{"item_id", entry.item_id}, {"insufficient_data", true}};
}

} // namespace retro::codec
