// SPDX-License-Identifier: Apache-2.0
#pragma once

// JSON encodings shared by the journal and the HTTP adapter.

#include "retro/metric_spec.hpp"
#include "retro/model.hpp"
#include "retro/tracker.hpp"

#include <json.hpp>

namespace retro::codec {

using nlohmann::json;

json to_json(const MetricSpec& spec);
/// Throws std::invalid_argument on a malformed object.
MetricSpec metric_from_json(const json& j);

json to_json(const Sample& sample);
json to_json(const ActionItem& item);
json to_json(const TrendReport& report);
json to_json(const ReportEntry& entry);

} // namespace retro::codec
