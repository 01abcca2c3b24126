#pragma once

// JSON bodies exchanged with clients. Point values and percentages are
// strings with a fixed number of fraction digits ("10.00"), never numbers.

#include <json.hpp>

#include <vector>

#include "photoyear/analytics.hpp"
#include "photoyear/engine.hpp"

namespace photoyear {

std::string image_url(const std::string& image_key);

nlohmann::json to_json(const YearRoundView& round);
nlohmann::json to_json(const TimelineRoundView& round);
nlohmann::json to_json(const YearResult& result);
nlohmann::json to_json(const TimelineResult& result);
nlohmann::json to_json(const std::vector<LeaderboardEntry>& entries, PointKind kind);
nlohmann::json to_json(const std::vector<DecadeStats>& decades, const ModeAccuracy& modes);

nlohmann::json error_body(Errc code, const std::string& message);

}  // namespace photoyear
