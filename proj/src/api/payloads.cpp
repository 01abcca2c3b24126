#include "photoyear/payloads.hpp"

namespace photoyear {

namespace {

template <int Scale>
nlohmann::json optional_decimal(const std::optional<Fixed<Scale>>& v) {
    return v ? nlohmann::json(v->to_string()) : nlohmann::json(nullptr);
}

}  // namespace

std::string image_url(const std::string& image_key) { return "/images/" + image_key; }

nlohmann::json to_json(const YearRoundView& round) {
    return {{"round_id", round.round_id}, {"image_url", image_url(round.image_key)}};
}

nlohmann::json to_json(const TimelineRoundView& round) {
    return {{"round_id", round.round_id},
            {"left_image_url", image_url(round.left_image_key)},
            {"right_image_url", image_url(round.right_image_key)}};
}

nlohmann::json to_json(const YearResult& result) {
    return {{"correct", result.correct},
            {"correct_year", result.correct_year.value()},
            {"title", result.title},
            {"static_points", result.points.static_points},
            {"dynamic_points", result.points.dynamic_points.to_string()},
            {"feedback", result.feedback}};
}

nlohmann::json to_json(const TimelineResult& result) {
    return {{"correct", result.outcome.correct},
            {"left_year", result.left_year.value()},
            {"right_year", result.right_year.value()},
            {"static_points", result.outcome.points.static_points},
            {"dynamic_points", result.outcome.points.dynamic_points.to_string()},
            {"feedback", result.outcome.feedback}};
}

nlohmann::json to_json(const std::vector<LeaderboardEntry>& entries, PointKind kind) {
    auto rows = nlohmann::json::array();
    for (const auto& e : entries) {
        const std::string dynamic = e.total_dynamic.to_string();
        rows.push_back({{"rank", e.rank},
                        {"username", e.username},
                        {"total_static", e.total_static},
                        {"total_dynamic", dynamic},
                        {"points", kind == PointKind::Static ? nlohmann::json(e.total_static) : nlohmann::json(dynamic)}});
    }
    return {{"kind", kind == PointKind::Static ? "static" : "dynamic"}, {"entries", std::move(rows)}};
}

nlohmann::json to_json(const std::vector<DecadeStats>& decades, const ModeAccuracy& modes) {
    auto rows = nlohmann::json::array();
    for (const auto& d : decades) {
        rows.push_back({{"decade", d.decade.label()},
                        {"total_guesses", d.total_guesses},
                        {"total_images_shown", d.total_images_shown},
                        {"correct_pct", optional_decimal(d.correct_pct)}});
    }
    return {{"decades", std::move(rows)},
            {"mode_accuracy",
             {{"guess_the_year", optional_decimal(modes.guess_year)}, {"timeline", optional_decimal(modes.timeline)}}},
            {"plays", {{"guess_the_year", modes.guess_year_plays}, {"timeline", modes.timeline_plays}}}};
}

nlohmann::json error_body(Errc code, const std::string& message) {
    return {{"error", {{"code", std::string(to_string(code))}, {"message", message}}}};
}

}  // namespace photoyear
