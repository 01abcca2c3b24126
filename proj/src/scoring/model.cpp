#include "photoyear/model.hpp"

namespace photoyear {

std::string_view to_string(AgeBracket bracket) {
    switch (bracket) {
        case AgeBracket::Age14To18: return "14-18";
        case AgeBracket::Age19To25: return "19-25";
        case AgeBracket::Age26To40: return "26-40";
        case AgeBracket::Age41Plus: return "41+";
    }
    return "";
}

std::optional<AgeBracket> parse_age_bracket(std::string_view text) {
    for (auto b : {AgeBracket::Age14To18, AgeBracket::Age19To25, AgeBracket::Age26To40, AgeBracket::Age41Plus}) {
        if (to_string(b) == text) return b;
    }
    return std::nullopt;
}

std::string_view to_string(GameMode mode) {
    return mode == GameMode::GuessYear ? "guess_the_year" : "timeline";
}

std::optional<GameMode> parse_game_mode(std::string_view text) {
    if (text == "guess_the_year") return GameMode::GuessYear;
    if (text == "timeline") return GameMode::Timeline;
    return std::nullopt;
}

}  // namespace photoyear
