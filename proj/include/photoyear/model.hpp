#pragma once

// Records shared by the engine, the store and analytics.

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "photoyear/fixed.hpp"
#include "photoyear/scoring.hpp"

namespace photoyear {

using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;

inline std::int64_t to_millis(Timestamp t) { return t.time_since_epoch().count(); }
inline Timestamp from_millis(std::int64_t ms) { return Timestamp(std::chrono::milliseconds(ms)); }

using UserId = std::int64_t;

enum class AgeBracket { Age14To18, Age19To25, Age26To40, Age41Plus };

/// "14-18", "19-25", "26-40", "41+".
std::string_view to_string(AgeBracket bracket);
std::optional<AgeBracket> parse_age_bracket(std::string_view text);

struct UserRef {
    UserId id = 0;
    std::string username;
    friend bool operator==(const UserRef&, const UserRef&) = default;
};

struct UserAccount {
    UserId id = 0;
    std::string username;
    std::string credential_hash;
    std::optional<AgeBracket> age_bracket;
    Timestamp created_at;

    UserRef ref() const { return {id, username}; }
};

/// Who is playing: a registered user, or nobody (demo).
struct Identity {
    std::optional<UserRef> user;

    static Identity demo() { return {}; }
    static Identity registered(UserRef ref) { return {std::move(ref)}; }
    bool is_demo() const { return !user.has_value(); }
    std::optional<UserId> user_id() const { return user ? std::optional<UserId>(user->id) : std::nullopt; }
};

enum class GameMode { GuessYear, Timeline };

/// "guess_the_year" / "timeline".
std::string_view to_string(GameMode mode);
std::optional<GameMode> parse_game_mode(std::string_view text);

using PlayInput = std::variant<std::monostate, YearGuess, TimelineChoice>;

struct GamePlay {
    std::int64_t play_id = 0;
    /// Round this play answered; unique across all plays when set.
    std::string round_id;
    GameMode mode = GameMode::GuessYear;
    /// nullopt for demo plays.
    std::optional<UserId> user_id;
    /// One id for GuessYear, two (left, right) for Timeline.
    std::vector<std::string> image_ids;
    PlayInput input;
    bool correct = false;
    int static_points = 0;
    Cents dynamic_points;
    Timestamp played_at;

    bool is_demo() const { return !user_id.has_value(); }
    friend bool operator==(const GamePlay&, const GamePlay&) = default;
};

/// A round handed to a client, answered or not.
struct ServedRound {
    std::string round_id;
    GameMode mode = GameMode::GuessYear;
    std::optional<UserId> user_id;
    std::vector<std::string> image_ids;
    Timestamp served_at;
    friend bool operator==(const ServedRound&, const ServedRound&) = default;
};

enum class PointKind { Static, Dynamic };

struct LeaderboardEntry {
    int rank = 0;
    std::string username;
    std::int64_t total_static = 0;
    Cents total_dynamic;
    friend bool operator==(const LeaderboardEntry&, const LeaderboardEntry&) = default;
};

}  // namespace photoyear
