#pragma once

// Evaluation metrics over gameplay logs. Every function here is a pure
// function of its arguments; input order never changes the result.

#include <array>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "photoyear/catalog.hpp"
#include "photoyear/fixed.hpp"
#include "photoyear/model.hpp"

namespace photoyear {

/// 100 × correct / total, half-up to 2 decimals; nullopt when total is 0.
/// Throws Error{CorrectExceedsTotal}.
std::optional<Cents> accuracy(std::int64_t correct, std::int64_t total);

/// Start year of the decade: 1933 → 1930.
struct Decade {
    int start = kFirstYear;

    std::string label() const { return std::to_string(start) + "s"; }
    friend auto operator<=>(Decade, Decade) = default;
};

Decade decade_of(Year year);

inline constexpr std::array<Decade, 7> kDecades{Decade{1930}, Decade{1940}, Decade{1950}, Decade{1960},
                                                Decade{1970}, Decade{1980}, Decade{1990}};

struct DecadeStats {
    Decade decade;
    std::int64_t total_guesses = 0;
    std::int64_t total_images_shown = 0;
    std::int64_t correct_guesses = 0;
    /// 1 decimal; nullopt when there were no guesses.
    std::optional<Tenths> correct_pct;

    friend bool operator==(const DecadeStats&, const DecadeStats&) = default;
};

struct DecadeOptions {
    bool include_demo = false;
};

/// One image appearance inside a play: which image, and whether the guess
/// event attributed to it was correct.
struct Attribution {
    std::string img_id;
    bool correct = false;
};

/// How a play maps onto per-image guess events. Year plays give one event;
/// timeline plays give one event per image, each sharing the play's
/// correctness.
std::vector<Attribution> attribute_play(const GamePlay& play);

/// Per-decade guesses, appearances and correct percentage, always seven
/// rows (1930s..1990s). `unanswered` rounds add to appearances only.
/// Throws Error{UnknownImage}.
std::vector<DecadeStats> decade_stats(const std::vector<GamePlay>& plays, const Catalog& catalog,
                                      const DecadeOptions& options = {},
                                      const std::vector<ServedRound>& unanswered = {});

struct ModeAccuracy {
    std::optional<Cents> guess_year;
    std::optional<Cents> timeline;
    std::int64_t guess_year_plays = 0;
    std::int64_t timeline_plays = 0;

    friend bool operator==(const ModeAccuracy&, const ModeAccuracy&) = default;
};

ModeAccuracy mode_accuracy(const std::vector<GamePlay>& plays);

struct AgeGroupRow {
    /// "14-18" … "41+", or "unspecified".
    std::string bracket;
    ModeAccuracy accuracy;

    friend bool operator==(const AgeGroupRow&, const AgeGroupRow&) = default;
};

/// Registered plays grouped by the player's age bracket; only groups with
/// plays appear, in bracket order with "unspecified" last.
std::vector<AgeGroupRow> age_group_accuracy(const std::vector<GamePlay>& plays,
                                            const std::vector<UserAccount>& users);

struct EngagementSummary {
    std::size_t active_user_count = 0;
    std::size_t top_decile_user_count = 0;
    std::int64_t total_plays = 0;
    std::int64_t top_decile_plays = 0;
    std::optional<Cents> top_decile_play_share;
    std::optional<Tenths> avg_plays_top_decile;

    friend bool operator==(const EngagementSummary&, const EngagementSummary&) = default;
};

/// Registered users ranked by play count; the top ⌈10%⌉ of active users
/// form the decile.
EngagementSummary engagement(const std::vector<GamePlay>& plays, const std::vector<UserAccount>& users);

struct RetentionOptions {
    Timestamp from;
    Timestamp to;
    /// Distinct ISO weeks of activity needed to count as retained.
    int min_active_weeks = 2;
};

/// Share of registered users with plays in at least K distinct ISO weeks
/// inside [from, to). Not comparable to externally reported retention
/// figures whose definition is unknown. nullopt when there are no users.
std::optional<Cents> retention(const std::vector<GamePlay>& plays, const std::vector<UserAccount>& users,
                               const RetentionOptions& options);

/// Monday-based ISO week index counted from the epoch.
std::int64_t iso_week_index(Timestamp t);

}  // namespace photoyear
