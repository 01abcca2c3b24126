#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "photoyear/analytics.hpp"
#include "support.hpp"

using namespace photoyear;
using namespace photoyear::testing;

namespace {

GamePlay play(GameMode mode, std::optional<UserId> user, std::vector<std::string> images, bool correct,
              std::int64_t at_ms = 0) {
    GamePlay p;
    p.mode = mode;
    p.user_id = user;
    p.image_ids = std::move(images);
    p.input = mode == GameMode::GuessYear ? PlayInput(YearGuess(1950)) : PlayInput(TimelineChoice::Left);
    p.correct = correct;
    p.played_at = from_millis(at_ms);
    return p;
}

UserAccount user(UserId id, std::optional<AgeBracket> bracket = std::nullopt) {
    UserAccount u;
    u.id = id;
    u.username = "u" + std::to_string(id);
    u.age_bracket = bracket;
    return u;
}

const DecadeStats& row_for(const std::vector<DecadeStats>& rows, int start) {
    return *std::find_if(rows.begin(), rows.end(), [&](const DecadeStats& r) { return r.decade.start == start; });
}

}  // namespace

TEST(Accuracy, ReportedAggregates) {
    const auto year = accuracy(8708, 13221);
    ASSERT_TRUE(year);
    EXPECT_EQ(year->to_string(), "65.86");
    EXPECT_EQ(year->rescale<1>().to_string(), "65.9");
    EXPECT_EQ(accuracy(577, 2252)->to_string(), "25.62");
    EXPECT_EQ(year->to_string(), oracle_percent(8708, 13221));
}

TEST(Accuracy, EdgeCases) {
    EXPECT_FALSE(accuracy(0, 0));
    EXPECT_EQ(accuracy(0, 5)->to_string(), "0.00");
    EXPECT_EQ(accuracy(5, 5)->to_string(), "100.00");
    EXPECT_EQ(accuracy(2, 3)->to_string(), "66.67");
    try {
        accuracy(6, 5);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::CorrectExceedsTotal);
    }
}

TEST(Accuracy, MatchesOracle) {
    std::mt19937_64 rng(1);
    for (int i = 0; i < 10000; ++i) {
        const std::int64_t total = 1 + static_cast<std::int64_t>(rng() % 100000);
        const std::int64_t correct = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(total + 1));
        ASSERT_EQ(accuracy(correct, total)->to_string(), oracle_percent(correct, total)) << correct << "/" << total;
    }
}

TEST(Decades, AlwaysSevenRows) {
    const auto rows = decade_stats({}, Catalog{});
    ASSERT_EQ(rows.size(), 7u);
    EXPECT_EQ(rows.front().decade.label(), "1930s");
    EXPECT_EQ(rows.back().decade.label(), "1990s");
    for (const auto& r : rows) EXPECT_FALSE(r.correct_pct);
}

TEST(Decades, TimelinePlayAttributesToBothImages) {
    const auto catalog = catalog_of_years({1933, 1951});
    const auto rows = decade_stats({play(GameMode::Timeline, 1, {"fx-0", "fx-1"}, true)}, *catalog);
    for (int d : {1930, 1950}) {
        EXPECT_EQ(row_for(rows, d).total_guesses, 1);
        EXPECT_EQ(row_for(rows, d).total_images_shown, 1);
        EXPECT_EQ(row_for(rows, d).correct_pct->to_string(), "100.0");
    }
    EXPECT_FALSE(row_for(rows, 1940).correct_pct);
    EXPECT_EQ(row_for(rows, 1940).total_guesses, 0);
}

TEST(Decades, DemoExcludedByDefault) {
    const auto catalog = catalog_of_years({1933});
    const std::vector<GamePlay> plays{play(GameMode::GuessYear, std::nullopt, {"fx-0"}, true),
                                      play(GameMode::GuessYear, 1, {"fx-0"}, false)};
    EXPECT_EQ(row_for(decade_stats(plays, *catalog), 1930).correct_pct->to_string(), "0.0");
    EXPECT_EQ(row_for(decade_stats(plays, *catalog, {.include_demo = true}), 1930).correct_pct->to_string(), "50.0");
}

TEST(Decades, UnansweredRoundsCountAsShownOnly) {
    const auto catalog = catalog_of_years({1933, 1971});
    const std::vector<ServedRound> pending{{"r", GameMode::Timeline, 1, {"fx-0", "fx-1"}, {}}};
    const auto rows = decade_stats({play(GameMode::GuessYear, 1, {"fx-0"}, true)}, *catalog, {}, pending);
    EXPECT_EQ(row_for(rows, 1930).total_guesses, 1);
    EXPECT_EQ(row_for(rows, 1930).total_images_shown, 2);
    EXPECT_EQ(row_for(rows, 1970).total_guesses, 0);
    EXPECT_EQ(row_for(rows, 1970).total_images_shown, 1);
    EXPECT_FALSE(row_for(rows, 1970).correct_pct);
}

TEST(Decades, MatchesNaiveRecountOnRandomFixtures) {
    const auto catalog = full_catalog(2);
    const auto& recs = catalog->records();
    std::mt19937_64 rng(1234);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<GamePlay> plays;
        std::vector<ServedRound> pending;
        const int n = static_cast<int>(rng() % 40);
        for (int i = 0; i < n; ++i) {
            const auto& a = recs[rng() % recs.size()].img_id;
            const auto& b = recs[rng() % recs.size()].img_id;
            const std::optional<UserId> who = rng() % 4 == 0 ? std::nullopt : std::optional<UserId>(rng() % 5 + 1);
            if (rng() % 5 == 0) {
                pending.push_back({"r" + std::to_string(i), GameMode::GuessYear, who, {a}, {}});
            } else if (rng() % 2) {
                plays.push_back(play(GameMode::GuessYear, who, {a}, rng() % 2));
            } else {
                plays.push_back(play(GameMode::Timeline, who, {a, b}, rng() % 2));
            }
        }
        const bool include_demo = rng() % 2;
        const auto rows = decade_stats(plays, *catalog, {include_demo}, pending);
        const auto oracle = recount_decades(plays, *catalog, include_demo, pending);
        ASSERT_EQ(rows.size(), 7u);
        for (const auto& r : rows) {
            const auto& o = oracle.at(r.decade.start);
            ASSERT_EQ(r.total_guesses, o.guesses);
            ASSERT_EQ(r.total_images_shown, o.shown);
            ASSERT_EQ(r.correct_guesses, o.correct);
            ASSERT_EQ(r.correct_pct.has_value(), o.guesses > 0);
            ASSERT_GE(r.total_images_shown, r.total_guesses);
        }
        // Input order never matters.
        std::shuffle(plays.begin(), plays.end(), rng);
        ASSERT_EQ(decade_stats(plays, *catalog, {include_demo}, pending), rows);
    }
}

TEST(Modes, TimelineHalfCorrect) {
    const std::vector<GamePlay> plays{
        play(GameMode::Timeline, 1, {"a", "b"}, true), play(GameMode::Timeline, 1, {"a", "b"}, false),
        play(GameMode::Timeline, 1, {"a", "b"}, true), play(GameMode::Timeline, 1, {"a", "b"}, false)};
    const auto m = mode_accuracy(plays);
    EXPECT_EQ(m.timeline->to_string(), "50.00");
    EXPECT_FALSE(m.guess_year);
    EXPECT_EQ(m.timeline_plays, 4);
}

TEST(Modes, FullScaleCounts) {
    std::vector<GamePlay> plays;
    for (int i = 0; i < 13221; ++i) plays.push_back(play(GameMode::Timeline, 1, {"a", "b"}, i < 8708));
    for (int i = 0; i < 2252; ++i) plays.push_back(play(GameMode::GuessYear, 1, {"a"}, i < 577));
    const auto m = mode_accuracy(plays);
    EXPECT_EQ(m.timeline->to_string(), "65.86");
    EXPECT_EQ(m.guess_year->to_string(), "25.62");
    EXPECT_EQ(m.timeline_plays + m.guess_year_plays, 15473);
}

TEST(AgeGroups, OlderPlayersTimeline) {
    std::vector<GamePlay> plays;
    for (int i = 0; i < 9; ++i) plays.push_back(play(GameMode::Timeline, 1, {"a", "b"}, i < 7));
    plays.push_back(play(GameMode::GuessYear, 2, {"a"}, true));
    plays.push_back(play(GameMode::GuessYear, 3, {"a"}, false));
    plays.push_back(play(GameMode::GuessYear, std::nullopt, {"a"}, true));
    const auto rows = age_group_accuracy(plays, {user(1, AgeBracket::Age41Plus), user(2, AgeBracket::Age14To18),
                                                 user(3)});
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[0].bracket, "14-18");
    EXPECT_EQ(rows[1].bracket, "41+");
    EXPECT_EQ(rows[1].accuracy.timeline->to_string(), "77.78");
    EXPECT_EQ(rows[2].bracket, "unspecified");
    EXPECT_EQ(rows[2].accuracy.guess_year->to_string(), "0.00");
}

TEST(Engagement, TopDecileOfTen) {
    std::vector<GamePlay> plays;
    std::vector<UserAccount> users;
    for (UserId id = 1; id <= 10; ++id) users.push_back(user(id));
    for (int i = 0; i < 90; ++i) plays.push_back(play(GameMode::GuessYear, 1, {"a"}, true));
    for (UserId id = 2; id <= 10; ++id) {
        for (int i = 0; i < (id == 2 ? 2 : 1); ++i) plays.push_back(play(GameMode::GuessYear, id, {"a"}, true));
    }
    const auto e = engagement(plays, users);
    EXPECT_EQ(e.total_plays, 100);
    EXPECT_EQ(e.active_user_count, 10u);
    EXPECT_EQ(e.top_decile_user_count, 1u);
    EXPECT_EQ(e.top_decile_play_share->to_string(), "90.00");
    EXPECT_EQ(e.avg_plays_top_decile->to_string(), "90.0");
}

TEST(Engagement, UniformUsers) {
    std::vector<GamePlay> plays;
    std::vector<UserAccount> users;
    for (UserId id = 1; id <= 113; ++id) {
        users.push_back(user(id));
        for (int i = 0; i < 3; ++i) plays.push_back(play(GameMode::GuessYear, id, {"a"}, true));
    }
    const auto e = engagement(plays, users);
    EXPECT_EQ(e.top_decile_user_count, 12u);  // ceil(11.3)
    EXPECT_EQ(e.top_decile_play_share->to_string(), "10.62");
    EXPECT_EQ(e.avg_plays_top_decile->to_string(), "3.0");
    EXPECT_FALSE(engagement({}, users).top_decile_play_share);
}

TEST(Retention, DistinctIsoWeeks) {
    // 2024-01-01 is a Monday.
    const std::int64_t monday = 1'704'067'200'000;
    const std::int64_t day = 86'400'000;
    EXPECT_EQ(iso_week_index(from_millis(monday)), iso_week_index(from_millis(monday + 6 * day)));
    EXPECT_NE(iso_week_index(from_millis(monday - 1)), iso_week_index(from_millis(monday)));

    const std::vector<GamePlay> plays{
        play(GameMode::GuessYear, 1, {"a"}, true, monday), play(GameMode::GuessYear, 1, {"a"}, true, monday + 8 * day),
        play(GameMode::GuessYear, 2, {"a"}, true, monday), play(GameMode::GuessYear, 2, {"a"}, true, monday + day),
        play(GameMode::GuessYear, std::nullopt, {"a"}, true, monday + 9 * day)};
    const RetentionOptions opts{from_millis(monday), from_millis(monday + 28 * day)};
    EXPECT_EQ(retention(plays, {user(1), user(2), user(3), user(4)}, opts)->to_string(), "25.00");
    EXPECT_FALSE(retention(plays, {}, opts));
    RetentionOptions one = opts;
    one.min_active_weeks = 1;
    EXPECT_EQ(retention(plays, {user(1), user(2), user(3), user(4)}, one)->to_string(), "50.00");
}
