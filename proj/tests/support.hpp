#pragma once

// Test helpers shared by the unit suites and the acceptance runner:
// independent oracles, catalog/store fixtures, a seeded simulation driver.

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "photoyear/analytics.hpp"
#include "photoyear/catalog.hpp"
#include "photoyear/engine.hpp"
#include "photoyear/store.hpp"

namespace photoyear::testing {

// Oracles work in thousandths so they share no code path with Fixed.

/// Hundredths of 10 * (1 - min(|d|, 100) / 100), half-up.
inline std::int64_t oracle_year_dynamic(int guess, int actual) {
    int d = guess - actual;
    if (d < 0) d = -d;
    if (d > 100) d = 100;
    const std::int64_t thousandths = 10000 - 100 * d;
    return (thousandths + 5) / 10;
}

/// Hundredths of 5 * {1 | 1 - (d-10)/40 | 0.1}, half-up.
inline std::int64_t oracle_timeline_bonus(int d) {
    std::int64_t thousandths;
    if (d <= 10) {
        thousandths = 5000;
    } else if (d <= 50) {
        thousandths = 5000 - 125 * (d - 10);
    } else {
        thousandths = 500;
    }
    return (thousandths + 5) / 10;
}

/// 2-decimal percentage, half-up, as a string ("65.86").
inline std::string oracle_percent(std::int64_t correct, std::int64_t total) {
    const std::int64_t scaled = correct * 100000 / total;  // thousandths of a percent
    const std::int64_t cents = (scaled + 5) / 10;
    std::string frac = std::to_string(cents % 100);
    if (frac.size() < 2) frac.insert(0, "0");
    return std::to_string(cents / 100) + "." + frac;
}

class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("photoyear-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline ImageRecord make_record(const std::string& id, int year, std::string title = {}) {
    return ImageRecord{
        .img_id = id,
        .gt_year = Year(year),
        .date_taken = std::to_string(year),
        .date_granularity = 8,
        .url = "https://images.example.org/" + id + ".jpg",
        .title = std::move(title),
    };
}

/// `per_year` images for every year in the catalog range.
inline std::shared_ptr<Catalog> full_catalog(int per_year) {
    auto catalog = std::make_shared<Catalog>();
    for (int y = kFirstYear; y <= kLastYear; ++y) {
        for (int i = 0; i < per_year; ++i) {
            catalog->add(make_record("img-" + std::to_string(y) + "-" + std::to_string(i), y,
                                     "Photo " + std::to_string(i)));
        }
    }
    return catalog;
}

inline std::shared_ptr<Catalog> catalog_of_years(const std::vector<int>& years) {
    auto catalog = std::make_shared<Catalog>();
    int i = 0;
    for (int y : years) catalog->add(make_record("fx-" + std::to_string(i++), y));
    return catalog;
}

inline std::unique_ptr<Store> memory_store() { return open_store(":memory:", PasswordHasher(HashCost::minimal())); }

inline void write_jpeg(const std::filesystem::path& path, int width, int height) {
    cv::Mat img(height, width, CV_8UC3);
    cv::randu(img, cv::Scalar::all(0), cv::Scalar::all(255));
    cv::imwrite(path.string(), img);
}

/// Clock advancing one second per call, starting at a fixed instant.
inline std::function<Timestamp()> stepping_clock(std::int64_t start_ms = 1'700'000'000'000) {
    auto t = std::make_shared<std::atomic<std::int64_t>>(start_ms);
    return [t] { return from_millis(t->fetch_add(1000)); };
}

/// Naive recount of per-decade guesses / shown / correct, from raw plays.
struct Recount {
    std::int64_t guesses = 0;
    std::int64_t shown = 0;
    std::int64_t correct = 0;
};

inline std::map<int, Recount> recount_decades(const std::vector<GamePlay>& plays, const Catalog& catalog,
                                              bool include_demo,
                                              const std::vector<ServedRound>& unanswered = {}) {
    std::map<int, Recount> out;
    for (int d = 1930; d <= 1990; d += 10) out[d];
    for (const auto& p : plays) {
        if (!include_demo && !p.user_id) continue;
        for (const auto& id : p.image_ids) {
            const int decade = catalog.find(id)->gt_year.value() / 10 * 10;
            auto& r = out[decade];
            ++r.guesses;
            ++r.shown;
            if (p.correct) ++r.correct;
        }
    }
    for (const auto& s : unanswered) {
        if (!include_demo && !s.user_id) continue;
        for (const auto& id : s.image_ids) ++out[catalog.find(id)->gt_year.value() / 10 * 10].shown;
    }
    return out;
}

/// Seeded play-through: `users` registered players take turns over `rounds`
/// rounds, alternating modes at random, against a fresh store.
struct Simulation {
    std::shared_ptr<Catalog> catalog;
    std::unique_ptr<Store> store;
    std::unique_ptr<GameEngine> engine;
    std::vector<UserAccount> users;
    std::vector<std::string> tokens;

    Simulation(std::uint64_t seed, int users_count, std::shared_ptr<Catalog> cat = full_catalog(3))
        : catalog(std::move(cat)), store(memory_store()) {
        auto clock = stepping_clock();
        static_cast<SqliteStore&>(*store).set_clock(clock);
        store->upsert_images(*catalog);
        EngineOptions opts;
        opts.seed = seed;
        opts.clock = clock;
        engine = std::make_unique<GameEngine>(catalog, *store, opts);
        for (int i = 0; i < users_count; ++i) {
            const auto bracket = static_cast<AgeBracket>(i % 4);
            users.push_back(store->create_user("player" + std::to_string(i), "password-" + std::to_string(i), bracket));
            tokens.push_back(engine->create_session(Identity::registered(users.back().ref())));
        }
    }

    void play(int rounds, std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        for (int r = 0; r < rounds; ++r) {
            const auto& token = tokens[static_cast<std::size_t>(r) % tokens.size()];
            if (rng() % 2 == 0) {
                const auto round = engine->next_year_round(token);
                const int guess = kFirstYear + static_cast<int>(rng() % 70);
                engine->submit_year_guess(token, round.round_id, guess);
            } else {
                const auto round = engine->next_timeline_round(token);
                engine->submit_timeline_choice(token, round.round_id,
                                               rng() % 2 ? TimelineChoice::Left : TimelineChoice::Right);
            }
        }
    }
};

}  // namespace photoyear::testing
