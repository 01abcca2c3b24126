#pragma once

#include <chrono>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <variant>

#include "photoyear/catalog.hpp"
#include "photoyear/model.hpp"
#include "photoyear/store.hpp"

namespace photoyear {

struct EngineOptions {
    /// Images served in a session's last W year rounds are not repeated. 0 disables.
    std::size_t exclusion_window = 50;
    std::chrono::seconds session_ttl = std::chrono::hours(24);
    /// Per-session cap on remembered rounds (pending and answered), oldest evicted first.
    std::size_t max_remembered_rounds = 512;
    /// Reproducible tokens, round ids and image selection. Test configuration only.
    std::optional<std::uint64_t> seed;
    std::function<Timestamp()> clock;
};

/// What the client sees of a year round. Carries no year.
struct YearRoundView {
    std::string round_id;
    std::string image_key;
};

/// What the client sees of a timeline round. Carries no years.
struct TimelineRoundView {
    std::string round_id;
    std::string left_image_key;
    std::string right_image_key;
};

struct YearResult {
    std::int64_t play_id = 0;
    bool correct = false;
    Year correct_year;
    /// Image title, or the image id when the catalog has none.
    std::string title;
    Points points;
    std::string feedback;
};

struct TimelineResult {
    std::int64_t play_id = 0;
    TimelineOutcome outcome;
    Year left_year;
    Year right_year;
};

/// Re-derives a play's points from its stored inputs and catalog years.
Points recompute_points(const GamePlay& play, const Catalog& catalog);

/// Session lifecycle, round generation with hidden answers, and scoring of
/// submissions into persisted plays.
///
/// Each session has its own lock: submissions to one session are
/// serialized and a round is consumed atomically with its play being
/// persisted. Different sessions proceed in parallel.
class GameEngine {
public:
    GameEngine(std::shared_ptr<const Catalog> catalog, Store& store, EngineOptions options = {});
    ~GameEngine();

    /// Returns the bearer token. Throws UnknownUser when a registered
    /// identity has no account.
    std::string create_session(const Identity& identity);

    /// nullopt for unknown or expired tokens.
    std::optional<Identity> session_identity(const std::string& token);

    /// Throws UnknownSession, EmptyCatalog.
    YearRoundView next_year_round(const std::string& token);
    /// Throws UnknownSession, EmptyCatalog, NoDistinctYears.
    TimelineRoundView next_timeline_round(const std::string& token);

    /// Throws GuessOutOfRange, UnknownSession, UnknownRound, RoundAlreadyAnswered.
    YearResult submit_year_guess(const std::string& token, const std::string& round_id, int guess);
    /// Throws UnknownSession, UnknownRound, RoundAlreadyAnswered.
    TimelineResult submit_timeline_choice(const std::string& token, const std::string& round_id,
                                          TimelineChoice choice);

    /// True while the round is served and unanswered.
    bool is_pending(const std::string& token, const std::string& round_id);

    /// Drops sessions idle longer than the TTL (memory and store).
    std::size_t purge_idle();
    std::size_t session_count() const;

    const Catalog& catalog() const { return *catalog_; }
    const ImageRecord* image_by_key(const std::string& key) const;
    const std::string& key_for(std::size_t image_index) const { return keys_.at(image_index); }

private:
    struct YearKey {
        std::size_t image;
    };
    struct TimelineKey {
        std::size_t left;
        std::size_t right;
    };
    struct RoundEntry {
        std::variant<YearKey, TimelineKey> key;
        bool answered = false;
    };
    struct Session {
        std::mutex mu;
        std::string token_hash;
        Identity identity;
        Timestamp created_at;
        Timestamp last_seen;
        Timestamp last_persisted_touch;
        std::mt19937_64 rng;
        std::unordered_map<std::string, RoundEntry> rounds;
        std::deque<std::string> round_order;
        std::deque<std::size_t> recent_images;
        std::unordered_map<std::size_t, int> recent_counts;
    };

    Timestamp now() const;
    std::string next_token();
    std::uint64_t next_session_seed();
    std::shared_ptr<Session> find_session(const std::string& token);
    std::shared_ptr<Session> require_session(const std::string& token);
    std::size_t pick_year_image(Session& session);
    void remember_round(Session& session, std::string round_id, RoundEntry entry);
    void maybe_purge();

    std::shared_ptr<const Catalog> catalog_;
    Store& store_;
    EngineOptions options_;
    std::vector<std::string> keys_;
    std::unordered_map<std::string, std::size_t> key_index_;

    mutable std::shared_mutex sessions_mu_;
    std::unordered_map<std::string, std::shared_ptr<Session>> sessions_;

    std::mutex seed_mu_;
    std::mt19937_64 seed_rng_;
    Timestamp last_purge_;
};

}  // namespace photoyear
