#include "photoyear/engine.hpp"

#include <algorithm>
#include <array>

#include "photoyear/tokens.hpp"

namespace photoyear {

namespace {

Timestamp system_now() {
    return std::chrono::time_point_cast<std::chrono::milliseconds>(std::chrono::system_clock::now());
}

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

const Year& year_of(const Catalog& catalog, std::size_t index) { return catalog.records()[index].gt_year; }

}  // namespace

Points recompute_points(const GamePlay& play, const Catalog& catalog) {
    auto year = [&](std::size_t i) {
        const auto* record = catalog.find(play.image_ids.at(i));
        if (!record) throw Error(Errc::UnknownImage, "play references unknown image " + play.image_ids.at(i));
        return record->gt_year;
    };
    if (play.mode == GameMode::GuessYear) {
        const auto guess = std::get<YearGuess>(play.input);
        return {score_year_static(guess, year(0)), score_year_dynamic(guess, year(0))};
    }
    return score_timeline(std::get<TimelineChoice>(play.input), year(0), year(1)).points;
}

GameEngine::GameEngine(std::shared_ptr<const Catalog> catalog, Store& store, EngineOptions options)
    : catalog_(std::move(catalog)), store_(store), options_(std::move(options)) {
    if (!catalog_) catalog_ = std::make_shared<const Catalog>();
    if (!options_.clock) options_.clock = system_now;
    if (options_.seed) {
        std::uint64_t state = *options_.seed;
        seed_rng_.seed(splitmix64(state));
    } else {
        std::random_device rd;
        seed_rng_.seed((static_cast<std::uint64_t>(rd()) << 32) ^ rd());
    }
    keys_.reserve(catalog_->size());
    for (std::size_t i = 0; i < catalog_->size(); ++i) {
        keys_.push_back(image_key(catalog_->records()[i].img_id));
        key_index_.emplace(keys_.back(), i);
    }
    last_purge_ = now();
}

GameEngine::~GameEngine() = default;

Timestamp GameEngine::now() const { return options_.clock(); }

std::string GameEngine::next_token() {
    if (!options_.seed) return random_token();
    std::array<std::uint8_t, 16> raw{};
    std::lock_guard lock(seed_mu_);
    for (std::size_t i = 0; i < raw.size(); i += 8) {
        const std::uint64_t v = seed_rng_();
        for (std::size_t b = 0; b < 8; ++b) raw[i + b] = static_cast<std::uint8_t>(v >> (8 * b));
    }
    return encode_letters(raw);
}

std::uint64_t GameEngine::next_session_seed() {
    if (!options_.seed) {
        std::random_device rd;
        return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    }
    std::lock_guard lock(seed_mu_);
    return seed_rng_();
}

const ImageRecord* GameEngine::image_by_key(const std::string& key) const {
    const auto it = key_index_.find(key);
    return it == key_index_.end() ? nullptr : &catalog_->records()[it->second];
}

std::string GameEngine::create_session(const Identity& identity) {
    if (identity.user) {
        const auto account = store_.find_user(identity.user->id);
        if (!account) throw Error(Errc::UnknownUser, "no account with id " + std::to_string(identity.user->id));
    }
    maybe_purge();

    auto session = std::make_shared<Session>();
    const std::string token = next_token();
    session->token_hash = token_digest(token);
    session->identity = identity;
    session->created_at = session->last_seen = session->last_persisted_touch = now();
    session->rng.seed(next_session_seed());

    store_.save_session({session->token_hash, identity.user_id(), session->created_at, session->last_seen});
    std::unique_lock lock(sessions_mu_);
    sessions_.emplace(session->token_hash, std::move(session));
    return token;
}

std::shared_ptr<GameEngine::Session> GameEngine::find_session(const std::string& token) {
    if (token.empty()) return nullptr;
    const std::string hash = token_digest(token);
    const Timestamp t = now();
    std::shared_ptr<Session> session;
    {
        std::shared_lock lock(sessions_mu_);
        const auto it = sessions_.find(hash);
        if (it != sessions_.end()) session = it->second;
    }
    if (session) {
        std::lock_guard slock(session->mu);
        if (t - session->last_seen > options_.session_ttl) return nullptr;
        session->last_seen = std::max(session->last_seen, t);
        if (t - session->last_persisted_touch > std::chrono::minutes(1)) {
            session->last_persisted_touch = t;
            store_.touch_session(hash, t);
        }
        return session;
    }

    // Known to the store but not to this process (e.g. after a restart):
    // the identity survives, pending rounds do not.
    const auto record = store_.load_session(hash);
    if (!record || t - record->last_seen > options_.session_ttl) return nullptr;
    session = std::make_shared<Session>();
    session->token_hash = hash;
    if (record->user_id) {
        const auto account = store_.find_user(*record->user_id);
        if (!account) return nullptr;
        session->identity = Identity::registered(account->ref());
    }
    session->created_at = record->created_at;
    session->last_seen = session->last_persisted_touch = t;
    session->rng.seed(next_session_seed());
    store_.touch_session(hash, t);

    std::unique_lock lock(sessions_mu_);
    auto [it, inserted] = sessions_.emplace(hash, std::move(session));
    return it->second;
}

std::shared_ptr<GameEngine::Session> GameEngine::require_session(const std::string& token) {
    auto session = find_session(token);
    if (!session) throw Error(Errc::UnknownSession, "unknown or expired session");
    return session;
}

std::optional<Identity> GameEngine::session_identity(const std::string& token) {
    auto session = find_session(token);
    if (!session) return std::nullopt;
    std::lock_guard lock(session->mu);
    return session->identity;
}

std::size_t GameEngine::pick_year_image(Session& s) {
    const std::size_t n = catalog_->size();
    const std::size_t window = options_.exclusion_window;
    if (window > 0 && s.recent_counts.size() >= n) {
        s.recent_images.clear();
        s.recent_counts.clear();
    }
    std::uniform_int_distribution<std::size_t> dist(0, n - 1);
    std::size_t pick = 0;
    if (s.recent_counts.size() * 2 <= n) {
        do {
            pick = dist(s.rng);
        } while (s.recent_counts.contains(pick));
    } else {
        std::vector<std::size_t> allowed;
        allowed.reserve(n - s.recent_counts.size());
        for (std::size_t i = 0; i < n; ++i) {
            if (!s.recent_counts.contains(i)) allowed.push_back(i);
        }
        pick = allowed[std::uniform_int_distribution<std::size_t>(0, allowed.size() - 1)(s.rng)];
    }
    if (window > 0) {
        s.recent_images.push_back(pick);
        ++s.recent_counts[pick];
        while (s.recent_images.size() > window) {
            const auto old = s.recent_images.front();
            s.recent_images.pop_front();
            if (--s.recent_counts[old] == 0) s.recent_counts.erase(old);
        }
    }
    return pick;
}

void GameEngine::remember_round(Session& s, std::string round_id, RoundEntry entry) {
    s.round_order.push_back(round_id);
    s.rounds.emplace(std::move(round_id), std::move(entry));
    while (s.round_order.size() > options_.max_remembered_rounds) {
        s.rounds.erase(s.round_order.front());
        s.round_order.pop_front();
    }
}

YearRoundView GameEngine::next_year_round(const std::string& token) {
    if (catalog_->empty()) throw Error(Errc::EmptyCatalog, "catalog has no images");
    auto session = require_session(token);
    std::lock_guard lock(session->mu);

    const std::size_t image = pick_year_image(*session);
    std::string round_id = next_token();
    store_.record_served({round_id, GameMode::GuessYear, session->identity.user_id(),
                          {catalog_->records()[image].img_id}, now()});
    remember_round(*session, round_id, {YearKey{image}, false});
    return {std::move(round_id), keys_[image]};
}

TimelineRoundView GameEngine::next_timeline_round(const std::string& token) {
    if (catalog_->empty()) throw Error(Errc::EmptyCatalog, "catalog has no images");
    if (catalog_->distinct_years() < 2) throw Error(Errc::NoDistinctYears, "catalog needs two distinct years");
    auto session = require_session(token);
    std::lock_guard lock(session->mu);

    std::uniform_int_distribution<std::size_t> dist(0, catalog_->size() - 1);
    std::size_t first = 0;
    std::size_t second = 0;
    do {
        first = dist(session->rng);
        second = dist(session->rng);
    } while (year_of(*catalog_, first) == year_of(*catalog_, second));
    if (std::bernoulli_distribution(0.5)(session->rng)) std::swap(first, second);

    std::string round_id = next_token();
    store_.record_served({round_id,
                          GameMode::Timeline,
                          session->identity.user_id(),
                          {catalog_->records()[first].img_id, catalog_->records()[second].img_id},
                          now()});
    remember_round(*session, round_id, {TimelineKey{first, second}, false});
    return {std::move(round_id), keys_[first], keys_[second]};
}

YearResult GameEngine::submit_year_guess(const std::string& token, const std::string& round_id, int guess_value) {
    const YearGuess guess(guess_value);
    auto session = require_session(token);
    std::lock_guard lock(session->mu);

    const auto it = session->rounds.find(round_id);
    if (it == session->rounds.end() || !std::holds_alternative<YearKey>(it->second.key)) {
        throw Error(Errc::UnknownRound, "no such year round in this session");
    }
    if (it->second.answered) throw Error(Errc::RoundAlreadyAnswered, "round already answered");

    const auto& record = catalog_->records()[std::get<YearKey>(it->second.key).image];
    YearResult result{
        .play_id = 0,
        .correct = false,
        .correct_year = record.gt_year,
        .title = record.title.empty() ? record.img_id : record.title,
        .points = {score_year_static(guess, record.gt_year), score_year_dynamic(guess, record.gt_year)},
        .feedback = feedback_year(record.gt_year, record.title, record.img_id),
    };
    result.correct = result.points.static_points == kStaticAward;

    GamePlay play;
    play.round_id = round_id;
    play.mode = GameMode::GuessYear;
    play.user_id = session->identity.user_id();
    play.image_ids = {record.img_id};
    play.input = guess;
    play.correct = result.correct;
    play.static_points = result.points.static_points;
    play.dynamic_points = result.points.dynamic_points;
    play.played_at = now();
    result.play_id = store_.record_play(play);
    it->second.answered = true;
    return result;
}

TimelineResult GameEngine::submit_timeline_choice(const std::string& token, const std::string& round_id,
                                                  TimelineChoice choice) {
    auto session = require_session(token);
    std::lock_guard lock(session->mu);

    const auto it = session->rounds.find(round_id);
    if (it == session->rounds.end() || !std::holds_alternative<TimelineKey>(it->second.key)) {
        throw Error(Errc::UnknownRound, "no such timeline round in this session");
    }
    if (it->second.answered) throw Error(Errc::RoundAlreadyAnswered, "round already answered");

    const auto key = std::get<TimelineKey>(it->second.key);
    const auto& left = catalog_->records()[key.left];
    const auto& right = catalog_->records()[key.right];
    TimelineResult result{0, score_timeline(choice, left.gt_year, right.gt_year), left.gt_year, right.gt_year};

    GamePlay play;
    play.round_id = round_id;
    play.mode = GameMode::Timeline;
    play.user_id = session->identity.user_id();
    play.image_ids = {left.img_id, right.img_id};
    play.input = choice;
    play.correct = result.outcome.correct;
    play.static_points = result.outcome.points.static_points;
    play.dynamic_points = result.outcome.points.dynamic_points;
    play.played_at = now();
    result.play_id = store_.record_play(play);
    it->second.answered = true;
    return result;
}

bool GameEngine::is_pending(const std::string& token, const std::string& round_id) {
    auto session = find_session(token);
    if (!session) return false;
    std::lock_guard lock(session->mu);
    const auto it = session->rounds.find(round_id);
    return it != session->rounds.end() && !it->second.answered;
}

std::size_t GameEngine::purge_idle() {
    const Timestamp cutoff = now() - options_.session_ttl;
    std::size_t removed = 0;
    {
        std::unique_lock lock(sessions_mu_);
        for (auto it = sessions_.begin(); it != sessions_.end();) {
            bool idle = false;
            {
                std::lock_guard slock(it->second->mu);
                idle = it->second->last_seen < cutoff;
            }
            if (idle) {
                it = sessions_.erase(it);
                ++removed;
            } else {
                ++it;
            }
        }
    }
    store_.purge_sessions(cutoff);
    return removed;
}

void GameEngine::maybe_purge() {
    const Timestamp t = now();
    {
        std::lock_guard lock(seed_mu_);
        if (t - last_purge_ < std::chrono::minutes(1)) return;
        last_purge_ = t;
    }
    purge_idle();
}

std::size_t GameEngine::session_count() const {
    std::shared_lock lock(sessions_mu_);
    return sessions_.size();
}

}  // namespace photoyear
