#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "photoyear/catalog.hpp"
#include "photoyear/model.hpp"
#include "photoyear/password.hpp"

struct sqlite3;

namespace photoyear {

inline constexpr std::size_t kMinPasswordLength = 8;
inline constexpr std::size_t kMaxUsernameLength = 64;

struct PlayFilter {
    std::optional<Timestamp> from;  // inclusive
    std::optional<Timestamp> to;    // exclusive
    bool include_demo = true;
    std::optional<UserId> user;
};

struct SessionRecord {
    /// SHA-256 of the bearer token; the token itself is never stored.
    std::string token_hash;
    std::optional<UserId> user_id;
    Timestamp created_at;
    Timestamp last_seen;
};

/// Repository over users, images, sessions and gameplay logs.
/// Implementations must be safe to call from many threads.
class Store {
public:
    virtual ~Store() = default;

    /// Brings the schema to the latest version. Idempotent.
    virtual void migrate() = 0;
    virtual int schema_version() = 0;

    /// Throws UsernameTaken, WeakPassword, InvalidUsername.
    virtual UserAccount create_user(std::string_view username, std::string_view password,
                                    std::optional<AgeBracket> age_bracket) = 0;
    /// Throws AuthFailed for unknown users and wrong passwords alike.
    virtual UserRef authenticate(std::string_view username, std::string_view password) = 0;
    virtual std::optional<UserAccount> find_user(UserId id) = 0;
    virtual std::vector<UserAccount> users() = 0;

    virtual void upsert_images(const Catalog& catalog) = 0;
    /// The images table as a catalog (no assets attached).
    virtual Catalog images() = 0;

    /// Throws ForeignKeyViolation for unknown users/images,
    /// RoundAlreadyAnswered when round_id was already recorded.
    virtual std::int64_t record_play(const GamePlay& play) = 0;
    virtual std::optional<GamePlay> find_play(std::int64_t play_id) = 0;
    virtual std::vector<GamePlay> plays(const PlayFilter& filter = {}) = 0;
    virtual std::size_t play_count() = 0;

    virtual void record_served(const ServedRound& round) = 0;
    /// Served rounds with no matching play.
    virtual std::vector<ServedRound> unanswered_rounds(const PlayFilter& filter = {}) = 0;

    /// Registered users only, sorted by the requested total (descending),
    /// then earliest first play, then username.
    virtual std::vector<LeaderboardEntry> leaderboard(PointKind kind, int limit) = 0;

    virtual void save_session(const SessionRecord& session) = 0;
    virtual std::optional<SessionRecord> load_session(const std::string& token_hash) = 0;
    virtual void touch_session(const std::string& token_hash, Timestamp seen) = 0;
    virtual std::size_t purge_sessions(Timestamp idle_before) = 0;
};

/// Checks username/password policy; throws InvalidUsername or WeakPassword.
void check_credentials_policy(std::string_view username, std::string_view password);

/// Embedded SQLite backend. One serialized connection; WAL journal with
/// synchronous=FULL so an acknowledged write survives a crash.
class SqliteStore final : public Store {
public:
    /// `location` is a file path, "sqlite://<path>" or ":memory:".
    SqliteStore(const std::string& location, PasswordHasher hasher = PasswordHasher());
    ~SqliteStore() override;

    SqliteStore(const SqliteStore&) = delete;
    SqliteStore& operator=(const SqliteStore&) = delete;

    void migrate() override;
    int schema_version() override;

    UserAccount create_user(std::string_view username, std::string_view password,
                            std::optional<AgeBracket> age_bracket) override;
    UserRef authenticate(std::string_view username, std::string_view password) override;
    std::optional<UserAccount> find_user(UserId id) override;
    std::vector<UserAccount> users() override;

    void upsert_images(const Catalog& catalog) override;
    Catalog images() override;

    std::int64_t record_play(const GamePlay& play) override;
    std::optional<GamePlay> find_play(std::int64_t play_id) override;
    std::vector<GamePlay> plays(const PlayFilter& filter) override;
    std::size_t play_count() override;

    void record_served(const ServedRound& round) override;
    std::vector<ServedRound> unanswered_rounds(const PlayFilter& filter) override;

    std::vector<LeaderboardEntry> leaderboard(PointKind kind, int limit) override;

    void save_session(const SessionRecord& session) override;
    std::optional<SessionRecord> load_session(const std::string& token_hash) override;
    void touch_session(const std::string& token_hash, Timestamp seen) override;
    std::size_t purge_sessions(Timestamp idle_before) override;

    /// Clock used for created_at on new accounts; defaults to system time.
    void set_clock(std::function<Timestamp()> clock) { clock_ = std::move(clock); }

private:
    std::mutex mu_;
    sqlite3* db_ = nullptr;
    PasswordHasher hasher_;
    std::string dummy_hash_;
    std::function<Timestamp()> clock_;
};

/// Ordered schema migrations; index i upgrades version i to i+1.
const std::vector<std::string_view>& schema_migrations();

std::unique_ptr<Store> open_store(const std::string& location, PasswordHasher hasher = PasswordHasher());

}  // namespace photoyear
