#include <sqlite3.h>

#include <cstring>

#include "photoyear/store.hpp"

namespace photoyear {

namespace {

/// Prepared statement bound to one call; finalized on scope exit.
class Stmt {
public:
    Stmt(sqlite3* db, std::string_view sql) : db_(db) {
        if (sqlite3_prepare_v2(db, sql.data(), static_cast<int>(sql.size()), &stmt_, nullptr) != SQLITE_OK) {
            throw Error(Errc::StorageFailure, std::string("prepare failed: ") + sqlite3_errmsg(db));
        }
    }
    ~Stmt() { sqlite3_finalize(stmt_); }
    Stmt(const Stmt&) = delete;
    Stmt& operator=(const Stmt&) = delete;

    Stmt& bind(int i, std::int64_t v) {
        sqlite3_bind_int64(stmt_, i, v);
        return *this;
    }
    Stmt& bind(int i, std::string_view v) {
        sqlite3_bind_text(stmt_, i, v.data(), static_cast<int>(v.size()), SQLITE_TRANSIENT);
        return *this;
    }
    Stmt& bind_null(int i) {
        sqlite3_bind_null(stmt_, i);
        return *this;
    }
    template <typename T>
    Stmt& bind_opt(int i, const std::optional<T>& v) {
        return v ? bind(i, *v) : bind_null(i);
    }

    /// True when a row is available; throws on error.
    bool step() {
        const int rc = sqlite3_step(stmt_);
        if (rc == SQLITE_ROW) return true;
        if (rc == SQLITE_DONE) return false;
        const int ext = sqlite3_extended_errcode(db_);
        const std::string msg = sqlite3_errmsg(db_);
        if (ext == SQLITE_CONSTRAINT_FOREIGNKEY) throw Error(Errc::ForeignKeyViolation, msg);
        throw Error(Errc::StorageFailure, msg + " (code " + std::to_string(ext) + ")");
    }

    void reset() {
        sqlite3_reset(stmt_);
        sqlite3_clear_bindings(stmt_);
    }
    sqlite3_stmt* raw() const { return stmt_; }

    std::int64_t i64(int col) const { return sqlite3_column_int64(stmt_, col); }
    bool is_null(int col) const { return sqlite3_column_type(stmt_, col) == SQLITE_NULL; }
    std::string text(int col) const {
        const auto* p = sqlite3_column_text(stmt_, col);
        return p ? std::string(reinterpret_cast<const char*>(p), sqlite3_column_bytes(stmt_, col)) : std::string();
    }
    std::optional<std::int64_t> opt_i64(int col) const {
        return is_null(col) ? std::nullopt : std::optional<std::int64_t>(i64(col));
    }

private:
    sqlite3* db_;
    sqlite3_stmt* stmt_ = nullptr;
};

void exec(sqlite3* db, const std::string& sql) {
    char* err = nullptr;
    if (sqlite3_exec(db, sql.c_str(), nullptr, nullptr, &err) != SQLITE_OK) {
        std::string msg = err ? err : "unknown";
        sqlite3_free(err);
        throw Error(Errc::StorageFailure, "sql failed: " + msg);
    }
}

/// BEGIN IMMEDIATE ... COMMIT, rolled back unless commit() ran.
class Transaction {
public:
    explicit Transaction(sqlite3* db) : db_(db) { exec(db_, "BEGIN IMMEDIATE"); }
    ~Transaction() {
        if (!done_) sqlite3_exec(db_, "ROLLBACK", nullptr, nullptr, nullptr);
    }
    void commit() {
        exec(db_, "COMMIT");
        done_ = true;
    }

private:
    sqlite3* db_;
    bool done_ = false;
};

std::size_t utf8_length(std::string_view s) {
    std::size_t n = 0;
    for (unsigned char c : s) n += (c & 0xC0) != 0x80;
    return n;
}

std::string strip_scheme(const std::string& location) {
    constexpr std::string_view kScheme = "sqlite://";
    if (location.rfind(kScheme, 0) == 0) return location.substr(kScheme.size());
    return location;
}

constexpr const char* kPlayColumns =
    "id, round_id, mode, user_id, image_id, image2_id, guess_year, choice, correct, static_points, dynamic_cents, "
    "played_at";

GamePlay read_play(const Stmt& s) {
    GamePlay p;
    p.play_id = s.i64(0);
    p.round_id = s.text(1);
    p.mode = parse_game_mode(s.text(2)).value_or(GameMode::GuessYear);
    p.user_id = s.opt_i64(3);
    p.image_ids.push_back(s.text(4));
    if (!s.is_null(5)) p.image_ids.push_back(s.text(5));
    if (p.mode == GameMode::GuessYear) {
        p.input = YearGuess(static_cast<int>(s.i64(6)));
    } else {
        p.input = parse_timeline_choice(s.text(7)).value_or(TimelineChoice::Left);
    }
    p.correct = s.i64(8) != 0;
    p.static_points = static_cast<int>(s.i64(9));
    p.dynamic_points = Cents::from_units(s.i64(10));
    p.played_at = from_millis(s.i64(11));
    return p;
}

void append_filter(std::string& sql, const PlayFilter& f, const char* time_col) {
    sql += " WHERE 1 = 1";
    if (f.from) sql += std::string(" AND ") + time_col + " >= :from";
    if (f.to) sql += std::string(" AND ") + time_col + " < :to";
    if (!f.include_demo) sql += " AND user_id IS NOT NULL";
    if (f.user) sql += " AND user_id = :user";
}

}  // namespace

void check_credentials_policy(std::string_view username, std::string_view password) {
    const auto len = utf8_length(username);
    bool printable = true;
    for (unsigned char c : username) printable = printable && c >= 0x20 && c != 0x7F;
    if (len == 0 || len > kMaxUsernameLength || !printable) {
        throw Error(Errc::InvalidUsername, "username must be 1-64 printable characters");
    }
    if (utf8_length(password) < kMinPasswordLength) {
        throw Error(Errc::WeakPassword, "password must be at least 8 characters");
    }
}

SqliteStore::SqliteStore(const std::string& location, PasswordHasher hasher)
    : hasher_(std::move(hasher)), clock_([] { return std::chrono::time_point_cast<std::chrono::milliseconds>(std::chrono::system_clock::now()); }) {
    const std::string path = strip_scheme(location);
    const int flags = SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE | SQLITE_OPEN_FULLMUTEX;
    if (sqlite3_open_v2(path.c_str(), &db_, flags, nullptr) != SQLITE_OK) {
        std::string msg = db_ ? sqlite3_errmsg(db_) : "out of memory";
        sqlite3_close(db_);
        db_ = nullptr;
        throw Error(Errc::StorageFailure, "cannot open database " + path + ": " + msg);
    }
    sqlite3_extended_result_codes(db_, 1);
    sqlite3_busy_timeout(db_, 5000);
    exec(db_, "PRAGMA foreign_keys = ON");
    if (path != ":memory:") exec(db_, "PRAGMA journal_mode = WAL");
    exec(db_, "PRAGMA synchronous = FULL");
    // Unknown-user logins verify against this so both failure paths cost the same.
    dummy_hash_ = hasher_.hash("photoyear-timing-balance");
}

SqliteStore::~SqliteStore() { sqlite3_close_v2(db_); }

int SqliteStore::schema_version() {
    std::lock_guard lock(mu_);
    Stmt s(db_, "PRAGMA user_version");
    s.step();
    return static_cast<int>(s.i64(0));
}

void SqliteStore::migrate() {
    const auto& migrations = schema_migrations();
    const int current = schema_version();
    std::lock_guard lock(mu_);
    for (int v = current; v < static_cast<int>(migrations.size()); ++v) {
        Transaction tx(db_);
        exec(db_, std::string(migrations[static_cast<std::size_t>(v)]));
        exec(db_, "PRAGMA user_version = " + std::to_string(v + 1));
        tx.commit();
    }
}

UserAccount SqliteStore::create_user(std::string_view username, std::string_view password,
                                     std::optional<AgeBracket> age_bracket) {
    check_credentials_policy(username, password);
    UserAccount account;
    account.username = std::string(username);
    account.credential_hash = hasher_.hash(password);
    account.age_bracket = age_bracket;
    account.created_at = clock_();

    std::lock_guard lock(mu_);
    Stmt exists(db_, "SELECT 1 FROM users WHERE username = ?1");
    exists.bind(1, username);
    if (exists.step()) throw Error(Errc::UsernameTaken, "username already taken");

    Stmt s(db_, "INSERT INTO users (username, credential_hash, age_bracket, created_at) VALUES (?1, ?2, ?3, ?4)");
    s.bind(1, account.username).bind(2, account.credential_hash).bind(4, to_millis(account.created_at));
    if (age_bracket) {
        s.bind(3, to_string(*age_bracket));
    } else {
        s.bind_null(3);
    }
    try {
        s.step();
    } catch (const Error&) {
        if (sqlite3_extended_errcode(db_) == SQLITE_CONSTRAINT_UNIQUE) {
            throw Error(Errc::UsernameTaken, "username already taken");
        }
        throw;
    }
    account.id = sqlite3_last_insert_rowid(db_);
    return account;
}

UserRef SqliteStore::authenticate(std::string_view username, std::string_view password) {
    std::optional<UserRef> ref;
    std::string hash;
    {
        std::lock_guard lock(mu_);
        Stmt s(db_, "SELECT id, username, credential_hash FROM users WHERE username = ?1");
        s.bind(1, username);
        if (s.step()) {
            ref = UserRef{s.i64(0), s.text(1)};
            hash = s.text(2);
        }
    }
    const bool ok = hasher_.verify(password, ref ? hash : dummy_hash_);
    if (!ref || !ok) throw Error(Errc::AuthFailed, "invalid username or password");
    return *ref;
}

namespace {

UserAccount read_user(const Stmt& s) {
    UserAccount u;
    u.id = s.i64(0);
    u.username = s.text(1);
    u.credential_hash = s.text(2);
    if (!s.is_null(3)) u.age_bracket = parse_age_bracket(s.text(3));
    u.created_at = from_millis(s.i64(4));
    return u;
}

}  // namespace

std::optional<UserAccount> SqliteStore::find_user(UserId id) {
    std::lock_guard lock(mu_);
    Stmt s(db_, "SELECT id, username, credential_hash, age_bracket, created_at FROM users WHERE id = ?1");
    s.bind(1, id);
    if (!s.step()) return std::nullopt;
    return read_user(s);
}

std::vector<UserAccount> SqliteStore::users() {
    std::lock_guard lock(mu_);
    Stmt s(db_, "SELECT id, username, credential_hash, age_bracket, created_at FROM users ORDER BY id");
    std::vector<UserAccount> out;
    while (s.step()) out.push_back(read_user(s));
    return out;
}

void SqliteStore::upsert_images(const Catalog& catalog) {
    std::lock_guard lock(mu_);
    Transaction tx(db_);
    Stmt s(db_,
           "INSERT INTO images (img_id, gt_year, date_taken, date_granularity, url, title, needs_review) "
           "VALUES (?1, ?2, ?3, ?4, ?5, ?6, ?7) "
           "ON CONFLICT(img_id) DO UPDATE SET gt_year = excluded.gt_year, date_taken = excluded.date_taken, "
           "date_granularity = excluded.date_granularity, url = excluded.url, title = excluded.title, "
           "needs_review = excluded.needs_review");
    for (const auto& r : catalog.records()) {
        s.reset();
        s.bind(1, r.img_id)
            .bind(2, r.gt_year.value())
            .bind(3, r.date_taken)
            .bind(4, r.date_granularity)
            .bind(5, r.url)
            .bind(6, r.title)
            .bind(7, r.needs_review ? 1 : 0);
        s.step();
    }
    tx.commit();
}

Catalog SqliteStore::images() {
    std::lock_guard lock(mu_);
    Stmt s(db_,
           "SELECT img_id, gt_year, date_taken, date_granularity, url, title, needs_review FROM images ORDER BY "
           "rowid");
    Catalog catalog;
    while (s.step()) {
        catalog.add(ImageRecord{
            .img_id = s.text(0),
            .gt_year = Year(static_cast<int>(s.i64(1))),
            .date_taken = s.text(2),
            .date_granularity = static_cast<int>(s.i64(3)),
            .url = s.text(4),
            .title = s.text(5),
            .needs_review = s.i64(6) != 0,
            .asset = std::nullopt,
        });
    }
    return catalog;
}

std::int64_t SqliteStore::record_play(const GamePlay& play) {
    const std::size_t want_images = play.mode == GameMode::GuessYear ? 1 : 2;
    if (play.image_ids.size() != want_images) {
        throw Error(Errc::InvalidRequest, "play has wrong number of image ids for its mode");
    }
    const bool input_ok = play.mode == GameMode::GuessYear ? std::holds_alternative<YearGuess>(play.input)
                                                           : std::holds_alternative<TimelineChoice>(play.input);
    if (!input_ok) throw Error(Errc::InvalidRequest, "play input does not match its mode");

    std::lock_guard lock(mu_);
    Transaction tx(db_);
    Stmt s(db_,
           "INSERT INTO game_plays (round_id, mode, user_id, image_id, image2_id, guess_year, choice, correct, "
           "static_points, dynamic_cents, played_at) VALUES (?1, ?2, ?3, ?4, ?5, ?6, ?7, ?8, ?9, ?10, ?11)");
    if (play.round_id.empty()) {
        s.bind_null(1);
    } else {
        s.bind(1, play.round_id);
    }
    s.bind(2, to_string(play.mode)).bind_opt(3, play.user_id).bind(4, play.image_ids[0]);
    if (play.mode == GameMode::GuessYear) {
        s.bind_null(5).bind(6, std::get<YearGuess>(play.input).value()).bind_null(7);
    } else {
        s.bind(5, play.image_ids[1]).bind_null(6).bind(7, to_string(std::get<TimelineChoice>(play.input)));
    }
    s.bind(8, play.correct ? 1 : 0)
        .bind(9, play.static_points)
        .bind(10, play.dynamic_points.units())
        .bind(11, to_millis(play.played_at));
    try {
        s.step();
    } catch (const Error& e) {
        if (e.code() == Errc::StorageFailure && sqlite3_extended_errcode(db_) == SQLITE_CONSTRAINT_UNIQUE) {
            throw Error(Errc::RoundAlreadyAnswered, "round already recorded");
        }
        throw;
    }
    const auto id = sqlite3_last_insert_rowid(db_);
    tx.commit();
    return id;
}

std::optional<GamePlay> SqliteStore::find_play(std::int64_t play_id) {
    std::lock_guard lock(mu_);
    Stmt s(db_, std::string("SELECT ") + kPlayColumns + " FROM game_plays WHERE id = ?1");
    s.bind(1, play_id);
    if (!s.step()) return std::nullopt;
    return read_play(s);
}

namespace {

template <typename Bindable>
void bind_filter_values(Bindable& s, sqlite3_stmt* raw, const PlayFilter& f) {
    if (f.from) s.bind(sqlite3_bind_parameter_index(raw, ":from"), to_millis(*f.from));
    if (f.to) s.bind(sqlite3_bind_parameter_index(raw, ":to"), to_millis(*f.to));
    if (f.user) s.bind(sqlite3_bind_parameter_index(raw, ":user"), *f.user);
}

}  // namespace

std::vector<GamePlay> SqliteStore::plays(const PlayFilter& filter) {
    std::string sql = std::string("SELECT ") + kPlayColumns + " FROM game_plays";
    append_filter(sql, filter, "played_at");
    sql += " ORDER BY id";
    std::lock_guard lock(mu_);
    Stmt s(db_, sql);
    bind_filter_values(s, s.raw(), filter);
    std::vector<GamePlay> out;
    while (s.step()) out.push_back(read_play(s));
    return out;
}

std::size_t SqliteStore::play_count() {
    std::lock_guard lock(mu_);
    Stmt s(db_, "SELECT COUNT(*) FROM game_plays");
    s.step();
    return static_cast<std::size_t>(s.i64(0));
}

void SqliteStore::record_served(const ServedRound& round) {
    std::lock_guard lock(mu_);
    Stmt s(db_,
           "INSERT INTO served_rounds (round_id, mode, user_id, image_id, image2_id, served_at) "
           "VALUES (?1, ?2, ?3, ?4, ?5, ?6)");
    s.bind(1, round.round_id).bind(2, to_string(round.mode)).bind_opt(3, round.user_id).bind(4, round.image_ids.at(0));
    if (round.image_ids.size() > 1) {
        s.bind(5, round.image_ids[1]);
    } else {
        s.bind_null(5);
    }
    s.bind(6, to_millis(round.served_at));
    s.step();
}

std::vector<ServedRound> SqliteStore::unanswered_rounds(const PlayFilter& filter) {
    std::string sql =
        "SELECT round_id, mode, user_id, image_id, image2_id, served_at FROM served_rounds sr";
    append_filter(sql, filter, "served_at");
    sql += " AND NOT EXISTS (SELECT 1 FROM game_plays p WHERE p.round_id = sr.round_id) ORDER BY served_at, round_id";
    std::lock_guard lock(mu_);
    Stmt s(db_, sql);
    bind_filter_values(s, s.raw(), filter);
    std::vector<ServedRound> out;
    while (s.step()) {
        ServedRound r;
        r.round_id = s.text(0);
        r.mode = parse_game_mode(s.text(1)).value_or(GameMode::GuessYear);
        r.user_id = s.opt_i64(2);
        r.image_ids.push_back(s.text(3));
        if (!s.is_null(4)) r.image_ids.push_back(s.text(4));
        r.served_at = from_millis(s.i64(5));
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<LeaderboardEntry> SqliteStore::leaderboard(PointKind kind, int limit) {
    if (limit < 1) throw Error(Errc::InvalidRequest, "leaderboard limit must be at least 1");
    const std::string order = kind == PointKind::Static ? "total_static DESC" : "total_dynamic DESC";
    const std::string sql =
        "SELECT u.username, COALESCE(SUM(p.static_points), 0) AS total_static, "
        "COALESCE(SUM(p.dynamic_cents), 0) AS total_dynamic, MIN(p.played_at) AS first_play "
        "FROM users u LEFT JOIN game_plays p ON p.user_id = u.id GROUP BY u.id ORDER BY " +
        order + ", first_play IS NULL, first_play ASC, u.username COLLATE BINARY ASC, u.id ASC LIMIT ?1";
    std::lock_guard lock(mu_);
    Stmt s(db_, sql);
    s.bind(1, limit);
    std::vector<LeaderboardEntry> out;
    while (s.step()) {
        LeaderboardEntry e;
        e.rank = static_cast<int>(out.size()) + 1;
        e.username = s.text(0);
        e.total_static = s.i64(1);
        e.total_dynamic = Cents::from_units(s.i64(2));
        out.push_back(std::move(e));
    }
    return out;
}

void SqliteStore::save_session(const SessionRecord& session) {
    std::lock_guard lock(mu_);
    Stmt s(db_,
           "INSERT INTO sessions (token_hash, user_id, created_at, last_seen) VALUES (?1, ?2, ?3, ?4) "
           "ON CONFLICT(token_hash) DO UPDATE SET last_seen = excluded.last_seen");
    s.bind(1, session.token_hash)
        .bind_opt(2, session.user_id)
        .bind(3, to_millis(session.created_at))
        .bind(4, to_millis(session.last_seen));
    s.step();
}

std::optional<SessionRecord> SqliteStore::load_session(const std::string& token_hash) {
    std::lock_guard lock(mu_);
    Stmt s(db_, "SELECT token_hash, user_id, created_at, last_seen FROM sessions WHERE token_hash = ?1");
    s.bind(1, token_hash);
    if (!s.step()) return std::nullopt;
    return SessionRecord{s.text(0), s.opt_i64(1), from_millis(s.i64(2)), from_millis(s.i64(3))};
}

void SqliteStore::touch_session(const std::string& token_hash, Timestamp seen) {
    std::lock_guard lock(mu_);
    Stmt s(db_, "UPDATE sessions SET last_seen = ?2 WHERE token_hash = ?1 AND last_seen < ?2");
    s.bind(1, token_hash).bind(2, to_millis(seen));
    s.step();
}

std::size_t SqliteStore::purge_sessions(Timestamp idle_before) {
    std::lock_guard lock(mu_);
    Stmt s(db_, "DELETE FROM sessions WHERE last_seen < ?1");
    s.bind(1, to_millis(idle_before));
    s.step();
    return static_cast<std::size_t>(sqlite3_changes(db_));
}

std::unique_ptr<Store> open_store(const std::string& location, PasswordHasher hasher) {
    auto store = std::make_unique<SqliteStore>(location, std::move(hasher));
    store->migrate();
    return store;
}

}  // namespace photoyear
