#include "photoyear/store.hpp"

namespace photoyear {

const std::vector<std::string_view>& schema_migrations() {
    static const std::vector<std::string_view> migrations = {
        // 1: users, images, game_plays, sessions, served_rounds
        R"sql(
CREATE TABLE users (
    id              INTEGER PRIMARY KEY,
    username        TEXT    NOT NULL UNIQUE COLLATE NOCASE,
    credential_hash TEXT    NOT NULL,
    age_bracket     TEXT    NULL CHECK (age_bracket IN ('14-18', '19-25', '26-40', '41+')),
    created_at      INTEGER NOT NULL
);

CREATE TABLE images (
    img_id           TEXT    PRIMARY KEY,
    gt_year          INTEGER NOT NULL CHECK (gt_year BETWEEN 1930 AND 1999),
    date_taken       TEXT    NOT NULL,
    date_granularity INTEGER NOT NULL,
    url              TEXT    NOT NULL,
    title            TEXT    NOT NULL,
    needs_review     INTEGER NOT NULL DEFAULT 0
);

CREATE TABLE game_plays (
    id            INTEGER PRIMARY KEY,
    round_id      TEXT    NULL UNIQUE,
    mode          TEXT    NOT NULL CHECK (mode IN ('guess_the_year', 'timeline')),
    user_id       INTEGER NULL REFERENCES users(id),
    image_id      TEXT    NOT NULL REFERENCES images(img_id),
    image2_id     TEXT    NULL REFERENCES images(img_id),
    guess_year    INTEGER NULL,
    choice        TEXT    NULL,
    correct       INTEGER NOT NULL CHECK (correct IN (0, 1)),
    static_points INTEGER NOT NULL,
    dynamic_cents INTEGER NOT NULL,
    played_at     INTEGER NOT NULL,
    CHECK ((mode = 'guess_the_year' AND image2_id IS NULL AND guess_year IS NOT NULL AND choice IS NULL)
        OR (mode = 'timeline' AND image2_id IS NOT NULL AND guess_year IS NULL AND choice IN ('left', 'right')))
);
CREATE INDEX game_plays_user ON game_plays(user_id);
CREATE INDEX game_plays_time ON game_plays(played_at);

CREATE TABLE sessions (
    token_hash TEXT    PRIMARY KEY,
    user_id    INTEGER NULL REFERENCES users(id),
    created_at INTEGER NOT NULL,
    last_seen  INTEGER NOT NULL
);

CREATE TABLE served_rounds (
    round_id  TEXT    PRIMARY KEY,
    mode      TEXT    NOT NULL CHECK (mode IN ('guess_the_year', 'timeline')),
    user_id   INTEGER NULL REFERENCES users(id),
    image_id  TEXT    NOT NULL REFERENCES images(img_id),
    image2_id TEXT    NULL REFERENCES images(img_id),
    served_at INTEGER NOT NULL
);
CREATE INDEX served_rounds_time ON served_rounds(served_at);
)sql",
    };
    return migrations;
}

}  // namespace photoyear
