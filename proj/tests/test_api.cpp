#include <gtest/gtest.h>
#include <httplib.h>

#include <json.hpp>
#include <thread>

#include "photoyear/api.hpp"
#include "photoyear/assets.hpp"
#include "support.hpp"

using namespace photoyear;
using namespace photoyear::testing;
using nlohmann::json;

namespace {

class ApiTest : public ::testing::Test {
protected:
    void SetUp() override { start(); }
    void TearDown() override { shutdown(); }

    void start(ApiConfig config = {}) {
        config.image_dir = dir.path();
        auto store = memory_store();
        EngineOptions opts;
        opts.seed = 2024;
        service = std::make_unique<ApiService>(config, std::move(store), opts);
        port = service->bind("127.0.0.1", 0);
        ASSERT_GT(port, 0);
        server = std::thread([this] { service->listen(); });
        client = std::make_unique<httplib::Client>("127.0.0.1", port);
        client->set_read_timeout(10, 0);
        // Wait until the socket accepts.
        for (int i = 0; i < 100 && !client->Get("/healthz"); ++i) std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }

    void shutdown() {
        if (!service) return;
        service->stop();
        if (server.joinable()) server.join();
        client.reset();
        service.reset();
    }

    void load(std::shared_ptr<Catalog> catalog) {
        catalog_ = catalog;
        service->load(std::move(catalog));
    }

    httplib::Headers auth(const std::string& token) { return {{"Authorization", "Bearer " + token}}; }

    httplib::Result post(const std::string& path, const json& body, const std::string& token = {}) {
        return client->Post(path, token.empty() ? httplib::Headers{} : auth(token), body.dump(), "application/json");
    }
    httplib::Result get(const std::string& path, const std::string& token = {}) {
        return client->Get(path, token.empty() ? httplib::Headers{} : auth(token));
    }

    std::string demo_token() {
        auto r = post("/api/demo", json::object());
        EXPECT_EQ(r->status, 200);
        return json::parse(r->body)["token"];
    }

    std::string register_and_login(const std::string& name, std::optional<std::string> bracket = std::nullopt) {
        json body = {{"username", name}, {"password", "correct-horse-9"}};
        if (bracket) body["age_bracket"] = *bracket;
        EXPECT_EQ(post("/api/register", body)->status, 201);
        auto r = post("/api/login", {{"username", name}, {"password", "correct-horse-9"}});
        EXPECT_EQ(r->status, 200);
        return json::parse(r->body)["token"];
    }

    static std::string error_code(const httplib::Result& r) { return json::parse(r->body)["error"]["code"]; }

    TempDir dir;
    std::unique_ptr<ApiService> service;
    std::thread server;
    std::unique_ptr<httplib::Client> client;
    std::shared_ptr<Catalog> catalog_;
    int port = 0;
};

}  // namespace

TEST_F(ApiTest, NotReadyUntilLoaded) {
    auto r = get("/healthz");
    EXPECT_EQ(r->status, 503);
    EXPECT_EQ(error_code(r), "NotReady");
    EXPECT_EQ(post("/api/demo", json::object())->status, 503);
    load(full_catalog(1));
    EXPECT_EQ(get("/healthz")->status, 200);
}

TEST_F(ApiTest, YearRoundFlow) {
    auto catalog = std::make_shared<Catalog>();
    catalog->add(make_record("normandy", 1944, "Normandy landing craft"));
    load(catalog);
    const auto token = demo_token();

    auto round = get("/api/guess_the_year", token);
    ASSERT_EQ(round->status, 200);
    const auto view = json::parse(round->body);
    EXPECT_EQ(round->body.find("1944"), std::string::npos);
    EXPECT_EQ(round->body.find("normandy"), std::string::npos);
    EXPECT_TRUE(view["image_url"].get<std::string>().starts_with("/images/"));

    auto bad = post("/api/guess_the_year", {{"round_id", view["round_id"]}, {"guess", 2005}}, token);
    EXPECT_EQ(bad->status, 422);
    EXPECT_EQ(error_code(bad), "GuessOutOfRange");
    EXPECT_EQ(post("/api/guess_the_year", {{"round_id", view["round_id"]}, {"guess", "1944"}}, token)->status, 422);
    EXPECT_EQ(post("/api/guess_the_year", {{"round_id", "nope"}, {"guess", 1944}}, token)->status, 404);

    auto ok = post("/api/guess_the_year", {{"round_id", view["round_id"]}, {"guess", 1944}}, token);
    ASSERT_EQ(ok->status, 200);
    const auto result = json::parse(ok->body);
    EXPECT_EQ(result["correct"], true);
    EXPECT_EQ(result["static_points"], 10);
    EXPECT_EQ(result["dynamic_points"], "10.00");
    EXPECT_EQ(result["correct_year"], 1944);
    EXPECT_NE(result["feedback"].get<std::string>().find("Normandy landing craft"), std::string::npos);

    auto again = post("/api/guess_the_year", {{"round_id", view["round_id"]}, {"guess", 1944}}, token);
    EXPECT_EQ(again->status, 409);
    EXPECT_EQ(error_code(again), "RoundAlreadyAnswered");
}

TEST_F(ApiTest, TimelineFlow) {
    load(catalog_of_years({1933, 1930}));
    const auto token = demo_token();
    auto round = get("/api/timeline_challenge", token);
    ASSERT_EQ(round->status, 200);
    EXPECT_EQ(round->body.find("1933"), std::string::npos);
    EXPECT_EQ(round->body.find("1930"), std::string::npos);
    const auto view = json::parse(round->body);

    EXPECT_EQ(post("/api/timeline_challenge", {{"round_id", view["round_id"]}, {"choice", "up"}}, token)->status, 422);
    auto r = post("/api/timeline_challenge", {{"round_id", view["round_id"]}, {"choice", "left"}}, token);
    ASSERT_EQ(r->status, 200);
    const auto result = json::parse(r->body);
    const int left = result["left_year"], right = result["right_year"];
    EXPECT_EQ(result["correct"], left < right);
    EXPECT_EQ(result["dynamic_points"], left < right ? "5.00" : "0.00");
    EXPECT_EQ(result["feedback"], "Left image is from year " + std::to_string(left) +
                                      " and the Right image is from year " + std::to_string(right));
}

TEST_F(ApiTest, AuthRequired) {
    load(full_catalog(1));
    auto r = get("/api/guess_the_year");
    EXPECT_EQ(r->status, 401);
    EXPECT_EQ(error_code(r), "Unauthenticated");
    EXPECT_EQ(get("/api/guess_the_year", "notatoken")->status, 401);
    EXPECT_EQ(get("/api/performance")->status, 401);
}

TEST_F(ApiTest, CookieSessionWorks) {
    load(full_catalog(1));
    auto r = post("/api/demo", json::object());
    const auto cookie = r->get_header_value("Set-Cookie");
    EXPECT_NE(cookie.find("HttpOnly"), std::string::npos);
    const std::string token = json::parse(r->body)["token"];
    EXPECT_EQ(client->Get("/api/guess_the_year", {{"Cookie", "theme=dark; session=" + token}})->status, 200);
}

TEST_F(ApiTest, RegisterAndLogin) {
    load(full_catalog(1));
    auto r = post("/api/register", {{"username", "ari"}, {"password", "correct-horse-9"}, {"age_bracket", "14-18"}});
    EXPECT_EQ(r->status, 201);
    EXPECT_EQ(json::parse(r->body)["age_bracket"], "14-18");
    EXPECT_EQ(post("/api/register", {{"username", "ari"}, {"password", "correct-horse-9"}})->status, 409);
    EXPECT_EQ(post("/api/register", {{"username", "bo"}, {"password", "short"}})->status, 422);
    EXPECT_EQ(post("/api/register", {{"username", "cy"}, {"password", "long-enough"}, {"age_bracket", "7-9"}})->status,
              422);
    EXPECT_EQ(client->Post("/api/register", "{oops", "application/json")->status, 422);
    EXPECT_EQ(post("/api/login", {{"username", "ari"}, {"password", "wrong-pass"}})->status, 401);
    EXPECT_EQ(post("/api/login", {{"username", "zed"}, {"password", "wrong-pass"}})->status, 401);
    EXPECT_EQ(post("/api/login", {{"username", "ari"}, {"password", "correct-horse-9"}})->status, 200);
}

TEST_F(ApiTest, LeaderboardAndPerformance) {
    load(catalog_of_years({1933, 1930, 1951, 1977}));
    const auto ari = register_and_login("ari", "41+");
    for (int i = 0; i < 5; ++i) {
        const auto round = json::parse(get("/api/guess_the_year", ari)->body);
        post("/api/guess_the_year", {{"round_id", round["round_id"]}, {"guess", 1950}}, ari);
    }
    get("/api/timeline_challenge", ari);  // left unanswered

    auto board = get("/api/leaderboard?kind=dynamic&limit=5");
    ASSERT_EQ(board->status, 200);
    const auto b = json::parse(board->body);
    EXPECT_EQ(b["kind"], "dynamic");
    ASSERT_EQ(b["entries"].size(), 1u);
    EXPECT_EQ(b["entries"][0]["rank"], 1);
    const std::string dyn = b["entries"][0]["total_dynamic"];
    EXPECT_EQ(dyn.size() - dyn.find('.'), 3u);
    EXPECT_EQ(get("/api/leaderboard?limit=0")->status, 422);
    EXPECT_EQ(get("/api/leaderboard?limit=1001")->status, 422);
    EXPECT_EQ(get("/api/leaderboard?kind=weird")->status, 422);

    auto perf = get("/api/performance", ari);
    ASSERT_EQ(perf->status, 200);
    const auto p = json::parse(perf->body);
    EXPECT_EQ(p["decades"].size(), 7u);
    std::int64_t guesses = 0, shown = 0;
    for (const auto& d : p["decades"]) {
        guesses += d["total_guesses"].get<std::int64_t>();
        shown += d["total_images_shown"].get<std::int64_t>();
        if (d["total_guesses"] == 0) EXPECT_TRUE(d["correct_pct"].is_null());
    }
    EXPECT_EQ(guesses, 5);
    EXPECT_EQ(shown, 7);
    EXPECT_EQ(p["plays"]["guess_the_year"], 5);

    const auto demo = demo_token();
    auto denied = get("/api/performance", demo);
    EXPECT_EQ(denied->status, 403);
    EXPECT_EQ(error_code(denied), "RegisteredOnly");
}

TEST_F(ApiTest, ImagesServedByKey) {
    auto catalog = catalog_of_years({1944, 1950});
    write_jpeg(asset_path_for(dir.path(), "fx-0"), 40, 30);
    attach_existing_assets(*catalog, dir.path());
    load(catalog);
    const auto key = service->engine()->key_for(0);
    auto r = get("/images/" + key);
    ASSERT_EQ(r->status, 200);
    EXPECT_EQ(r->get_header_value("Content-Type"), "image/jpeg");
    EXPECT_NE(r->get_header_value("Cache-Control").find("immutable"), std::string::npos);
    EXPECT_EQ(get("/images/" + service->engine()->key_for(1))->status, 404);
    EXPECT_EQ(get("/images/nothing")->status, 404);
}

TEST_F(ApiTest, UnknownRouteHasJsonError) {
    auto r = get("/api/nope");
    EXPECT_EQ(r->status, 404);
    EXPECT_EQ(error_code(r), "NotFound");
}

TEST_F(ApiTest, ParallelSubmissionsAcrossSessions) {
    load(full_catalog(2));
    std::vector<std::pair<std::string, std::string>> rounds;
    for (int i = 0; i < 100; ++i) {
        const auto token = demo_token();
        rounds.emplace_back(token, json::parse(get("/api/guess_the_year", token)->body)["round_id"]);
    }
    std::atomic<int> ok{0};
    {
        std::vector<std::jthread> threads;
        for (const auto& [token, round] : rounds) {
            threads.emplace_back([&, token, round] {
                httplib::Client c("127.0.0.1", port);
                auto r = c.Post("/api/guess_the_year", {{"Authorization", "Bearer " + token}},
                                json{{"round_id", round}, {"guess", 1960}}.dump(), "application/json");
                if (r && r->status == 200) {
                    ++ok;
                } else {
                    ADD_FAILURE() << (r ? "status " + std::to_string(r->status) + " " + r->body
                                        : "transport error " + httplib::to_string(r.error()));
                }
            });
        }
    }
    EXPECT_EQ(ok.load(), 100);
    EXPECT_EQ(service->store().play_count(), 100u);
}

TEST_F(ApiTest, ShutdownDuringSubmissionsLeavesNoHalfWrites) {
    load(full_catalog(2));
    std::vector<std::pair<std::string, std::string>> rounds;
    for (int i = 0; i < 50; ++i) {
        const auto token = demo_token();
        rounds.emplace_back(token, json::parse(get("/api/guess_the_year", token)->body)["round_id"]);
    }
    {
        std::vector<std::jthread> threads;
        for (const auto& [token, round] : rounds) {
            threads.emplace_back([&, token, round] {
                httplib::Client c("127.0.0.1", port);
                c.Post("/api/guess_the_year", {{"Authorization", "Bearer " + token}},
                       json{{"round_id", round}, {"guess", 1960}}.dump(), "application/json");
            });
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(5));
        service->stop();
        server.join();
    }
    auto* engine = service->engine();
    const auto plays = service->store().plays({});
    std::set<std::string> persisted;
    for (const auto& p : plays) persisted.insert(p.round_id);
    for (const auto& [token, round] : rounds) {
        EXPECT_NE(persisted.contains(round), engine->is_pending(token, round)) << round;
    }
    EXPECT_EQ(plays.size(), persisted.size());
}
