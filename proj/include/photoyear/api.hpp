#pragma once

#include <json.hpp>

#include <atomic>
#include <memory>
#include <mutex>
#include <string>

#include "photoyear/config.hpp"
#include "photoyear/engine.hpp"
#include "photoyear/store.hpp"

namespace httplib {
class Server;
struct Request;
struct Response;
}  // namespace httplib

namespace photoyear {

/// HTTP status for an error code.
int http_status(Errc code);

/// JSON-over-HTTP front end: auth, both game modes, leaderboard,
/// per-user performance, image assets and a readiness probe.
///
/// Construction registers routes but loads nothing; until load() completes,
/// /healthz and every game route answer 503.
class ApiService {
public:
    /// `store` defaults to the configured SQLite database. `engine_options`
    /// exposes seeding and a clock for tests; config supplies the TTL and
    /// exclusion window.
    explicit ApiService(ApiConfig config, std::unique_ptr<Store> store = nullptr, EngineOptions engine_options = {});
    ~ApiService();

    ApiService(const ApiService&) = delete;
    ApiService& operator=(const ApiService&) = delete;

    /// Loads meta.csv, mirrors it into the images table, attaches assets
    /// found in the image directory and starts accepting game traffic.
    void load();
    /// Same, from an already-built catalog (tests, tooling).
    void load(std::shared_ptr<Catalog> catalog);
    bool ready() const { return ready_.load(); }

    /// Binds the listening socket; port 0 picks a free port. Returns the port.
    int bind(const std::string& host, int port);
    /// Serves until stop(). In-flight requests finish before this returns.
    bool listen();
    void stop();

    Store& store() { return *store_; }
    /// Null until load() has run.
    GameEngine* engine() { return engine_.get(); }
    const ApiConfig& config() const { return config_; }

private:
    void register_routes();
    std::string bearer_token(const httplib::Request& req) const;
    Identity require_identity(const httplib::Request& req, std::string& token);
    GameEngine& require_engine();

    ApiConfig config_;
    EngineOptions engine_options_;
    std::unique_ptr<Store> store_;
    std::unique_ptr<httplib::Server> http_;
    std::shared_ptr<const Catalog> catalog_;
    std::unique_ptr<GameEngine> engine_;
    std::atomic<bool> ready_{false};
    std::mutex load_mu_;
};

/// Structured log line (JSON object) to stdout.
void log_event(const std::string& event, const nlohmann::json& fields = {});

}  // namespace photoyear
