#include "photoyear/api.hpp"

#include <httplib.h>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "photoyear/analytics.hpp"
#include "photoyear/assets.hpp"
#include "photoyear/payloads.hpp"
#include "photoyear/tokens.hpp"

namespace photoyear {

namespace {

using nlohmann::json;

constexpr const char* kJson = "application/json";
constexpr int kMaxLeaderboardLimit = 1000;

std::mutex& log_mutex() {
    static std::mutex mu;
    return mu;
}

void send_error(httplib::Response& res, Errc code, const std::string& message) {
    res.status = http_status(code);
    res.set_content(error_body(code, message).dump(), kJson);
}

void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), kJson);
}

json parse_body(const httplib::Request& req) {
    try {
        auto body = json::parse(req.body);
        if (!body.is_object()) throw Error(Errc::InvalidRequest, "request body must be a JSON object");
        return body;
    } catch (const json::exception&) {
        throw Error(Errc::InvalidRequest, "request body is not valid JSON");
    }
}

std::string required_string(const json& body, const char* field) {
    const auto it = body.find(field);
    if (it == body.end() || !it->is_string()) {
        throw Error(Errc::InvalidRequest, std::string("field '") + field + "' must be a string");
    }
    return it->get<std::string>();
}

/// Runs a handler, turning domain errors into JSON error responses.
template <typename Fn>
void guarded(httplib::Response& res, Fn&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        send_error(res, e.code(), e.what());
    }
}

HashCost cost_named(const std::string& name) {
    return name == "moderate" ? HashCost::moderate() : HashCost::interactive();
}

}  // namespace

void log_event(const std::string& event, const nlohmann::json& fields) {
    json line = fields.is_object() ? fields : json::object();
    line["event"] = event;
    line["ts"] = std::chrono::duration_cast<std::chrono::milliseconds>(
                     std::chrono::system_clock::now().time_since_epoch())
                     .count();
    const std::string text = line.dump();
    std::lock_guard lock(log_mutex());
    std::cout << text << '\n' << std::flush;
}

int http_status(Errc code) {
    switch (code) {
        case Errc::UnknownRound:
        case Errc::NotFound:
        case Errc::UnknownImage:
            return 404;
        case Errc::RoundAlreadyAnswered:
        case Errc::UsernameTaken:
            return 409;
        case Errc::GuessOutOfRange:
        case Errc::YearOutOfRange:
        case Errc::WeakPassword:
        case Errc::InvalidUsername:
        case Errc::InvalidRequest:
            return 422;
        case Errc::Unauthenticated:
        case Errc::UnknownSession:
        case Errc::AuthFailed:
            return 401;
        case Errc::DemoDisabled:
        case Errc::RegisteredOnly:
            return 403;
        case Errc::NotReady:
        case Errc::EmptyCatalog:
        case Errc::NoDistinctYears:
            return 503;
        default:
            return 500;
    }
}

ApiService::ApiService(ApiConfig config, std::unique_ptr<Store> store, EngineOptions engine_options)
    : config_(std::move(config)),
      engine_options_(std::move(engine_options)),
      store_(std::move(store)),
      http_(std::make_unique<httplib::Server>()) {
    if (!store_) store_ = open_store(config_.storage, PasswordHasher(cost_named(config_.password_cost)));
    store_->migrate();
    engine_options_.exclusion_window = config_.exclusion_window;
    engine_options_.session_ttl = config_.session_ttl;
    register_routes();
}

ApiService::~ApiService() { stop(); }

void ApiService::load() {
    auto result = load_catalog_file(config_.meta_path, {config_.allow_partial_years});
    if (!result.coverage_ok) {
        throw Error(Errc::ConfigError, "catalog leaves " + std::to_string(result.report.missing_years.size()) +
                                           " years without images; set allow_partial_years to accept");
    }
    auto catalog = std::make_shared<Catalog>(std::move(result.catalog));
    const auto with_assets = attach_existing_assets(*catalog, config_.image_dir);
    log_event("catalog_loaded", {{"images", catalog->size()},
                                 {"rejected_rows", result.report.rejected.size()},
                                 {"with_assets", with_assets}});
    load(std::move(catalog));
}

void ApiService::load(std::shared_ptr<Catalog> catalog) {
    std::lock_guard lock(load_mu_);
    store_->upsert_images(*catalog);
    catalog_ = std::move(catalog);
    engine_ = std::make_unique<GameEngine>(catalog_, *store_, engine_options_);
    ready_.store(true);
}

int ApiService::bind(const std::string& host, int port) {
    if (port == 0) return http_->bind_to_any_port(host);
    return http_->bind_to_port(host, port) ? port : -1;
}

bool ApiService::listen() { return http_->listen_after_bind(); }

void ApiService::stop() {
    if (http_) http_->stop();
}

GameEngine& ApiService::require_engine() {
    if (!ready_.load()) throw Error(Errc::NotReady, "catalog is still loading");
    return *engine_;
}

std::string ApiService::bearer_token(const httplib::Request& req) const {
    const auto auth = req.get_header_value("Authorization");
    constexpr std::string_view kBearer = "Bearer ";
    if (auth.size() > kBearer.size() && auth.compare(0, kBearer.size(), kBearer) == 0) {
        return auth.substr(kBearer.size());
    }
    const auto cookies = req.get_header_value("Cookie");
    std::istringstream in(cookies);
    std::string part;
    while (std::getline(in, part, ';')) {
        const auto start = part.find_first_not_of(' ');
        if (start == std::string::npos) continue;
        part.erase(0, start);
        if (part.rfind("session=", 0) == 0) return part.substr(8);
    }
    return {};
}

Identity ApiService::require_identity(const httplib::Request& req, std::string& token) {
    auto& engine = require_engine();
    token = bearer_token(req);
    auto identity = engine.session_identity(token);
    if (!identity) throw Error(Errc::Unauthenticated, "missing or expired session token");
    return *identity;
}

void ApiService::register_routes() {
    auto& s = *http_;

    s.set_logger([](const httplib::Request& req, const httplib::Response& res) {
        log_event("request", {{"method", req.method}, {"path", req.path}, {"status", res.status}});
    });
    s.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        std::string what = "internal error";
        try {
            std::rethrow_exception(ep);
        } catch (const std::exception& e) {
            what = e.what();
        } catch (...) {
        }
        log_event("unhandled_exception", {{"message", what}});
        send_error(res, Errc::StorageFailure, "internal error");
    });
    s.set_error_handler([](const httplib::Request&, httplib::Response& res) {
        if (!res.body.empty()) return;
        const Errc code = res.status == 404 ? Errc::NotFound : Errc::InvalidRequest;
        res.set_content(error_body(code, "request failed with status " + std::to_string(res.status)).dump(), kJson);
    });

    s.Get("/healthz", [this](const httplib::Request&, httplib::Response& res) {
        if (ready()) {
            send_json(res, 200, {{"status", "ok"}});
        } else {
            send_error(res, Errc::NotReady, "catalog is still loading");
        }
    });

    s.Post("/api/register", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            const auto body = parse_body(req);
            const auto username = required_string(body, "username");
            const auto password = required_string(body, "password");
            std::optional<AgeBracket> bracket;
            if (const auto it = body.find("age_bracket"); it != body.end() && !it->is_null()) {
                if (!it->is_string() || !(bracket = parse_age_bracket(it->get<std::string>()))) {
                    throw Error(Errc::InvalidRequest, "age_bracket must be one of 14-18, 19-25, 26-40, 41+");
                }
            }
            const auto account = store_->create_user(username, password, bracket);
            log_event("user_registered", {{"user_id", account.id}});
            json out = {{"user_id", account.id}, {"username", account.username}};
            out["age_bracket"] = bracket ? json(std::string(to_string(*bracket))) : json(nullptr);
            send_json(res, 201, out);
        });
    });

    s.Post("/api/login", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            const auto body = parse_body(req);
            const auto user = store_->authenticate(required_string(body, "username"), required_string(body, "password"));
            const auto token = require_engine().create_session(Identity::registered(user));
            log_event("login", {{"user_id", user.id}, {"session", redact_token(token)}});
            res.set_header("Set-Cookie", "session=" + token + "; HttpOnly; SameSite=Strict; Path=/");
            send_json(res, 200, {{"token", token}, {"username", user.username}});
        });
    });

    s.Post("/api/demo", [this](const httplib::Request&, httplib::Response& res) {
        guarded(res, [&] {
            if (!config_.demo_enabled) throw Error(Errc::DemoDisabled, "demo mode is disabled");
            const auto token = require_engine().create_session(Identity::demo());
            log_event("demo_session", {{"session", redact_token(token)}});
            res.set_header("Set-Cookie", "session=" + token + "; HttpOnly; SameSite=Strict; Path=/");
            send_json(res, 200, {{"token", token}, {"demo", true}});
        });
    });

    s.Get("/api/guess_the_year", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            std::string token;
            require_identity(req, token);
            send_json(res, 200, to_json(engine_->next_year_round(token)));
        });
    });

    s.Post("/api/guess_the_year", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            std::string token;
            require_identity(req, token);
            const auto body = parse_body(req);
            const auto round_id = required_string(body, "round_id");
            const auto it = body.find("guess");
            if (it == body.end() || !it->is_number_integer()) {
                throw Error(Errc::InvalidRequest, "field 'guess' must be an integer year");
            }
            const auto guess = it->get<long long>();
            if (guess < kFirstYear || guess > kLastYear) {
                throw Error(Errc::GuessOutOfRange, "guess must be between 1930 and 1999");
            }
            send_json(res, 200, to_json(engine_->submit_year_guess(token, round_id, static_cast<int>(guess))));
        });
    });

    s.Get("/api/timeline_challenge", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            std::string token;
            require_identity(req, token);
            send_json(res, 200, to_json(engine_->next_timeline_round(token)));
        });
    });

    s.Post("/api/timeline_challenge", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            std::string token;
            require_identity(req, token);
            const auto body = parse_body(req);
            const auto round_id = required_string(body, "round_id");
            const auto choice = parse_timeline_choice(required_string(body, "choice"));
            if (!choice) throw Error(Errc::InvalidRequest, "field 'choice' must be \"left\" or \"right\"");
            send_json(res, 200, to_json(engine_->submit_timeline_choice(token, round_id, *choice)));
        });
    });

    s.Get("/api/leaderboard", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            PointKind kind = PointKind::Static;
            if (req.has_param("kind")) {
                const auto k = req.get_param_value("kind");
                if (k == "dynamic") {
                    kind = PointKind::Dynamic;
                } else if (k != "static") {
                    throw Error(Errc::InvalidRequest, "kind must be static or dynamic");
                }
            }
            int limit = 10;
            if (req.has_param("limit")) {
                const auto text = req.get_param_value("limit");
                std::size_t used = 0;
                try {
                    limit = std::stoi(text, &used);
                } catch (const std::exception&) {
                    used = 0;
                }
                if (used != text.size() || limit < 1 || limit > kMaxLeaderboardLimit) {
                    throw Error(Errc::InvalidRequest, "limit must be an integer between 1 and 1000");
                }
            }
            send_json(res, 200, to_json(store_->leaderboard(kind, limit), kind));
        });
    });

    s.Get("/api/performance", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            std::string token;
            const auto identity = require_identity(req, token);
            if (identity.is_demo()) throw Error(Errc::RegisteredOnly, "performance is tracked for registered users");
            PlayFilter filter;
            filter.user = identity.user->id;
            filter.include_demo = false;
            const auto plays = store_->plays(filter);
            const auto unanswered = store_->unanswered_rounds(filter);
            const auto decades = decade_stats(plays, *catalog_, {}, unanswered);
            json body = to_json(decades, mode_accuracy(plays));
            body["username"] = identity.user->username;
            send_json(res, 200, body);
        });
    });

    s.Get(R"(/images/(.+))", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            auto& engine = require_engine();
            const std::string key = req.matches[1];
            const ImageRecord* record = engine.image_by_key(key);
            if (!record) record = catalog_->find(key);
            if (!record || !record->asset) throw Error(Errc::NotFound, "no such image");
            std::ifstream in(record->asset->path, std::ios::binary);
            if (!in) throw Error(Errc::NotFound, "image asset missing");
            std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
            res.set_header("Cache-Control", "public, max-age=31536000, immutable");
            res.set_content(std::move(bytes), "image/jpeg");
        });
    });

    if (config_.ui_dir) s.set_mount_point("/", config_.ui_dir->string());
}

}  // namespace photoyear
