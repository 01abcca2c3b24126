#include "photoyear/config.hpp"

#include <json.hpp>

#include <charconv>
#include <cstdlib>
#include <fstream>

#include "photoyear/errors.hpp"

namespace photoyear {

namespace {

long long parse_number(const std::string& name, const std::string& text, long long lo, long long hi) {
    long long value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || value < lo || value > hi) {
        throw Error(Errc::ConfigError, name + " must be an integer in [" + std::to_string(lo) + ", " +
                                           std::to_string(hi) + "], got '" + text + "'");
    }
    return value;
}

std::string strip_scheme(const std::string& storage) {
    constexpr std::string_view kScheme = "sqlite://";
    return storage.rfind(kScheme, 0) == 0 ? storage.substr(kScheme.size()) : storage;
}

}  // namespace

std::optional<std::string> getenv_lookup(const std::string& name) {
    const char* v = std::getenv(name.c_str());
    return v ? std::optional<std::string>(v) : std::nullopt;
}

ApiConfig load_config(const std::optional<std::filesystem::path>& file, const EnvLookup& env) {
    ApiConfig config;
    if (file) {
        std::ifstream in(*file);
        if (!in) throw Error(Errc::ConfigError, "cannot read config file " + file->string());
        try {
            const auto j = nlohmann::json::parse(in);
            config.host = j.value("host", config.host);
            config.port = j.value("port", config.port);
            config.storage = j.value("storage", config.storage);
            config.meta_path = j.value("meta", config.meta_path.string());
            config.image_dir = j.value("image_dir", config.image_dir.string());
            if (j.contains("ui_dir") && !j["ui_dir"].is_null()) config.ui_dir = j["ui_dir"].get<std::string>();
            config.session_ttl = std::chrono::seconds(j.value("session_ttl_secs", config.session_ttl.count()));
            config.demo_enabled = j.value("demo_enabled", config.demo_enabled);
            config.exclusion_window = j.value("exclusion_window", config.exclusion_window);
            config.allow_partial_years = j.value("allow_partial_years", config.allow_partial_years);
            config.password_cost = j.value("password_cost", config.password_cost);
        } catch (const nlohmann::json::exception& e) {
            throw Error(Errc::ConfigError, "bad config file " + file->string() + ": " + e.what());
        }
    }
    if (auto v = env("PORT")) config.port = static_cast<int>(parse_number("PORT", *v, 0, 65535));
    if (auto v = env("STORAGE_URL")) config.storage = *v;
    if (auto v = env("IMAGE_DIR")) config.image_dir = *v;
    if (auto v = env("META_PATH")) config.meta_path = *v;
    if (auto v = env("SESSION_TTL_SECS")) {
        config.session_ttl = std::chrono::seconds(parse_number("SESSION_TTL_SECS", *v, 1, 365LL * 24 * 3600));
    }
    if (config.port < 0 || config.port > 65535) throw Error(Errc::ConfigError, "port out of range");
    if (config.password_cost != "interactive" && config.password_cost != "moderate") {
        throw Error(Errc::ConfigError, "password_cost must be 'interactive' or 'moderate'");
    }
    return config;
}

void validate_paths(const ApiConfig& config) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (!fs::is_regular_file(config.meta_path, ec)) {
        throw Error(Errc::ConfigError, "metadata file not found: " + config.meta_path.string());
    }
    if (!fs::is_directory(config.image_dir, ec)) {
        throw Error(Errc::ConfigError, "image directory not found: " + config.image_dir.string());
    }
    if (config.ui_dir && !fs::is_directory(*config.ui_dir, ec)) {
        throw Error(Errc::ConfigError, "ui directory not found: " + config.ui_dir->string());
    }
    const std::string db = strip_scheme(config.storage);
    if (db != ":memory:") {
        const auto parent = fs::absolute(fs::path(db), ec).parent_path();
        if (!fs::is_directory(parent, ec)) {
            throw Error(Errc::ConfigError, "storage directory not found: " + parent.string());
        }
    }
}

}  // namespace photoyear
