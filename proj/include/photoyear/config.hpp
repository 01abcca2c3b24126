#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>

namespace photoyear {

struct ApiConfig {
    std::string host = "0.0.0.0";
    int port = 8080;
    /// Database file path or "sqlite://<path>".
    std::string storage = "photoyear.db";
    std::filesystem::path meta_path = "meta.csv";
    std::filesystem::path image_dir = "images";
    /// Built web client, served under "/" when set.
    std::optional<std::filesystem::path> ui_dir;
    std::chrono::seconds session_ttl = std::chrono::hours(24);
    bool demo_enabled = true;
    std::size_t exclusion_window = 50;
    bool allow_partial_years = false;
    /// "interactive" (default) or "moderate"; see HashCost.
    std::string password_cost = "interactive";
};

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

/// Process environment.
std::optional<std::string> getenv_lookup(const std::string& name);

/// Reads an optional JSON config file, then applies PORT, STORAGE_URL,
/// IMAGE_DIR, SESSION_TTL_SECS and META_PATH overrides. Throws
/// Error{ConfigError} for malformed files or values.
ApiConfig load_config(const std::optional<std::filesystem::path>& file, const EnvLookup& env = getenv_lookup);

/// Fails loudly (Error{ConfigError} naming the path) when the metadata
/// file, image directory, UI directory or database directory is missing.
void validate_paths(const ApiConfig& config);

}  // namespace photoyear
