#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace photoyear {

/// Error taxonomy shared by every module. The names double as the
/// machine-readable `code` field in HTTP error bodies.
enum class Errc {
    // scoring
    EqualYears,
    ZeroGap,
    YearOutOfRange,
    // catalog
    UnreadableStream,
    UnresolvableYear,
    // engine
    UnknownUser,
    UnknownSession,
    EmptyCatalog,
    NoDistinctYears,
    UnknownRound,
    RoundAlreadyAnswered,
    GuessOutOfRange,
    // persistence
    UsernameTaken,
    WeakPassword,
    InvalidUsername,
    AuthFailed,
    ForeignKeyViolation,
    StorageFailure,
    // analytics
    CorrectExceedsTotal,
    UnknownImage,
    // api
    Unauthenticated,
    InvalidRequest,
    DemoDisabled,
    RegisteredOnly,
    NotFound,
    NotReady,
    ConfigError,
};

std::string_view to_string(Errc code);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message) : std::runtime_error(message), code_(code) {}
    explicit Error(Errc code) : Error(code, std::string(to_string(code))) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace photoyear
