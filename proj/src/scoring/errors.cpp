#include "photoyear/errors.hpp"

namespace photoyear {

std::string_view to_string(Errc code) {
    switch (code) {
        case Errc::EqualYears: return "EqualYears";
        case Errc::ZeroGap: return "ZeroGap";
        case Errc::YearOutOfRange: return "YearOutOfRange";
        case Errc::UnreadableStream: return "UnreadableStream";
        case Errc::UnresolvableYear: return "UnresolvableYear";
        case Errc::UnknownUser: return "UnknownUser";
        case Errc::UnknownSession: return "UnknownSession";
        case Errc::EmptyCatalog: return "EmptyCatalog";
        case Errc::NoDistinctYears: return "NoDistinctYears";
        case Errc::UnknownRound: return "UnknownRound";
        case Errc::RoundAlreadyAnswered: return "RoundAlreadyAnswered";
        case Errc::GuessOutOfRange: return "GuessOutOfRange";
        case Errc::UsernameTaken: return "UsernameTaken";
        case Errc::WeakPassword: return "WeakPassword";
        case Errc::InvalidUsername: return "InvalidUsername";
        case Errc::AuthFailed: return "AuthFailed";
        case Errc::ForeignKeyViolation: return "ForeignKeyViolation";
        case Errc::StorageFailure: return "StorageFailure";
        case Errc::CorrectExceedsTotal: return "CorrectExceedsTotal";
        case Errc::UnknownImage: return "UnknownImage";
        case Errc::Unauthenticated: return "Unauthenticated";
        case Errc::InvalidRequest: return "InvalidRequest";
        case Errc::DemoDisabled: return "DemoDisabled";
        case Errc::RegisteredOnly: return "RegisteredOnly";
        case Errc::NotFound: return "NotFound";
        case Errc::NotReady: return "NotReady";
        case Errc::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

}  // namespace photoyear
