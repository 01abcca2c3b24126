#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace photoyear {

/// Each nibble becomes one of 'a'..'p'. Tokens therefore never contain a
/// digit, so no client payload can spell a year by accident.
std::string encode_letters(std::span<const std::uint8_t> bytes);

/// 128 bits from the OS CSPRNG, letter-encoded (32 chars).
std::string random_token();

/// Lower-case hex SHA-256; used to store session tokens at rest.
std::string token_digest(std::string_view token);

/// Stable public handle for an image: letters of SHA-256(img_id)[0..16).
std::string image_key(std::string_view img_id);

/// First few characters only, for logs.
std::string redact_token(std::string_view token);

}  // namespace photoyear
