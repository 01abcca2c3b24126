#include "photoyear/tokens.hpp"

#include <sodium.h>

#include <array>
#include <stdexcept>

namespace photoyear {

namespace {

void ensure_sodium() {
    static const bool ok = sodium_init() >= 0;
    if (!ok) throw std::runtime_error("libsodium failed to initialise");
}

std::array<std::uint8_t, crypto_hash_sha256_BYTES> sha256(std::string_view data) {
    std::array<std::uint8_t, crypto_hash_sha256_BYTES> out{};
    crypto_hash_sha256(out.data(), reinterpret_cast<const unsigned char*>(data.data()), data.size());
    return out;
}

}  // namespace

std::string encode_letters(std::span<const std::uint8_t> bytes) {
    std::string out;
    out.reserve(bytes.size() * 2);
    for (auto b : bytes) {
        out += static_cast<char>('a' + (b >> 4));
        out += static_cast<char>('a' + (b & 0x0F));
    }
    return out;
}

std::string random_token() {
    ensure_sodium();
    std::array<std::uint8_t, 16> raw{};
    randombytes_buf(raw.data(), raw.size());
    return encode_letters(raw);
}

std::string token_digest(std::string_view token) {
    ensure_sodium();
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    for (auto b : sha256(token)) {
        out += kHex[b >> 4];
        out += kHex[b & 0x0F];
    }
    return out;
}

std::string image_key(std::string_view img_id) {
    ensure_sodium();
    const auto digest = sha256(img_id);
    return encode_letters(std::span(digest).first(16));
}

std::string redact_token(std::string_view token) {
    return std::string(token.substr(0, 6)) + "...";
}

}  // namespace photoyear
