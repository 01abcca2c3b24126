#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace photoyear {

/// Argon2id work factors. The encoded hash records them, so raising the
/// cost later only affects newly written hashes.
struct HashCost {
    unsigned long long ops;
    std::size_t mem_bytes;

    static HashCost interactive();
    static HashCost moderate();
    /// Library minimum; for tests only.
    static HashCost minimal();
};

class PasswordHasher {
public:
    explicit PasswordHasher(HashCost cost = HashCost::interactive());

    /// "$argon2id$v=19$m=...,t=...,p=1$<salt>$<digest>" with a fresh random salt.
    std::string hash(std::string_view password) const;

    /// Constant-time check. Malformed hashes verify as false.
    bool verify(std::string_view password, const std::string& encoded) const;

    bool needs_rehash(const std::string& encoded) const;

    const HashCost& cost() const { return cost_; }

private:
    HashCost cost_;
};

}  // namespace photoyear
