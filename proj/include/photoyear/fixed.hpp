#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace photoyear {

/// Decimal fixed-point value with `Scale` fraction digits, stored as an
/// integer count of 10^-Scale units. Used for every point total and
/// percentage so that sums never pick up binary floating-point drift.
template <int Scale>
class Fixed {
    static_assert(Scale >= 0 && Scale <= 6);

public:
    static constexpr std::int64_t kUnit = [] {
        std::int64_t u = 1;
        for (int i = 0; i < Scale; ++i) u *= 10;
        return u;
    }();

    constexpr Fixed() = default;

    static constexpr Fixed from_units(std::int64_t units) { return Fixed(units); }
    static constexpr Fixed from_integer(std::int64_t whole) { return Fixed(whole * kUnit); }

    /// Rounds num/den to Scale digits, ties away from zero (half-up for
    /// non-negative values). den must be positive.
    static constexpr Fixed from_ratio(std::int64_t num, std::int64_t den) {
        if (den <= 0) throw std::invalid_argument("Fixed::from_ratio: non-positive denominator");
        const std::int64_t scaled = num * kUnit;
        const bool negative = scaled < 0;
        const std::int64_t mag = negative ? -scaled : scaled;
        std::int64_t q = mag / den;
        if ((mag % den) * 2 >= den) ++q;
        return Fixed(negative ? -q : q);
    }

    /// Parses "12", "12.3", "12.34" (at most Scale fraction digits).
    static Fixed parse(const std::string& text);

    constexpr std::int64_t units() const { return units_; }

    template <int Other>
    constexpr Fixed<Other> rescale() const {
        if constexpr (Other >= Scale) {
            return Fixed<Other>::from_units(units_ * (Fixed<Other>::kUnit / kUnit));
        } else {
            return Fixed<Other>::from_ratio(units_, kUnit);
        }
    }

    std::string to_string() const {
        const bool negative = units_ < 0;
        const std::int64_t mag = negative ? -units_ : units_;
        std::string out = negative ? "-" : "";
        out += std::to_string(mag / kUnit);
        if constexpr (Scale > 0) {
            std::string frac = std::to_string(mag % kUnit);
            out += '.';
            out.append(static_cast<std::size_t>(Scale) - frac.size(), '0');
            out += frac;
        }
        return out;
    }

    constexpr Fixed& operator+=(Fixed o) {
        units_ += o.units_;
        return *this;
    }
    friend constexpr Fixed operator+(Fixed a, Fixed b) { return a += b; }
    friend constexpr Fixed operator-(Fixed a, Fixed b) { return Fixed(a.units_ - b.units_); }
    friend constexpr auto operator<=>(Fixed, Fixed) = default;

private:
    constexpr explicit Fixed(std::int64_t units) : units_(units) {}

    std::int64_t units_ = 0;
};

template <int Scale>
Fixed<Scale> Fixed<Scale>::parse(const std::string& text) {
    std::size_t i = 0;
    bool negative = false;
    if (i < text.size() && (text[i] == '-' || text[i] == '+')) negative = text[i++] == '-';
    std::int64_t whole = 0;
    std::size_t digits = 0;
    for (; i < text.size() && text[i] >= '0' && text[i] <= '9'; ++i, ++digits) {
        whole = whole * 10 + (text[i] - '0');
    }
    std::int64_t frac = 0;
    int frac_digits = 0;
    if (i < text.size() && text[i] == '.') {
        for (++i; i < text.size() && text[i] >= '0' && text[i] <= '9'; ++i, ++frac_digits) {
            if (frac_digits >= Scale) throw std::invalid_argument("too many fraction digits: " + text);
            frac = frac * 10 + (text[i] - '0');
        }
        if (frac_digits == 0) throw std::invalid_argument("bad decimal: " + text);
    }
    if (digits == 0 || i != text.size()) throw std::invalid_argument("bad decimal: " + text);
    for (int k = frac_digits; k < Scale; ++k) frac *= 10;
    const std::int64_t units = whole * kUnit + frac;
    return from_units(negative ? -units : units);
}

/// Hundredths: dynamic points and 2-decimal percentages.
using Cents = Fixed<2>;
/// Tenths: 1-decimal display values.
using Tenths = Fixed<1>;

}  // namespace photoyear
