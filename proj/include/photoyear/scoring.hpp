#pragma once

// Scoring rules for both game modes. Everything here is pure and
// thread-safe; there is no state.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "photoyear/errors.hpp"
#include "photoyear/fixed.hpp"

namespace photoyear {

inline constexpr int kFirstYear = 1930;
inline constexpr int kLastYear = 1999;

inline constexpr bool in_catalog_range(int year) { return year >= kFirstYear && year <= kLastYear; }

/// Ground-truth capture year, always within [1930, 1999].
class Year {
public:
    /// Throws Error{YearOutOfRange} outside the catalog range.
    explicit Year(int value);

    static std::optional<Year> checked(int value) {
        if (!in_catalog_range(value)) return std::nullopt;
        return Year(value, Unchecked{});
    }

    constexpr int value() const { return value_; }
    friend constexpr auto operator<=>(Year, Year) = default;

private:
    struct Unchecked {};
    constexpr Year(int value, Unchecked) : value_(value) {}

    int value_;
};

/// A player's year estimate; same range as Year.
class YearGuess {
public:
    /// Throws Error{GuessOutOfRange}.
    explicit YearGuess(int value);

    constexpr int value() const { return value_; }
    friend constexpr auto operator<=>(YearGuess, YearGuess) = default;

private:
    int value_;
};

/// Absolute distance in years between two Years.
struct YearGap {
    int delta = 0;

    static YearGap between(Year a, Year b) {
        const int d = a.value() - b.value();
        return YearGap{d < 0 ? -d : d};
    }
};

enum class TimelineChoice { Left, Right };

std::string_view to_string(TimelineChoice choice);
std::optional<TimelineChoice> parse_timeline_choice(std::string_view text);

struct Points {
    int static_points = 0;
    Cents dynamic_points;

    friend bool operator==(const Points&, const Points&) = default;
};

struct TimelineOutcome {
    bool correct = false;
    Points points;
    std::string feedback;

    friend bool operator==(const TimelineOutcome&, const TimelineOutcome&) = default;
};

inline constexpr int kStaticAward = 10;
inline constexpr int kYearTolerance = 5;

/// 10 when the guess is within ±5 years of the actual year, otherwise 0.
int score_year_static(YearGuess guess, Year actual);

/// 10 × (1 − min(|error|, 100) / 100) in hundredths. Accepts any
/// non-negative error so the 100-year clamp is reachable from tests even
/// though valid catalog years never exceed a 69-year error.
Cents dynamic_points_for_error(int abs_error);

Cents score_year_dynamic(YearGuess guess, Year actual);

/// True iff the chosen side holds the strictly older image.
/// Throws Error{EqualYears} when both years match.
bool timeline_correct(TimelineChoice choice, Year left, Year right);

/// Gap bonus, 5.0 × {1.0 if Δ≤10; 1 − (Δ−10)/40 if 10<Δ≤50; 0.1 if Δ>50},
/// rounded half-up to hundredths. Throws Error{ZeroGap} for Δ = 0.
/// Note the printed piecewise rule drops to 0.00 at Δ=50 and jumps back to
/// 0.50 at Δ=51; that is intentional.
Cents timeline_bonus(YearGap gap);

TimelineOutcome score_timeline(TimelineChoice choice, Year left, Year right);

/// "This image was taken in {year}. Title: {title}", falling back to the
/// image id when the title is empty.
std::string feedback_year(Year actual, std::string_view title, std::string_view img_id);

/// Byte-exact: "Left image is from year {left} and the Right image is from year {right}".
std::string feedback_timeline(Year left, Year right);

}  // namespace photoyear
