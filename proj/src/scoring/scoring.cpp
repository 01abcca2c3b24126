#include "photoyear/scoring.hpp"

#include <algorithm>

namespace photoyear {

Year::Year(int value) : value_(value) {
    if (!in_catalog_range(value)) {
        throw Error(Errc::YearOutOfRange, "year " + std::to_string(value) + " outside [1930, 1999]");
    }
}

YearGuess::YearGuess(int value) : value_(value) {
    if (!in_catalog_range(value)) {
        throw Error(Errc::GuessOutOfRange, "guess " + std::to_string(value) + " outside [1930, 1999]");
    }
}

std::string_view to_string(TimelineChoice choice) {
    return choice == TimelineChoice::Left ? "left" : "right";
}

std::optional<TimelineChoice> parse_timeline_choice(std::string_view text) {
    if (text == "left") return TimelineChoice::Left;
    if (text == "right") return TimelineChoice::Right;
    return std::nullopt;
}

namespace {

int abs_diff(int a, int b) { return a > b ? a - b : b - a; }

}  // namespace

int score_year_static(YearGuess guess, Year actual) {
    return abs_diff(guess.value(), actual.value()) <= kYearTolerance ? kStaticAward : 0;
}

Cents dynamic_points_for_error(int abs_error) {
    if (abs_error < 0) throw std::invalid_argument("negative year error");
    const int clamped = std::min(abs_error, 100);
    // 10 * (100 - clamped) / 100
    return Cents::from_ratio(10 * (100 - clamped), 100);
}

Cents score_year_dynamic(YearGuess guess, Year actual) {
    return dynamic_points_for_error(abs_diff(guess.value(), actual.value()));
}

bool timeline_correct(TimelineChoice choice, Year left, Year right) {
    if (left == right) {
        throw Error(Errc::EqualYears, "timeline round with equal years " + std::to_string(left.value()));
    }
    return choice == TimelineChoice::Left ? left < right : right < left;
}

Cents timeline_bonus(YearGap gap) {
    const int d = gap.delta;
    if (d <= 0) throw Error(Errc::ZeroGap, "timeline gap must be at least one year");
    if (d <= 10) return Cents::from_integer(5);
    if (d <= 50) return Cents::from_ratio(5 * (40 - (d - 10)), 40);
    return Cents::from_ratio(5, 10);
}

TimelineOutcome score_timeline(TimelineChoice choice, Year left, Year right) {
    TimelineOutcome out;
    out.correct = timeline_correct(choice, left, right);
    if (out.correct) {
        out.points.static_points = kStaticAward;
        out.points.dynamic_points = timeline_bonus(YearGap::between(left, right));
    }
    out.feedback = feedback_timeline(left, right);
    return out;
}

std::string feedback_year(Year actual, std::string_view title, std::string_view img_id) {
    std::string out = "This image was taken in " + std::to_string(actual.value()) + ". Title: ";
    out += title.empty() ? img_id : title;
    return out;
}

std::string feedback_timeline(Year left, Year right) {
    return "Left image is from year " + std::to_string(left.value()) + " and the Right image is from year " +
           std::to_string(right.value());
}

}  // namespace photoyear
