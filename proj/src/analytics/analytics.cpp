#include "photoyear/analytics.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

namespace photoyear {

std::optional<Cents> accuracy(std::int64_t correct, std::int64_t total) {
    if (correct < 0 || total < 0) throw std::invalid_argument("negative count");
    if (correct > total) throw Error(Errc::CorrectExceedsTotal, "correct count exceeds total");
    if (total == 0) return std::nullopt;
    return Cents::from_ratio(100 * correct, total);
}

Decade decade_of(Year year) { return Decade{year.value() / 10 * 10}; }

std::vector<Attribution> attribute_play(const GamePlay& play) {
    std::vector<Attribution> out;
    out.reserve(play.image_ids.size());
    for (const auto& id : play.image_ids) out.push_back({id, play.correct});
    return out;
}

std::vector<DecadeStats> decade_stats(const std::vector<GamePlay>& plays, const Catalog& catalog,
                                      const DecadeOptions& options, const std::vector<ServedRound>& unanswered) {
    std::map<Decade, DecadeStats> rows;
    for (auto d : kDecades) rows[d].decade = d;

    auto decade_for = [&](const std::string& img_id) {
        const auto* record = catalog.find(img_id);
        if (!record) throw Error(Errc::UnknownImage, "unknown image " + img_id);
        return decade_of(record->gt_year);
    };

    for (const auto& play : plays) {
        if (play.is_demo() && !options.include_demo) continue;
        for (const auto& a : attribute_play(play)) {
            auto& row = rows[decade_for(a.img_id)];
            ++row.total_guesses;
            ++row.total_images_shown;
            if (a.correct) ++row.correct_guesses;
        }
    }
    for (const auto& round : unanswered) {
        if (!round.user_id && !options.include_demo) continue;
        for (const auto& id : round.image_ids) ++rows[decade_for(id)].total_images_shown;
    }

    std::vector<DecadeStats> out;
    for (auto& [decade, row] : rows) {
        if (row.total_guesses > 0) row.correct_pct = Tenths::from_ratio(100 * row.correct_guesses, row.total_guesses);
        out.push_back(row);
    }
    return out;
}

ModeAccuracy mode_accuracy(const std::vector<GamePlay>& plays) {
    std::int64_t year_correct = 0;
    std::int64_t timeline_correct = 0;
    ModeAccuracy out;
    for (const auto& p : plays) {
        if (p.mode == GameMode::GuessYear) {
            ++out.guess_year_plays;
            year_correct += p.correct;
        } else {
            ++out.timeline_plays;
            timeline_correct += p.correct;
        }
    }
    out.guess_year = accuracy(year_correct, out.guess_year_plays);
    out.timeline = accuracy(timeline_correct, out.timeline_plays);
    return out;
}

std::vector<AgeGroupRow> age_group_accuracy(const std::vector<GamePlay>& plays,
                                            const std::vector<UserAccount>& users) {
    std::unordered_map<UserId, std::optional<AgeBracket>> bracket_of;
    for (const auto& u : users) bracket_of[u.id] = u.age_bracket;

    // Index 0..3 for the brackets, 4 for unspecified.
    std::array<std::vector<GamePlay>, 5> groups;
    for (const auto& p : plays) {
        if (p.is_demo()) continue;
        const auto it = bracket_of.find(*p.user_id);
        const auto bracket = it == bracket_of.end() ? std::nullopt : it->second;
        groups[bracket ? static_cast<std::size_t>(*bracket) : 4].push_back(p);
    }

    std::vector<AgeGroupRow> out;
    for (std::size_t i = 0; i < groups.size(); ++i) {
        if (groups[i].empty()) continue;
        out.push_back({i < 4 ? std::string(to_string(static_cast<AgeBracket>(i))) : "unspecified",
                       mode_accuracy(groups[i])});
    }
    return out;
}

EngagementSummary engagement(const std::vector<GamePlay>& plays, const std::vector<UserAccount>& users) {
    std::set<UserId> known;
    for (const auto& u : users) known.insert(u.id);

    std::map<UserId, std::int64_t> counts;
    EngagementSummary out;
    for (const auto& p : plays) {
        if (p.is_demo() || !known.contains(*p.user_id)) continue;
        ++counts[*p.user_id];
        ++out.total_plays;
    }
    out.active_user_count = counts.size();
    if (out.total_plays == 0) return out;

    std::vector<std::int64_t> sorted;
    for (const auto& [id, n] : counts) sorted.push_back(n);
    std::sort(sorted.begin(), sorted.end(), std::greater<>());

    out.top_decile_user_count = (sorted.size() + 9) / 10;
    for (std::size_t i = 0; i < out.top_decile_user_count; ++i) out.top_decile_plays += sorted[i];
    out.top_decile_play_share = Cents::from_ratio(100 * out.top_decile_plays, out.total_plays);
    out.avg_plays_top_decile =
        Tenths::from_ratio(out.top_decile_plays, static_cast<std::int64_t>(out.top_decile_user_count));
    return out;
}

std::int64_t iso_week_index(Timestamp t) {
    using namespace std::chrono;
    const auto days = floor<std::chrono::days>(t).time_since_epoch().count();
    // 1970-01-01 was a Thursday; shift so weeks start on Monday.
    const std::int64_t shifted = days + 3;
    return shifted >= 0 ? shifted / 7 : (shifted - 6) / 7;
}

std::optional<Cents> retention(const std::vector<GamePlay>& plays, const std::vector<UserAccount>& users,
                               const RetentionOptions& options) {
    if (users.empty()) return std::nullopt;
    std::map<UserId, std::set<std::int64_t>> weeks;
    for (const auto& u : users) weeks[u.id];
    for (const auto& p : plays) {
        if (p.is_demo() || p.played_at < options.from || p.played_at >= options.to) continue;
        const auto it = weeks.find(*p.user_id);
        if (it != weeks.end()) it->second.insert(iso_week_index(p.played_at));
    }
    std::int64_t retained = 0;
    for (const auto& [id, w] : weeks) retained += static_cast<std::int64_t>(w.size()) >= options.min_active_weeks;
    return Cents::from_ratio(100 * retained, static_cast<std::int64_t>(weeks.size()));
}

}  // namespace photoyear
