#include "photoyear/catalog.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "photoyear/csv.hpp"

namespace photoyear {

std::string_view to_string(RejectReason reason) {
    switch (reason) {
        case RejectReason::MissingField: return "MissingField";
        case RejectReason::TooManyFields: return "TooManyFields";
        case RejectReason::NonIntegerYear: return "NonIntegerYear";
        case RejectReason::YearOutOfRange: return "YearOutOfRange";
        case RejectReason::BadGranularity: return "BadGranularity";
        case RejectReason::BadUrl: return "BadUrl";
        case RejectReason::UnresolvableYear: return "UnresolvableYear";
        case RejectReason::DuplicateId: return "DuplicateId";
    }
    return "Unknown";
}

std::string_view to_string(FetchErrorKind kind) {
    switch (kind) {
        case FetchErrorKind::FetchFailed: return "FetchFailed";
        case FetchErrorKind::DecodeFailed: return "DecodeFailed";
        case FetchErrorKind::WriteFailed: return "WriteFailed";
    }
    return "Unknown";
}

namespace {

const char* const kHeader[] = {"img_id", "gt_year", "date_taken", "date_granularity", "url", "title"};

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

std::optional<int> parse_int(std::string_view s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    int value = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return value;
}

bool plausible_url(std::string_view url) {
    for (std::string_view scheme : {"http://", "https://", "file://"}) {
        if (url.size() > scheme.size() && url.substr(0, scheme.size()) == scheme) {
            return url.find_first_of(" \t\r\n") == std::string_view::npos;
        }
    }
    return false;
}

}  // namespace

ResolvedYear resolve_year(const MetaRow& row) {
    if (row.gt_year) {
        if (auto year = Year::checked(*row.gt_year)) return {*year, false};
        throw Error(Errc::UnresolvableYear, "gt_year out of range for " + row.img_id);
    }
    const std::string_view taken = trim(row.date_taken);
    if (taken.size() >= 4) {
        bool digits = true;
        for (std::size_t i = 0; i < 4; ++i) digits = digits && taken[i] >= '0' && taken[i] <= '9';
        const bool bounded = taken.size() == 4 || !(taken[4] >= '0' && taken[4] <= '9');
        if (digits && bounded) {
            if (auto year = Year::checked(*parse_int(taken.substr(0, 4)))) return {*year, true};
        }
    }
    throw Error(Errc::UnresolvableYear, "no usable year for " + row.img_id);
}

std::variant<ImageRecord, RejectReason> parse_meta_row(const std::vector<std::string>& fields) {
    if (fields.size() < 5) return RejectReason::MissingField;
    if (fields.size() > 6) return RejectReason::TooManyFields;

    MetaRow row;
    row.img_id = std::string(trim(fields[0]));
    if (row.img_id.empty()) return RejectReason::MissingField;

    if (!trim(fields[1]).empty()) {
        row.gt_year = parse_int(fields[1]);
        if (!row.gt_year) return RejectReason::NonIntegerYear;
        if (!in_catalog_range(*row.gt_year)) return RejectReason::YearOutOfRange;
    }
    row.date_taken = fields[2];

    if (trim(fields[3]).empty()) return RejectReason::MissingField;
    const auto granularity = parse_int(fields[3]);
    if (!granularity || *granularity < 0) return RejectReason::BadGranularity;
    row.date_granularity = *granularity;

    row.url = std::string(trim(fields[4]));
    if (row.url.empty()) return RejectReason::MissingField;
    if (!plausible_url(row.url)) return RejectReason::BadUrl;

    if (fields.size() == 6) row.title = fields[5];

    if (!row.gt_year && trim(row.date_taken).empty()) return RejectReason::MissingField;

    std::optional<ResolvedYear> resolved;
    try {
        resolved = resolve_year(row);
    } catch (const Error&) {
        return RejectReason::UnresolvableYear;
    }
    return ImageRecord{
        .img_id = std::move(row.img_id),
        .gt_year = resolved->year,
        .date_taken = std::move(row.date_taken),
        .date_granularity = row.date_granularity,
        .url = std::move(row.url),
        .title = std::move(row.title),
        .needs_review = resolved->needs_review,
        .asset = std::nullopt,
    };
}

bool Catalog::add(ImageRecord record) {
    if (index_.contains(record.img_id)) return false;
    index_.emplace(record.img_id, records_.size());
    ++per_year_[record.gt_year.value()];
    records_.push_back(std::move(record));
    return true;
}

const ImageRecord* Catalog::find(std::string_view img_id) const {
    const auto idx = index_of(img_id);
    return idx ? &records_[*idx] : nullptr;
}

std::optional<std::size_t> Catalog::index_of(std::string_view img_id) const {
    const auto it = index_.find(std::string(img_id));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::vector<int> Catalog::missing_years() const {
    std::vector<int> out;
    for (int y = kFirstYear; y <= kLastYear; ++y) {
        if (!per_year_.contains(y)) out.push_back(y);
    }
    return out;
}

LoadResult load_catalog(std::istream& in, const LoadOptions& options) {
    if (!in) throw Error(Errc::UnreadableStream, "metadata stream is not readable");
    csv::Reader reader(in);
    const auto header = reader.next();
    if (in.bad()) throw Error(Errc::UnreadableStream, "read error in metadata stream");
    if (!header) throw Error(Errc::UnreadableStream, "metadata stream has no header row");

    std::vector<std::string> cols = *header;
    if (!cols.empty() && cols[0].starts_with("\xEF\xBB\xBF")) cols[0].erase(0, 3);
    for (auto& c : cols) c = std::string(trim(c));
    const bool header_ok = (cols.size() == 5 || cols.size() == 6) &&
                           std::equal(cols.begin(), cols.end(), std::begin(kHeader));
    if (!header_ok) throw Error(Errc::UnreadableStream, "unexpected metadata header: " + csv::join_row(*header));

    LoadResult result;
    std::size_t row_no = 0;
    while (auto fields = reader.next()) {
        ++row_no;
        auto parsed = parse_meta_row(*fields);
        if (auto* reason = std::get_if<RejectReason>(&parsed)) {
            result.report.rejected.push_back({row_no, *reason, fields->empty() ? "" : (*fields)[0]});
            continue;
        }
        auto& record = std::get<ImageRecord>(parsed);
        const bool review = record.needs_review;
        std::string id = record.img_id;
        if (!result.catalog.add(std::move(record))) {
            result.report.rejected.push_back({row_no, RejectReason::DuplicateId, std::move(id)});
            continue;
        }
        ++result.report.accepted;
        if (review) ++result.report.needs_review;
    }
    if (in.bad()) throw Error(Errc::UnreadableStream, "read error in metadata stream");

    result.report.total_rows = row_no;
    result.report.missing_years = result.catalog.missing_years();
    result.coverage_ok = options.allow_partial_years || result.report.missing_years.empty();
    return result;
}

LoadResult load_catalog_file(const std::filesystem::path& path, const LoadOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::UnreadableStream, "cannot open " + path.string());
    return load_catalog(in, options);
}

void write_catalog(std::ostream& out, const Catalog& catalog) {
    out << csv::join_row({std::begin(kHeader), std::end(kHeader)}) << '\n';
    for (const auto& r : catalog.records()) {
        out << csv::join_row({
                   r.img_id,
                   r.needs_review ? std::string() : std::to_string(r.gt_year.value()),
                   r.date_taken,
                   std::to_string(r.date_granularity),
                   r.url,
                   r.title,
               })
            << '\n';
    }
}

CoverageReport validate_catalog(const Catalog& catalog, double imbalance_factor) {
    CoverageReport report;
    constexpr int kYears = kLastYear - kFirstYear + 1;
    for (int y = kFirstYear; y <= kLastYear; ++y) {
        const auto it = catalog.per_year_counts().find(y);
        report.per_year[y] = it == catalog.per_year_counts().end() ? 0 : it->second;
    }
    report.missing_years = catalog.missing_years();
    report.mean_per_year = static_cast<double>(catalog.size()) / kYears;
    if (report.mean_per_year > 0.0 && imbalance_factor > 0.0) {
        const double high = report.mean_per_year * imbalance_factor;
        const double low = report.mean_per_year / imbalance_factor;
        for (const auto& [year, count] : report.per_year) {
            if (count == 0) continue;
            const auto c = static_cast<double>(count);
            if (c > high || c < low) report.imbalanced_years.push_back(year);
        }
    }
    return report;
}

}  // namespace photoyear
