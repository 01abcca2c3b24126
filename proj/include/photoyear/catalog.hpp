#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "photoyear/scoring.hpp"

namespace photoyear {

struct Size {
    int width = 0;
    int height = 0;
    friend bool operator==(const Size&, const Size&) = default;
};

struct Asset {
    std::filesystem::path path;
    /// Known when the asset was produced by fetch_and_resize in this process.
    std::optional<Size> size;
    friend bool operator==(const Asset&, const Asset&) = default;
};

struct ImageRecord {
    std::string img_id;
    Year gt_year;
    std::string date_taken;
    int date_granularity = 0;
    std::string url;
    std::string title;
    /// Year came from date_taken rather than gt_year and awaits review.
    bool needs_review = false;
    std::optional<Asset> asset;

    friend bool operator==(const ImageRecord&, const ImageRecord&) = default;
};

enum class RejectReason {
    MissingField,
    TooManyFields,
    NonIntegerYear,
    YearOutOfRange,
    BadGranularity,
    BadUrl,
    UnresolvableYear,
    DuplicateId,
};

std::string_view to_string(RejectReason reason);

struct RowRejection {
    /// 1-based data row; the header is row 0.
    std::size_t row = 0;
    RejectReason reason = RejectReason::MissingField;
    std::string detail;
};

enum class FetchErrorKind { FetchFailed, DecodeFailed, WriteFailed };

std::string_view to_string(FetchErrorKind kind);

struct FetchFailure {
    std::string img_id;
    FetchErrorKind kind = FetchErrorKind::FetchFailed;
    std::string cause;
};

struct IngestReport {
    std::size_t total_rows = 0;
    std::size_t accepted = 0;
    std::vector<RowRejection> rejected;
    std::vector<int> missing_years;
    std::vector<FetchFailure> fetch_failures;
    std::size_t needs_review = 0;

    bool clean() const { return rejected.empty() && fetch_failures.empty(); }
};

/// A metadata row after field parsing but before the year is resolved.
struct MetaRow {
    std::string img_id;
    std::optional<int> gt_year;
    std::string date_taken;
    int date_granularity = 0;
    std::string url;
    std::string title;
};

struct ResolvedYear {
    Year year;
    bool needs_review = false;
};

/// gt_year when present; otherwise a leading 4-digit year in date_taken
/// (flagged for review). Throws Error{UnresolvableYear}.
ResolvedYear resolve_year(const MetaRow& row);

/// Validates one row (img_id, gt_year, date_taken, date_granularity, url[, title]).
/// Duplicate ids are a catalog-level check and are not detected here.
std::variant<ImageRecord, RejectReason> parse_meta_row(const std::vector<std::string>& fields);

class Catalog {
public:
    Catalog() = default;

    /// False (and no change) when img_id is already present.
    bool add(ImageRecord record);

    const std::vector<ImageRecord>& records() const { return records_; }
    std::size_t size() const { return records_.size(); }
    bool empty() const { return records_.empty(); }

    const ImageRecord* find(std::string_view img_id) const;
    std::optional<std::size_t> index_of(std::string_view img_id) const;

    void set_asset(std::size_t index, Asset asset) { records_.at(index).asset = std::move(asset); }

    const std::map<int, std::size_t>& per_year_counts() const { return per_year_; }
    std::size_t distinct_years() const { return per_year_.size(); }
    /// Years in [1930, 1999] without a single image, ascending.
    std::vector<int> missing_years() const;

    friend bool operator==(const Catalog& a, const Catalog& b) { return a.records_ == b.records_; }

private:
    std::vector<ImageRecord> records_;
    std::unordered_map<std::string, std::size_t> index_;
    std::map<int, std::size_t> per_year_;
};

struct LoadOptions {
    /// Accept catalogs that leave some years uncovered (fixtures, partial fetches).
    bool allow_partial_years = false;
};

struct LoadResult {
    Catalog catalog;
    IngestReport report;
    /// Every year covered, or partial coverage explicitly allowed.
    bool coverage_ok = false;
};

/// Reads a header-bearing meta.csv stream. Row-level problems go to the
/// report; only an unreadable stream or a wrong header throws
/// (Error{UnreadableStream}). Duplicate ids: first occurrence wins.
LoadResult load_catalog(std::istream& in, const LoadOptions& options = {});
LoadResult load_catalog_file(const std::filesystem::path& path, const LoadOptions& options = {});

/// Writes the extended schema (with title). Records whose year came from
/// date_taken are written with an empty gt_year so that reloading flags
/// them again.
void write_catalog(std::ostream& out, const Catalog& catalog);

struct CoverageReport {
    std::map<int, std::size_t> per_year;  // all 70 years, zero-filled
    std::vector<int> missing_years;
    double mean_per_year = 0.0;
    /// Covered years whose count is above mean × factor or below mean / factor.
    std::vector<int> imbalanced_years;

    bool has_warnings() const { return !missing_years.empty() || !imbalanced_years.empty(); }
};

CoverageReport validate_catalog(const Catalog& catalog, double imbalance_factor = 2.0);

}  // namespace photoyear
