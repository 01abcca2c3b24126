#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "photoyear/catalog.hpp"

namespace photoyear {

inline constexpr Size kMaxAssetSize{800, 600};

/// Largest size that fits inside `box` with the source aspect ratio.
/// Never upscales: sources already inside the box come back unchanged.
Size fit_within(Size source, Size box = kMaxAssetSize);

/// File-system-safe name for an image id. Bytes outside [A-Za-z0-9_.-]
/// (and a leading '.') become %XX, so distinct ids never collide.
std::string sanitize_id(std::string_view img_id);

std::filesystem::path asset_path_for(const std::filesystem::path& dest, std::string_view img_id);

struct FetchOptions {
    std::filesystem::path dest;
    Size max_size = kMaxAssetSize;
    int workers = 4;
    long timeout_secs = 30;
    int jpeg_quality = 90;
};

struct FetchOutcome {
    ImageRecord record;
    std::optional<FetchFailure> failure;
};

/// Downloads `record.url` (http, https or file), scales it to fit
/// `max_size` and writes `{dest}/{sanitized id}.jpg`. Never throws on
/// per-record problems; they come back in `failure` with the record unchanged.
FetchOutcome fetch_and_resize(const ImageRecord& record, const FetchOptions& options);

/// Runs fetch_and_resize over the whole catalog with `options.workers`
/// threads. Failures are appended to the report in catalog order.
void fetch_catalog_assets(Catalog& catalog, const FetchOptions& options, IngestReport& report);

/// Sets `asset` on every record whose file already exists under `dir`.
/// Returns how many records have an asset afterwards.
std::size_t attach_existing_assets(Catalog& catalog, const std::filesystem::path& dir);

/// Decode, fit and re-encode as JPEG. Used by fetch_and_resize; exposed for tests.
struct ResizedImage {
    std::vector<std::uint8_t> jpeg;
    Size source;
    Size size;
};
std::optional<ResizedImage> resize_encoded(const std::vector<std::uint8_t>& bytes, Size max_size,
                                           int jpeg_quality = 90);

}  // namespace photoyear
