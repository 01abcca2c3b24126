#include "photoyear/assets.hpp"

#include <curl/curl.h>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>
#include <thread>

namespace photoyear {

Size fit_within(Size source, Size box) {
    if (source.width <= 0 || source.height <= 0) return {0, 0};
    if (source.width <= box.width && source.height <= box.height) return source;
    const auto w = static_cast<std::int64_t>(source.width);
    const auto h = static_cast<std::int64_t>(source.height);
    // Compare aspect ratios without division: w/h >= box.w/box.h.
    if (w * box.height >= h * box.width) {
        const auto scaled = (2 * h * box.width + w) / (2 * w);  // round(h * box.w / w)
        return {box.width, static_cast<int>(std::clamp<std::int64_t>(scaled, 1, box.height))};
    }
    const auto scaled = (2 * w * box.height + h) / (2 * h);
    return {static_cast<int>(std::clamp<std::int64_t>(scaled, 1, box.width)), box.height};
}

std::string sanitize_id(std::string_view img_id) {
    static constexpr char kHex[] = "0123456789ABCDEF";
    std::string out;
    out.reserve(img_id.size());
    for (std::size_t i = 0; i < img_id.size(); ++i) {
        const auto c = static_cast<unsigned char>(img_id[i]);
        const bool plain = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                           c == '_' || c == '-' || (c == '.' && i != 0);
        if (plain) {
            out += static_cast<char>(c);
        } else {
            out += '%';
            out += kHex[c >> 4];
            out += kHex[c & 0x0F];
        }
    }
    return out;
}

std::filesystem::path asset_path_for(const std::filesystem::path& dest, std::string_view img_id) {
    return dest / (sanitize_id(img_id) + ".jpg");
}

namespace {

void ensure_curl_init() {
    static std::once_flag once;
    std::call_once(once, [] { curl_global_init(CURL_GLOBAL_DEFAULT); });
}

std::size_t append_bytes(char* data, std::size_t size, std::size_t count, void* user) {
    auto* buf = static_cast<std::vector<std::uint8_t>*>(user);
    buf->insert(buf->end(), data, data + size * count);
    return size * count;
}

struct Download {
    std::vector<std::uint8_t> bytes;
    std::string error;
};

Download download(const std::string& url, long timeout_secs) {
    ensure_curl_init();
    Download out;
    std::unique_ptr<CURL, decltype(&curl_easy_cleanup)> curl(curl_easy_init(), &curl_easy_cleanup);
    if (!curl) {
        out.error = "curl_easy_init failed";
        return out;
    }
    char errbuf[CURL_ERROR_SIZE] = {0};
    curl_easy_setopt(curl.get(), CURLOPT_URL, url.c_str());
    curl_easy_setopt(curl.get(), CURLOPT_PROTOCOLS, CURLPROTO_HTTP | CURLPROTO_HTTPS | CURLPROTO_FILE);
    curl_easy_setopt(curl.get(), CURLOPT_REDIR_PROTOCOLS, CURLPROTO_HTTP | CURLPROTO_HTTPS);
    curl_easy_setopt(curl.get(), CURLOPT_FOLLOWLOCATION, 1L);
    curl_easy_setopt(curl.get(), CURLOPT_MAXREDIRS, 5L);
    curl_easy_setopt(curl.get(), CURLOPT_FAILONERROR, 1L);
    curl_easy_setopt(curl.get(), CURLOPT_TIMEOUT, timeout_secs);
    curl_easy_setopt(curl.get(), CURLOPT_NOSIGNAL, 1L);
    curl_easy_setopt(curl.get(), CURLOPT_ERRORBUFFER, errbuf);
    curl_easy_setopt(curl.get(), CURLOPT_WRITEFUNCTION, &append_bytes);
    curl_easy_setopt(curl.get(), CURLOPT_WRITEDATA, &out.bytes);
    const CURLcode rc = curl_easy_perform(curl.get());
    if (rc != CURLE_OK) {
        out.error = errbuf[0] ? errbuf : curl_easy_strerror(rc);
        out.bytes.clear();
    }
    return out;
}

bool write_atomically(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
    auto tmp = path;
    tmp += ".part";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) return false;
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!out) return false;
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) std::filesystem::remove(tmp, ec);
    return !ec;
}

}  // namespace

std::optional<ResizedImage> resize_encoded(const std::vector<std::uint8_t>& bytes, Size max_size,
                                           int jpeg_quality) {
    if (bytes.empty()) return std::nullopt;
    cv::Mat image;
    try {
        image = cv::imdecode(cv::Mat(1, static_cast<int>(bytes.size()), CV_8UC1, const_cast<std::uint8_t*>(bytes.data())),
                             cv::IMREAD_COLOR);
    } catch (const cv::Exception&) {
        return std::nullopt;
    }
    if (image.empty()) return std::nullopt;

    ResizedImage out;
    out.source = {image.cols, image.rows};
    out.size = fit_within(out.source, max_size);
    cv::Mat scaled = image;
    if (out.size != out.source) {
        cv::resize(image, scaled, cv::Size(out.size.width, out.size.height), 0, 0, cv::INTER_AREA);
    }
    if (!cv::imencode(".jpg", scaled, out.jpeg, {cv::IMWRITE_JPEG_QUALITY, jpeg_quality})) return std::nullopt;
    return out;
}

FetchOutcome fetch_and_resize(const ImageRecord& record, const FetchOptions& options) {
    FetchOutcome outcome{record, std::nullopt};
    auto fail = [&](FetchErrorKind kind, std::string cause) {
        outcome.failure = FetchFailure{record.img_id, kind, std::move(cause)};
        return outcome;
    };

    auto fetched = download(record.url, options.timeout_secs);
    if (!fetched.error.empty()) return fail(FetchErrorKind::FetchFailed, fetched.error);

    auto resized = resize_encoded(fetched.bytes, options.max_size, options.jpeg_quality);
    if (!resized) return fail(FetchErrorKind::DecodeFailed, "could not decode image from " + record.url);

    const auto path = asset_path_for(options.dest, record.img_id);
    if (!write_atomically(path, resized->jpeg)) return fail(FetchErrorKind::WriteFailed, "cannot write " + path.string());

    outcome.record.asset = Asset{path, resized->size};
    return outcome;
}

void fetch_catalog_assets(Catalog& catalog, const FetchOptions& options, IngestReport& report) {
    const std::size_t n = catalog.size();
    std::error_code ec;
    std::filesystem::create_directories(options.dest, ec);
    std::vector<std::optional<FetchOutcome>> outcomes(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            outcomes[i] = fetch_and_resize(catalog.records()[i], options);
        }
    };
    const int count = std::max(1, std::min<int>(options.workers, static_cast<int>(std::max<std::size_t>(n, 1))));
    std::vector<std::jthread> pool;
    for (int i = 0; i < count; ++i) pool.emplace_back(worker);
    pool.clear();

    for (std::size_t i = 0; i < n; ++i) {
        if (outcomes[i]->failure) {
            report.fetch_failures.push_back(std::move(*outcomes[i]->failure));
        } else if (outcomes[i]->record.asset) {
            catalog.set_asset(i, *outcomes[i]->record.asset);
        }
    }
}

std::size_t attach_existing_assets(Catalog& catalog, const std::filesystem::path& dir) {
    std::size_t attached = 0;
    for (std::size_t i = 0; i < catalog.size(); ++i) {
        const auto& record = catalog.records()[i];
        if (record.asset) {
            ++attached;
            continue;
        }
        auto path = asset_path_for(dir, record.img_id);
        std::error_code ec;
        if (std::filesystem::is_regular_file(path, ec)) {
            catalog.set_asset(i, Asset{std::move(path), std::nullopt});
            ++attached;
        }
    }
    return attached;
}

}  // namespace photoyear
