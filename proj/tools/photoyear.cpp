// Operator CLI: catalog ingestion, gameplay statistics, schema migration and
// the HTTP service.

#include <CLI11.hpp>

#include <csignal>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <thread>

#include "photoyear/analytics.hpp"
#include "photoyear/api.hpp"
#include "photoyear/assets.hpp"
#include "photoyear/catalog.hpp"
#include "photoyear/config.hpp"
#include "photoyear/store.hpp"

using namespace photoyear;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitIncomplete = 2;

// YYYY-MM-DD at UTC midnight.
std::optional<Timestamp> parse_date(const std::string& text) {
    int y = 0;
    unsigned m = 0;
    unsigned d = 0;
    char tail = 0;
    if (std::sscanf(text.c_str(), "%4d-%2u-%2u%c", &y, &m, &d, &tail) != 3) return std::nullopt;
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    if (!ymd.ok()) return std::nullopt;
    return std::chrono::time_point_cast<std::chrono::milliseconds>(std::chrono::sys_days{ymd});
}

std::string pct_or_dash(const std::optional<Tenths>& v) { return v ? v->to_string() : "-"; }
std::string pct_or_dash(const std::optional<Cents>& v) { return v ? v->to_string() : "-"; }

struct IngestArgs {
    std::string meta;
    std::string dest;
    std::string report;
    bool fetch = false;
    int workers = 4;
    bool allow_partial = false;
};

int run_ingest(const IngestArgs& args) {
    LoadResult result;
    try {
        result = load_catalog_file(args.meta, {args.allow_partial});
    } catch (const Error& e) {
        std::cerr << "ingest: " << e.what() << '\n';
        return kExitFailure;
    }
    std::filesystem::create_directories(args.dest);
    if (args.fetch) {
        fetch_catalog_assets(result.catalog, {.dest = args.dest, .workers = args.workers}, result.report);
    } else {
        attach_existing_assets(result.catalog, args.dest);
    }

    std::ofstream out(args.report);
    if (!out) {
        std::cerr << "ingest: cannot write report " << args.report << '\n';
        return kExitFailure;
    }
    const auto& r = result.report;
    out << "total_rows," << r.total_rows << '\n'
        << "accepted," << r.accepted << '\n'
        << "rejected," << r.rejected.size() << '\n'
        << "needs_review," << r.needs_review << '\n'
        << "fetch_failures," << r.fetch_failures.size() << '\n';
    for (const auto& rej : r.rejected) out << "reject," << rej.row << ',' << to_string(rej.reason) << '\n';
    for (const auto& f : r.fetch_failures) out << "fetch," << f.img_id << ',' << to_string(f.kind) << '\n';
    for (int y : r.missing_years) out << "missing_year," << y << '\n';

    const auto coverage = validate_catalog(result.catalog);
    for (int y : coverage.imbalanced_years) out << "imbalanced_year," << y << '\n';

    std::ofstream catalog_out(std::filesystem::path(args.dest) / "meta.csv");
    write_catalog(catalog_out, result.catalog);

    std::cerr << "ingest: " << r.accepted << "/" << r.total_rows << " rows accepted, " << r.rejected.size()
              << " rejected, " << r.fetch_failures.size() << " fetch failures\n";
    if (!r.clean() || !result.coverage_ok) return kExitIncomplete;
    return kExitOk;
}

struct StatsArgs {
    std::string storage;
    std::string from;
    std::string to;
    bool include_demo = false;
    std::string format = "table";
};

int run_stats(const StatsArgs& args) {
    PlayFilter filter;
    filter.include_demo = args.include_demo;
    if (!args.from.empty() && !(filter.from = parse_date(args.from))) {
        std::cerr << "stats: --from must be YYYY-MM-DD\n";
        return kExitFailure;
    }
    if (!args.to.empty() && !(filter.to = parse_date(args.to))) {
        std::cerr << "stats: --to must be YYYY-MM-DD\n";
        return kExitFailure;
    }
    auto store = open_store(args.storage);
    const auto catalog = store->images();
    const auto plays = store->plays(filter);
    const auto unanswered = store->unanswered_rounds(filter);
    const auto decades = decade_stats(plays, catalog, {args.include_demo}, unanswered);
    const auto modes = mode_accuracy(plays);

    if (args.format == "csv") {
        std::cout << "decade,total_guesses,total_images_shown,correct_pct\n";
        for (const auto& d : decades) {
            std::cout << d.decade.label() << ',' << d.total_guesses << ',' << d.total_images_shown << ','
                      << (d.correct_pct ? d.correct_pct->to_string() : "") << '\n';
        }
        std::cout << "\nmode,plays,accuracy_pct\n"
                  << "guess_the_year," << modes.guess_year_plays << ','
                  << (modes.guess_year ? modes.guess_year->to_string() : "") << '\n'
                  << "timeline," << modes.timeline_plays << ','
                  << (modes.timeline ? modes.timeline->to_string() : "") << '\n';
        return kExitOk;
    }
    std::cout << std::left << std::setw(8) << "decade" << std::right << std::setw(10) << "guesses" << std::setw(10)
              << "shown" << std::setw(10) << "correct%" << '\n';
    for (const auto& d : decades) {
        std::cout << std::left << std::setw(8) << d.decade.label() << std::right << std::setw(10) << d.total_guesses
                  << std::setw(10) << d.total_images_shown << std::setw(10) << pct_or_dash(d.correct_pct) << '\n';
    }
    std::cout << '\n'
              << std::left << std::setw(16) << "mode" << std::right << std::setw(8) << "plays" << std::setw(12)
              << "accuracy%" << '\n'
              << std::left << std::setw(16) << "guess_the_year" << std::right << std::setw(8)
              << modes.guess_year_plays << std::setw(12) << pct_or_dash(modes.guess_year) << '\n'
              << std::left << std::setw(16) << "timeline" << std::right << std::setw(8) << modes.timeline_plays
              << std::setw(12) << pct_or_dash(modes.timeline) << '\n';
    return kExitOk;
}

int run_serve(const std::optional<std::string>& config_file) {
    const auto config = load_config(config_file ? std::optional<std::filesystem::path>(*config_file) : std::nullopt);
    validate_paths(config);

    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    ApiService service(config);
    const int port = service.bind(config.host, config.port);
    if (port < 0) {
        std::cerr << "serve: cannot bind " << config.host << ':' << config.port << '\n';
        return kExitFailure;
    }
    log_event("listening", {{"host", config.host}, {"port", port}});

    std::thread server([&] { service.listen(); });
    std::thread waiter([&] {
        int sig = 0;
        sigwait(&signals, &sig);
        log_event("shutdown", {{"signal", sig}});
        service.stop();
    });
    try {
        service.load();
    } catch (const Error& e) {
        log_event("load_failed", {{"message", e.what()}});
        service.stop();
        server.join();
        pthread_kill(waiter.native_handle(), SIGTERM);
        waiter.join();
        return kExitFailure;
    }
    server.join();
    waiter.join();
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"photoyear: historical photo dating game"};
    app.require_subcommand(1);

    IngestArgs ingest;
    auto* ingest_cmd = app.add_subcommand("ingest", "Validate meta.csv and prepare resized image assets");
    ingest_cmd->add_option("--meta", ingest.meta, "Metadata CSV")->required();
    ingest_cmd->add_option("--dest", ingest.dest, "Asset directory")->required();
    ingest_cmd->add_option("--report", ingest.report, "Report output path")->required();
    ingest_cmd->add_flag("--fetch", ingest.fetch, "Download and resize images");
    ingest_cmd->add_option("--workers", ingest.workers, "Parallel downloads")->check(CLI::Range(1, 64));
    ingest_cmd->add_flag("--allow-partial-years", ingest.allow_partial, "Accept years with no images");

    StatsArgs stats;
    auto* stats_cmd = app.add_subcommand("stats", "Per-decade accuracy and mode accuracy from gameplay logs");
    stats_cmd->add_option("--storage", stats.storage, "SQLite database")->required();
    stats_cmd->add_option("--from", stats.from, "Start date, inclusive (YYYY-MM-DD)");
    stats_cmd->add_option("--to", stats.to, "End date, exclusive (YYYY-MM-DD)");
    stats_cmd->add_flag("--include-demo", stats.include_demo, "Count demo plays");
    stats_cmd->add_option("--format", stats.format)->check(CLI::IsMember({"table", "csv"}));

    std::string migrate_storage;
    auto* migrate_cmd = app.add_subcommand("migrate", "Create or upgrade the database schema");
    migrate_cmd->add_option("--storage", migrate_storage, "SQLite database")->required();

    std::optional<std::string> config_file;
    auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP service");
    serve_cmd->add_option("--config", config_file, "JSON config file");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*ingest_cmd) return run_ingest(ingest);
        if (*stats_cmd) return run_stats(stats);
        if (*migrate_cmd) {
            auto store = open_store(migrate_storage);
            std::cout << "schema version " << store->schema_version() << '\n';
            return kExitOk;
        }
        if (*serve_cmd) return run_serve(config_file);
    } catch (const Error& e) {
        std::cerr << argv[0] << ": " << to_string(e.code()) << ": " << e.what() << '\n';
        return kExitFailure;
    } catch (const std::exception& e) {
        std::cerr << argv[0] << ": " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitFailure;
}
