#pragma once

// Config-driven pipeline behind the `spillnet` command line tool.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "spillnet/ingest.hpp"
#include "spillnet/rolling.hpp"

namespace spillnet::app {

struct AssetSource {
    std::string id;
    std::filesystem::path path;  // resolved against the config directory
};

struct SpilloverOptions {
    rolling::RollingConfig rolling;
    std::vector<int> robustness_windows;
};

/// Everything a run needs, resolved from the config file and CLI overrides.
///
/// Config file (JSON):
///   assets            [{"id", "path"}]       tick CSVs, needed by ingest
///   timezone          "America/Chicago"
///   session           {"start": "17:00", "end": "16:00"}
///   interval_minutes  5
///   min_ticks         10
///   exclusions        {"weekends", "year_end", "us_federal_holidays", "holidays": [dates]}
///   output_dir        "out"
///   measures          optional measures.csv to analyse instead of <output_dir>/measures.csv
///   spillover         {"mode", "window", "horizon", "lags", "bootstrap", "block_length",
///                      "ci_level", "seed", "jobs", "transform", "block_order",
///                      "rank_policy", "robustness_windows"}
struct RunConfig {
    std::filesystem::path config_path;
    std::string config_sha256;
    std::vector<AssetSource> assets;
    std::string timezone = "America/Chicago";
    ingest::SessionHours session;
    ingest::IngestOptions ingest;
    bool exclude_weekends = true;
    bool exclude_year_end = true;
    bool exclude_us_federal_holidays = true;
    std::vector<Date> holidays;
    std::filesystem::path output_dir;
    std::optional<std::filesystem::path> measures_path;
    SpilloverOptions spillover;

    std::filesystem::path measures_file() const;
    nlohmann::json ingest_parameters() const;
    nlohmann::json spillover_parameters() const;
};

/// Reads and validates the config. Throws Config on any problem.
RunConfig load_config(const std::filesystem::path& path);

struct IngestSummary {
    std::size_t grids = 0;
    std::size_t dropped_days = 0;
    std::size_t malformed_rows = 0;
};

IngestSummary cmd_ingest(const RunConfig& cfg);

struct MeasuresSummary {
    std::size_t days = 0;
    std::size_t assets = 0;
    std::vector<Date> dropped_dates;
};

MeasuresSummary cmd_measures(const RunConfig& cfg);

struct SpilloverSummary {
    std::size_t snapshots = 0;
    std::size_t gaps = 0;
    double full_sample_total = 0.0;
};

SpilloverSummary cmd_spillover(const RunConfig& cfg);

void cmd_plotdata(const RunConfig& cfg);

/// Parses argv, runs the subcommand and returns the process exit code.
int run_cli(int argc, const char* const* argv);

// --- manifest -----------------------------------------------------------------

std::string sha256_file(const std::filesystem::path& path);
std::string sha256_bytes(std::string_view bytes);

/// Merges a stage record into <output_dir>/manifest.json (one manifest per
/// output directory; each stage overwrites its own entry).
void record_stage(const RunConfig& cfg, const std::string& stage, nlohmann::json stage_record);

}  // namespace spillnet::app
