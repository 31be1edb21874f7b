#pragma once

// Tick ingestion: session calendar, CSV parsing and previous-tick resampling
// onto an equally spaced intraday log-price grid.

#include <chrono>
#include <filesystem>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "spillnet/common.hpp"

namespace spillnet::ingest {

struct Tick {
    LocalTime ts;
    double price;
};

/// Trades for one asset, strictly increasing in time, positive prices.
class TickSeries {
public:
    TickSeries() = default;

    /// Sorts by time (stable, so file order breaks ties), keeps the last trade
    /// at each duplicate timestamp and validates prices. Throws Data on a
    /// non-positive or non-finite price.
    TickSeries(std::string asset_id, std::vector<Tick> records);

    const std::string& asset_id() const noexcept { return asset_id_; }
    const std::vector<Tick>& records() const noexcept { return records_; }
    std::size_t size() const noexcept { return records_.size(); }
    bool empty() const noexcept { return records_.empty(); }

private:
    std::string asset_id_;
    std::vector<Tick> records_;
};

struct SessionHours {
    std::chrono::minutes start{17 * 60};
    std::chrono::minutes end{16 * 60};
};

/// Maps exchange-local timestamps to trading days.
///
/// When start >= end the session spans midnight: the session of trading day D
/// runs from (D-1) start to D end. Otherwise it runs from D start to D end.
struct SessionCalendar {
    SessionHours hours;
    std::set<Date> excluded_dates;
    bool weekend_rule = false;
    bool year_end_rule = false;

    bool spans_midnight() const noexcept { return hours.start >= hours.end; }
    std::chrono::minutes session_length() const noexcept;
    LocalTime session_open(Date day) const noexcept;
    LocalTime session_close(Date day) const noexcept;
    bool is_excluded(Date day) const noexcept;
};

/// Weekend and year-end rules plus an explicit holiday list. Year-end covers
/// December 24 to 26 and December 31 to January 2.
SessionCalendar build_calendar(bool weekends, const std::vector<Date>& holidays,
                               bool year_end_rule, SessionHours hours = {});

/// Observed U.S. federal holidays for `year` (Saturday holidays observed on
/// Friday, Sunday holidays on Monday).
std::vector<Date> us_federal_holidays(int year);

/// Trading day a tick belongs to, or nullopt for the inter-session gap and for
/// excluded days.
std::optional<Date> assign_trading_day(LocalTime ts, const SessionCalendar& cal);

/// Log prices on the grid open, open+interval, ..., close for one trading day.
struct IntradayGrid {
    std::string asset_id;
    Date trading_day{};
    std::chrono::minutes grid_interval{5};
    std::vector<double> log_prices;
};

/// Previous-tick sampling of the day's session. A grid point before the first
/// trade takes the first trade's price. Throws Config if the interval does not
/// divide the session, Data if the session has no ticks.
IntradayGrid resample(const TickSeries& ticks, Date day, const SessionCalendar& cal,
                      std::chrono::minutes interval);

/// Resolves timestamps to exchange-local time. Offsets in the text (`Z`,
/// `+HH:MM`, `-HHMM`) are converted through the time-zone database; bare
/// timestamps are taken as exchange-local already.
class ExchangeClock {
public:
    /// Throws Config for an unknown zone name.
    explicit ExchangeClock(const std::string& zone_name);
    ~ExchangeClock();
    ExchangeClock(ExchangeClock&&) noexcept;
    ExchangeClock& operator=(ExchangeClock&&) noexcept;

    const std::string& zone_name() const noexcept;

    /// Accepts `YYYY-MM-DD[T ]HH:MM[:SS[.fff]]` with an optional offset.
    std::optional<LocalTime> parse(std::string_view text) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

struct MalformedRow {
    std::size_t line = 0;
    std::string reason;
};

struct ParsedTicks {
    TickSeries series;
    std::vector<MalformedRow> malformed;
    std::size_t rows_read = 0;
};

/// Reads a `timestamp,price` CSV, optionally gzip-compressed. Malformed rows
/// are skipped and reported with their line number. Throws Data when the file
/// cannot be opened or the header is wrong.
ParsedTicks read_tick_csv(const std::filesystem::path& path, const std::string& asset_id,
                          const ExchangeClock& clock);

struct DayRecord {
    std::string asset_id;
    Date trading_day{};
    std::size_t ticks = 0;
    bool kept = false;
    std::string reason;  // empty when kept
};

struct IngestOptions {
    std::chrono::minutes interval{5};
    std::size_t min_ticks = 10;
};

struct AssetIngest {
    std::vector<IntradayGrid> grids;  // date order
    std::vector<DayRecord> days;      // every trading day that had a tick
    std::size_t excluded_ticks = 0;   // gap ticks and ticks on excluded days
};

/// Partitions the series into trading days and resamples every day with
/// enough ticks.
AssetIngest ingest_series(const TickSeries& ticks, const SessionCalendar& cal,
                          const IngestOptions& opts);

/// `grid_index,log_price` CSV.
void write_grid_csv(const std::filesystem::path& path, const IntradayGrid& grid);
IntradayGrid read_grid_csv(const std::filesystem::path& path, const std::string& asset_id,
                           Date day, std::chrono::minutes interval);

}  // namespace spillnet::ingest
