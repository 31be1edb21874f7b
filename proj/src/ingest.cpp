#include "spillnet/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>

#include <absl/time/civil_time.h>
#include <absl/time/time.h>
#include <zlib.h>

namespace spillnet::ingest {

using namespace std::chrono;

namespace {

constexpr const char* kStage = "ingest";

local_days local_day_of(LocalTime ts) { return floor<days>(ts); }

Date to_date(local_days d) { return Date{d.time_since_epoch()}; }
local_days to_local(Date d) { return local_days{d.time_since_epoch()}; }

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '\n')) {
        s.remove_suffix(1);
    }
    return s;
}

bool parse_fixed(std::string_view s, int& out) {
    if (s.empty()) return false;
    for (char c : s) {
        if (c < '0' || c > '9') return false;
    }
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{};
}

}  // namespace

// --- TickSeries -------------------------------------------------------------

TickSeries::TickSeries(std::string asset_id, std::vector<Tick> records)
    : asset_id_(std::move(asset_id)), records_(std::move(records)) {
    for (const Tick& t : records_) {
        if (!std::isfinite(t.price) || t.price <= 0.0) {
            throw_data(kStage, asset_id_ + ": price must be positive and finite");
        }
    }
    std::stable_sort(records_.begin(), records_.end(),
                     [](const Tick& a, const Tick& b) { return a.ts < b.ts; });
    // Keep the last trade at each timestamp.
    std::vector<Tick> dedup;
    dedup.reserve(records_.size());
    for (const Tick& t : records_) {
        if (!dedup.empty() && dedup.back().ts == t.ts) {
            dedup.back() = t;
        } else {
            dedup.push_back(t);
        }
    }
    records_ = std::move(dedup);
}

// --- Calendar ---------------------------------------------------------------

minutes SessionCalendar::session_length() const noexcept {
    return spans_midnight() ? hours.end + minutes{24 * 60} - hours.start : hours.end - hours.start;
}

LocalTime SessionCalendar::session_open(Date day) const noexcept {
    const local_days d = to_local(day);
    return LocalTime{(spans_midnight() ? d - days{1} : d) + hours.start};
}

LocalTime SessionCalendar::session_close(Date day) const noexcept {
    return LocalTime{to_local(day) + hours.end};
}

bool SessionCalendar::is_excluded(Date day) const noexcept {
    if (weekend_rule) {
        const weekday wd{day};
        if (wd == Saturday || wd == Sunday) return true;
    }
    if (year_end_rule) {
        const year_month_day ymd{day};
        const unsigned m = static_cast<unsigned>(ymd.month());
        const unsigned dd = static_cast<unsigned>(ymd.day());
        if (m == 12 && ((dd >= 24 && dd <= 26) || dd == 31)) return true;
        if (m == 1 && dd <= 2) return true;
    }
    return excluded_dates.count(day) != 0;
}

SessionCalendar build_calendar(bool weekends, const std::vector<Date>& holidays, bool year_end_rule,
                               SessionHours hours) {
    SessionCalendar cal;
    cal.hours = hours;
    cal.weekend_rule = weekends;
    cal.year_end_rule = year_end_rule;
    cal.excluded_dates.insert(holidays.begin(), holidays.end());
    return cal;
}

std::vector<Date> us_federal_holidays(int y) {
    const year yr{y};
    auto observed = [](Date d) {
        const weekday wd{d};
        if (wd == Saturday) return d - days{1};
        if (wd == Sunday) return d + days{1};
        return d;
    };
    std::vector<Date> out;
    out.push_back(observed(Date{yr / January / 1}));
    if (y >= 1986) out.push_back(Date{yr / January / Monday[3]});
    out.push_back(Date{yr / February / Monday[3]});
    out.push_back(Date{yr / May / Monday[last]});
    if (y >= 2021) out.push_back(observed(Date{yr / June / 19}));
    out.push_back(observed(Date{yr / July / 4}));
    out.push_back(Date{yr / September / Monday[1]});
    out.push_back(Date{yr / October / Monday[2]});
    out.push_back(observed(Date{yr / November / 11}));
    out.push_back(Date{yr / November / Thursday[4]});
    out.push_back(observed(Date{yr / December / 25}));
    std::sort(out.begin(), out.end());
    return out;
}

std::optional<Date> assign_trading_day(LocalTime ts, const SessionCalendar& cal) {
    const local_days d = local_day_of(ts);
    const auto tod = duration_cast<minutes>(floor<minutes>(ts) - d);
    const auto tod_ms = ts - d;
    std::optional<Date> day;
    if (cal.spans_midnight()) {
        if (tod >= cal.hours.start) {
            day = to_date(d + days{1});
        } else if (tod_ms < cal.hours.end) {
            day = to_date(d);
        }
    } else if (tod >= cal.hours.start && tod_ms < cal.hours.end) {
        day = to_date(d);
    }
    if (day && cal.is_excluded(*day)) return std::nullopt;
    return day;
}

// --- Resampling -------------------------------------------------------------

IntradayGrid resample(const TickSeries& ticks, Date day, const SessionCalendar& cal,
                      minutes interval) {
    const minutes length = cal.session_length();
    if (interval.count() <= 0 || length % interval != minutes{0}) {
        throw_config(kStage, "sampling interval of " + std::to_string(interval.count()) +
                                 " min does not divide the session length of " +
                                 std::to_string(length.count()) + " min");
    }
    const LocalTime open = cal.session_open(day);
    const LocalTime close = cal.session_close(day);
    const auto& rec = ticks.records();
    const auto by_ts = [](const Tick& t, LocalTime v) { return t.ts < v; };
    const auto first = std::lower_bound(rec.begin(), rec.end(), open, by_ts);
    const auto last = std::lower_bound(first, rec.end(), close, by_ts);
    if (first == last) {
        throw_data(kStage, ticks.asset_id() + " " + format_date(day) + ": no ticks in session");
    }

    const auto n = static_cast<std::size_t>(length / interval);
    IntradayGrid grid{ticks.asset_id(), day, interval, {}};
    grid.log_prices.resize(n + 1);
    auto it = first;
    for (std::size_t k = 0; k <= n; ++k) {
        const LocalTime t = open + interval * static_cast<long>(k);
        while (it != last && it->ts <= t) ++it;
        const double price = (it == first) ? first->price : std::prev(it)->price;
        grid.log_prices[k] = std::log(price);
    }
    return grid;
}

AssetIngest ingest_series(const TickSeries& ticks, const SessionCalendar& cal,
                          const IngestOptions& opts) {
    AssetIngest out;
    std::map<Date, std::size_t> counts;
    for (const Tick& t : ticks.records()) {
        if (auto d = assign_trading_day(t.ts, cal)) {
            ++counts[*d];
        } else {
            ++out.excluded_ticks;
        }
    }
    for (const auto& [day, count] : counts) {
        DayRecord rec{ticks.asset_id(), day, count, false, {}};
        if (count < opts.min_ticks) {
            rec.reason = "too few ticks (" + std::to_string(count) + " < " +
                         std::to_string(opts.min_ticks) + ")";
        } else {
            out.grids.push_back(resample(ticks, day, cal, opts.interval));
            rec.kept = true;
        }
        out.days.push_back(std::move(rec));
    }
    return out;
}

// --- Timestamp parsing ------------------------------------------------------

struct ExchangeClock::Impl {
    std::string name;
    absl::TimeZone zone;
};

ExchangeClock::ExchangeClock(const std::string& zone_name) : impl_(std::make_unique<Impl>()) {
    impl_->name = zone_name;
    if (!absl::LoadTimeZone(zone_name, &impl_->zone)) {
        throw_config(kStage, "unknown time zone '" + zone_name + "'");
    }
}

ExchangeClock::~ExchangeClock() = default;
ExchangeClock::ExchangeClock(ExchangeClock&&) noexcept = default;
ExchangeClock& ExchangeClock::operator=(ExchangeClock&&) noexcept = default;

const std::string& ExchangeClock::zone_name() const noexcept { return impl_->name; }

std::optional<LocalTime> ExchangeClock::parse(std::string_view text) const {
    text = trim(text);
    if (text.size() < 16) return std::nullopt;
    const auto date = parse_date(text.substr(0, 10));
    if (!date || (text[10] != 'T' && text[10] != ' ')) return std::nullopt;
    std::string_view rest = text.substr(11);

    int hh = 0, mm = 0, ss = 0, ms = 0;
    if (rest.size() < 5 || rest[2] != ':' || !parse_fixed(rest.substr(0, 2), hh) ||
        !parse_fixed(rest.substr(3, 2), mm)) {
        return std::nullopt;
    }
    rest.remove_prefix(5);
    if (!rest.empty() && rest.front() == ':') {
        if (rest.size() < 3 || !parse_fixed(rest.substr(1, 2), ss)) return std::nullopt;
        rest.remove_prefix(3);
        if (!rest.empty() && rest.front() == '.') {
            rest.remove_prefix(1);
            std::size_t digits = 0;
            int scale = 100;
            while (digits < rest.size() && rest[digits] >= '0' && rest[digits] <= '9') {
                if (scale > 0) ms += (rest[digits] - '0') * scale;
                scale /= 10;
                ++digits;
            }
            if (digits == 0) return std::nullopt;
            rest.remove_prefix(digits);
        }
    }
    if (hh > 23 || mm > 59 || ss > 59) return std::nullopt;
    const milliseconds tod = hours{hh} + minutes{mm} + seconds{ss} + milliseconds{ms};

    if (rest.empty()) return LocalTime{to_local(*date)} + tod;

    int offset_min = 0;
    if (rest == "Z") {
        offset_min = 0;
    } else if (rest.front() == '+' || rest.front() == '-') {
        const int sign = rest.front() == '-' ? -1 : 1;
        std::string_view off = rest.substr(1);
        int oh = 0, om = 0;
        if (off.size() == 5 && off[2] == ':') {
            if (!parse_fixed(off.substr(0, 2), oh) || !parse_fixed(off.substr(3, 2), om)) return std::nullopt;
        } else if (off.size() == 4) {
            if (!parse_fixed(off.substr(0, 2), oh) || !parse_fixed(off.substr(2, 2), om)) return std::nullopt;
        } else if (off.size() == 2) {
            if (!parse_fixed(off, oh)) return std::nullopt;
        } else {
            return std::nullopt;
        }
        if (oh > 23 || om > 59) return std::nullopt;
        offset_min = sign * (oh * 60 + om);
    } else {
        return std::nullopt;
    }

    const sys_time<milliseconds> utc = sys_time<milliseconds>{*date + tod} - minutes{offset_min};
    const absl::Time instant = absl::FromUnixMillis(utc.time_since_epoch().count());
    const absl::TimeZone::CivilInfo info = impl_->zone.At(instant);
    const absl::CivilSecond cs = info.cs;
    const year_month_day ymd{year{static_cast<int>(cs.year())}, month{static_cast<unsigned>(cs.month())},
                             day{static_cast<unsigned>(cs.day())}};
    const auto sub_ms = absl::ToInt64Milliseconds(info.subsecond);
    return LocalTime{local_days{ymd}} + hours{cs.hour()} + minutes{cs.minute()} + seconds{cs.second()} +
           milliseconds{sub_ms};
}

// --- CSV I/O ----------------------------------------------------------------

namespace {

class GzLineReader {
public:
    explicit GzLineReader(const std::filesystem::path& path) : file_(gzopen(path.c_str(), "rb")) {}
    ~GzLineReader() {
        if (file_ != nullptr) gzclose(file_);
    }
    GzLineReader(const GzLineReader&) = delete;
    GzLineReader& operator=(const GzLineReader&) = delete;

    bool ok() const noexcept { return file_ != nullptr; }

    // gzread handles both compressed and plain files.
    bool next(std::string& line) {
        line.clear();
        char buf[4096];
        while (gzgets(file_, buf, sizeof buf) != nullptr) {
            line.append(buf);
            if (!line.empty() && line.back() == '\n') return true;
        }
        return !line.empty();
    }

private:
    gzFile file_;
};

}  // namespace

ParsedTicks read_tick_csv(const std::filesystem::path& path, const std::string& asset_id,
                          const ExchangeClock& clock) {
    GzLineReader reader(path);
    if (!reader.ok()) throw_data(kStage, path.string() + ": cannot open file");

    std::string line;
    if (!reader.next(line)) throw_data(kStage, path.string() + ": empty file");
    std::string_view header = trim(line);
    if (header.size() >= 3 && header.substr(0, 3) == "\xEF\xBB\xBF") header.remove_prefix(3);
    if (header != "timestamp,price") {
        throw_data(kStage, path.string() + ": expected header 'timestamp,price'");
    }

    ParsedTicks out;
    std::vector<Tick> ticks;
    std::size_t line_no = 1;
    while (reader.next(line)) {
        ++line_no;
        const std::string_view row = trim(line);
        if (row.empty()) continue;
        ++out.rows_read;
        const auto comma = row.find(',');
        if (comma == std::string_view::npos || row.find(',', comma + 1) != std::string_view::npos) {
            out.malformed.push_back({line_no, "expected 2 fields"});
            continue;
        }
        const auto ts = clock.parse(trim(row.substr(0, comma)));
        if (!ts) {
            out.malformed.push_back({line_no, "bad timestamp"});
            continue;
        }
        const std::string_view price_text = trim(row.substr(comma + 1));
        double price = 0.0;
        auto [ptr, ec] = std::from_chars(price_text.data(), price_text.data() + price_text.size(), price);
        if (ec != std::errc{} || ptr != price_text.data() + price_text.size()) {
            out.malformed.push_back({line_no, "bad price"});
            continue;
        }
        if (!std::isfinite(price) || price <= 0.0) {
            out.malformed.push_back({line_no, "non-positive price"});
            continue;
        }
        ticks.push_back({*ts, price});
    }
    out.series = TickSeries(asset_id, std::move(ticks));
    return out;
}

void write_grid_csv(const std::filesystem::path& path, const IntradayGrid& grid) {
    std::ofstream os(path);
    if (!os) throw_data(kStage, path.string() + ": cannot write");
    os << "grid_index,log_price\n";
    for (std::size_t k = 0; k < grid.log_prices.size(); ++k) {
        os << k << ',' << format_double(grid.log_prices[k]) << '\n';
    }
    if (!os) throw_data(kStage, path.string() + ": write failed");
}

IntradayGrid read_grid_csv(const std::filesystem::path& path, const std::string& asset_id, Date day,
                           minutes interval) {
    std::ifstream is(path);
    if (!is) throw_data("measures", path.string() + ": cannot open grid file");
    std::string line;
    if (!std::getline(is, line) || trim(line) != "grid_index,log_price") {
        throw_data("measures", path.string() + ": expected header 'grid_index,log_price'");
    }
    IntradayGrid grid{asset_id, day, interval, {}};
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        const std::string_view row = trim(line);
        if (row.empty()) continue;
        const auto comma = row.find(',');
        std::size_t index = 0;
        double value = 0.0;
        bool ok = comma != std::string_view::npos;
        if (ok) {
            auto r1 = std::from_chars(row.data(), row.data() + comma, index);
            auto r2 = std::from_chars(row.data() + comma + 1, row.data() + row.size(), value);
            ok = r1.ec == std::errc{} && r2.ec == std::errc{} && r2.ptr == row.data() + row.size() &&
                 index == grid.log_prices.size() && std::isfinite(value);
        }
        if (!ok) throw_data("measures", path.string() + ":" + std::to_string(line_no) + ": malformed row");
        grid.log_prices.push_back(value);
    }
    return grid;
}

}  // namespace spillnet::ingest
