#include "spillnet/app.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "spillnet/connectedness.hpp"
#include "spillnet/fevd.hpp"
#include "spillnet/realized.hpp"
#include "spillnet/var.hpp"

namespace spillnet::app {

namespace fs = std::filesystem;
using nlohmann::json;
using connectedness::BlockOrder;
using connectedness::SystemMode;

namespace {

constexpr const char* kConfigStage = "config";

// --- config helpers -----------------------------------------------------------

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    for (const auto& [key, _] : obj.items()) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
            throw_config(kConfigStage, "unknown key '" + key + "' in " + where);
        }
    }
}

template <class T>
T get_or(const json& obj, const char* key, T fallback, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw_config(kConfigStage, where + "." + key + " has the wrong type");
    }
}

bool valid_id(const std::string& id) {
    return !id.empty() && std::all_of(id.begin(), id.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
    });
}

SystemMode parse_mode(const std::string& s) {
    if (s == "plain") return SystemMode::Plain;
    if (s == "signed") return SystemMode::Signed;
    throw_config(kConfigStage, "mode must be 'plain' or 'signed', got '" + s + "'");
}

rolling::Transform parse_transform(const std::string& s) {
    if (s == "raw") return rolling::Transform::Raw;
    if (s == "log") return rolling::Transform::Log;
    throw_config(kConfigStage, "transform must be 'raw' or 'log', got '" + s + "'");
}

BlockOrder parse_block_order(const std::string& s) {
    if (s == "positive_first") return BlockOrder::PositiveFirst;
    if (s == "negative_first") return BlockOrder::NegativeFirst;
    throw_config(kConfigStage, "block_order must be 'positive_first' or 'negative_first', got '" + s + "'");
}

var::RankPolicy parse_rank_policy(const std::string& s) {
    if (s == "error") return var::RankPolicy::Error;
    if (s == "min_norm") return var::RankPolicy::MinimumNorm;
    throw_config(kConfigStage, "rank_policy must be 'error' or 'min_norm', got '" + s + "'");
}

std::string rank_policy_name(var::RankPolicy p) { return p == var::RankPolicy::Error ? "error" : "min_norm"; }

fs::path resolve(const fs::path& base, const std::string& p) {
    const fs::path path(p);
    return path.is_absolute() ? path : (base / path).lexically_normal();
}

std::string relative_to(const fs::path& p, const fs::path& base) {
    const auto rel = p.lexically_relative(base);
    return rel.empty() ? p.string() : rel.generic_string();
}

json file_entry(const fs::path& p, const fs::path& base) {
    return {{"path", relative_to(p, base)}, {"sha256", sha256_file(p)}};
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw_data("io", dir.string() + ": cannot create directory: " + ec.message());
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(line);
    while (std::getline(is, cur, ',')) out.push_back(cur);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::string fixed2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

}  // namespace

// --- RunConfig ------------------------------------------------------------------

fs::path RunConfig::measures_file() const { return measures_path ? *measures_path : output_dir / "measures.csv"; }

json RunConfig::ingest_parameters() const {
    json holidays = json::array();
    for (Date d : this->holidays) holidays.push_back(format_date(d));
    return {{"timezone", timezone},
            {"session_start", format_time_of_day(session.start)},
            {"session_end", format_time_of_day(session.end)},
            {"interval_minutes", ingest.interval.count()},
            {"min_ticks", ingest.min_ticks},
            {"exclude_weekends", exclude_weekends},
            {"exclude_year_end", exclude_year_end},
            {"exclude_us_federal_holidays", exclude_us_federal_holidays},
            {"holidays", holidays}};
}

json RunConfig::spillover_parameters() const {
    const auto& r = spillover.rolling;
    return {{"mode", connectedness::to_string(r.mode)},
            {"window", r.window_length},
            {"horizon", r.horizon},
            {"lags", r.lag_order},
            {"bootstrap", r.bootstrap_reps},
            {"block_length", r.block_length},
            {"ci_level", r.ci_level},
            {"seed", r.rng_seed},
            {"transform", rolling::to_string(r.transform)},
            {"block_order", connectedness::to_string(r.block_order)},
            {"rank_policy", rank_policy_name(r.rank_policy)},
            {"robustness_windows", spillover.robustness_windows}};
}

RunConfig load_config(const fs::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw_config(kConfigStage, path.string() + ": cannot open config");
    std::stringstream buffer;
    buffer << is.rdbuf();
    const std::string text = buffer.str();

    json root;
    try {
        root = json::parse(text);
    } catch (const json::exception& e) {
        throw_config(kConfigStage, path.string() + ": invalid JSON: " + e.what());
    }
    if (!root.is_object()) throw_config(kConfigStage, path.string() + ": top level must be an object");
    check_keys(root, "config", {"assets", "timezone", "session", "interval_minutes", "min_ticks", "exclusions",
                                "output_dir", "measures", "spillover"});

    RunConfig cfg;
    cfg.config_path = path;
    cfg.config_sha256 = sha256_bytes(text);
    const fs::path base = path.parent_path().empty() ? fs::path(".") : path.parent_path();

    if (root.contains("assets")) {
        if (!root["assets"].is_array()) throw_config(kConfigStage, "assets must be an array");
        std::set<std::string> seen;
        for (const auto& a : root["assets"]) {
            if (!a.is_object()) throw_config(kConfigStage, "each asset must be an object");
            check_keys(a, "asset", {"id", "path"});
            const auto id = get_or<std::string>(a, "id", "", "asset");
            const auto p = get_or<std::string>(a, "path", "", "asset");
            if (!valid_id(id)) throw_config(kConfigStage, "asset id '" + id + "' must be [A-Za-z0-9_.-]+");
            if (!seen.insert(id).second) throw_config(kConfigStage, "duplicate asset id '" + id + "'");
            cfg.assets.push_back({id, p.empty() ? fs::path{} : resolve(base, p)});
        }
    }

    cfg.timezone = get_or<std::string>(root, "timezone", cfg.timezone, "config");
    if (root.contains("session")) {
        const json& s = root["session"];
        if (!s.is_object()) throw_config(kConfigStage, "session must be an object");
        check_keys(s, "session", {"start", "end"});
        const auto start = parse_time_of_day(get_or<std::string>(s, "start", "17:00", "session"));
        const auto end = parse_time_of_day(get_or<std::string>(s, "end", "16:00", "session"));
        if (!start || !end) throw_config(kConfigStage, "session times must be HH:MM");
        cfg.session = {*start, *end};
    }
    const int interval = get_or<int>(root, "interval_minutes", 5, "config");
    if (interval < 1) throw_config(kConfigStage, "interval_minutes must be >= 1");
    cfg.ingest.interval = std::chrono::minutes{interval};
    const int min_ticks = get_or<int>(root, "min_ticks", 10, "config");
    if (min_ticks < 1) throw_config(kConfigStage, "min_ticks must be >= 1");
    cfg.ingest.min_ticks = static_cast<std::size_t>(min_ticks);

    if (root.contains("exclusions")) {
        const json& e = root["exclusions"];
        if (!e.is_object()) throw_config(kConfigStage, "exclusions must be an object");
        check_keys(e, "exclusions", {"weekends", "year_end", "us_federal_holidays", "holidays"});
        cfg.exclude_weekends = get_or<bool>(e, "weekends", true, "exclusions");
        cfg.exclude_year_end = get_or<bool>(e, "year_end", true, "exclusions");
        cfg.exclude_us_federal_holidays = get_or<bool>(e, "us_federal_holidays", true, "exclusions");
        for (const auto& h : get_or<std::vector<std::string>>(e, "holidays", {}, "exclusions")) {
            const auto d = parse_date(h);
            if (!d) throw_config(kConfigStage, "holiday '" + h + "' is not a YYYY-MM-DD date");
            cfg.holidays.push_back(*d);
        }
    }

    cfg.output_dir = resolve(base, get_or<std::string>(root, "output_dir", "out", "config"));
    if (root.contains("measures")) cfg.measures_path = resolve(base, get_or<std::string>(root, "measures", "", "config"));

    auto& r = cfg.spillover.rolling;
    if (root.contains("spillover")) {
        const json& s = root["spillover"];
        if (!s.is_object()) throw_config(kConfigStage, "spillover must be an object");
        check_keys(s, "spillover", {"mode", "window", "horizon", "lags", "bootstrap", "block_length", "ci_level",
                                    "seed", "jobs", "transform", "block_order", "rank_policy",
                                    "robustness_windows"});
        r.mode = parse_mode(get_or<std::string>(s, "mode", "signed", "spillover"));
        r.window_length = get_or<int>(s, "window", r.window_length, "spillover");
        r.horizon = get_or<int>(s, "horizon", r.horizon, "spillover");
        r.lag_order = get_or<int>(s, "lags", r.lag_order, "spillover");
        r.bootstrap_reps = get_or<int>(s, "bootstrap", r.bootstrap_reps, "spillover");
        r.block_length = get_or<int>(s, "block_length", r.block_length, "spillover");
        r.ci_level = get_or<double>(s, "ci_level", r.ci_level, "spillover");
        r.rng_seed = get_or<std::uint64_t>(s, "seed", r.rng_seed, "spillover");
        r.jobs = get_or<int>(s, "jobs", r.jobs, "spillover");
        r.transform = parse_transform(get_or<std::string>(s, "transform", "raw", "spillover"));
        r.block_order = parse_block_order(get_or<std::string>(s, "block_order", "positive_first", "spillover"));
        r.rank_policy = parse_rank_policy(get_or<std::string>(s, "rank_policy", "error", "spillover"));
        cfg.spillover.robustness_windows = get_or<std::vector<int>>(s, "robustness_windows", {}, "spillover");
    }
    return cfg;
}

// --- ingest ---------------------------------------------------------------------

IngestSummary cmd_ingest(const RunConfig& cfg) {
    constexpr const char* kStage = "ingest";
    if (cfg.assets.empty()) throw_config(kStage, "config lists no assets");
    for (const auto& a : cfg.assets) {
        if (a.path.empty()) throw_config(kStage, "asset " + a.id + " has no tick file path");
    }
    const ingest::ExchangeClock clock(cfg.timezone);
    const int jobs = cfg.spillover.rolling.jobs;

    std::vector<ingest::ParsedTicks> parsed(cfg.assets.size());
    rolling::parallel_for(cfg.assets.size(), jobs, [&](std::size_t i) {
        parsed[i] = ingest::read_tick_csv(cfg.assets[i].path, cfg.assets[i].id, clock);
    });

    std::vector<Date> holidays = cfg.holidays;
    if (cfg.exclude_us_federal_holidays) {
        int lo = 0, hi = -1;
        for (const auto& p : parsed) {
            if (p.series.empty()) continue;
            const auto first = std::chrono::year_month_day{
                std::chrono::floor<std::chrono::days>(p.series.records().front().ts).time_since_epoch() +
                Date{}};
            const auto last = std::chrono::year_month_day{
                std::chrono::floor<std::chrono::days>(p.series.records().back().ts).time_since_epoch() + Date{}};
            const int y0 = static_cast<int>(first.year());
            const int y1 = static_cast<int>(last.year()) + 1;
            if (hi < lo) {
                lo = y0;
                hi = y1;
            } else {
                lo = std::min(lo, y0);
                hi = std::max(hi, y1);
            }
        }
        for (int y = lo; y <= hi; ++y) {
            const auto h = ingest::us_federal_holidays(y);
            holidays.insert(holidays.end(), h.begin(), h.end());
        }
    }
    const auto cal = ingest::build_calendar(cfg.exclude_weekends, holidays, cfg.exclude_year_end, cfg.session);

    std::vector<ingest::AssetIngest> results(cfg.assets.size());
    rolling::parallel_for(cfg.assets.size(), jobs, [&](std::size_t i) {
        results[i] = ingest::ingest_series(parsed[i].series, cal, cfg.ingest);
    });

    IngestSummary summary;
    for (const auto& r : results) summary.grids += r.grids.size();
    if (summary.grids == 0) throw_data(kStage, "empty result: no trading day survived the session and exclusion rules");

    ensure_dir(cfg.output_dir);
    const fs::path grid_root = cfg.output_dir / "grids";
    json outputs = json::array();
    for (std::size_t i = 0; i < cfg.assets.size(); ++i) {
        const fs::path dir = grid_root / cfg.assets[i].id;
        std::error_code ec;
        fs::remove_all(dir, ec);
        ensure_dir(dir);
        std::string combined;
        for (const auto& g : results[i].grids) {
            const fs::path file = dir / (format_date(g.trading_day) + ".csv");
            ingest::write_grid_csv(file, g);
            combined += file.filename().string() + ":" + sha256_file(file) + "\n";
        }
        outputs.push_back({{"path", relative_to(dir, cfg.output_dir)},
                           {"files", results[i].grids.size()},
                           {"sha256", sha256_bytes(combined)}});
    }

    const fs::path report = cfg.output_dir / "ingest_report.csv";
    {
        std::ofstream os(report);
        if (!os) throw_data(kStage, report.string() + ": cannot write");
        os << "asset,trading_day,ticks,status,reason\n";
        for (const auto& r : results) {
            for (const auto& d : r.days) {
                os << d.asset_id << ',' << format_date(d.trading_day) << ',' << d.ticks << ','
                   << (d.kept ? "kept" : "dropped") << ',' << d.reason << '\n';
                if (!d.kept) ++summary.dropped_days;
            }
        }
    }
    const fs::path malformed = cfg.output_dir / "malformed_rows.csv";
    {
        std::ofstream os(malformed);
        if (!os) throw_data(kStage, malformed.string() + ": cannot write");
        os << "asset,file,line,reason\n";
        for (std::size_t i = 0; i < parsed.size(); ++i) {
            for (const auto& m : parsed[i].malformed) {
                os << cfg.assets[i].id << ',' << cfg.assets[i].path.filename().string() << ',' << m.line << ','
                   << m.reason << '\n';
                ++summary.malformed_rows;
            }
        }
    }
    outputs.push_back(file_entry(report, cfg.output_dir));
    outputs.push_back(file_entry(malformed, cfg.output_dir));

    json inputs = json::array();
    for (const auto& a : cfg.assets) inputs.push_back({{"asset", a.id}, {"path", a.path.string()}, {"sha256", sha256_file(a.path)}});
    json per_asset = json::array();
    for (std::size_t i = 0; i < cfg.assets.size(); ++i) {
        std::size_t kept = 0, dropped = 0;
        for (const auto& d : results[i].days) (d.kept ? kept : dropped)++;
        per_asset.push_back({{"asset", cfg.assets[i].id},
                             {"rows", parsed[i].rows_read},
                             {"malformed_rows", parsed[i].malformed.size()},
                             {"excluded_ticks", results[i].excluded_ticks},
                             {"days_kept", kept},
                             {"days_dropped", dropped}});
    }
    record_stage(cfg, kStage,
                 {{"parameters", cfg.ingest_parameters()}, {"inputs", inputs}, {"outputs", outputs}, {"assets", per_asset}});

    std::cout << "ingest: " << summary.grids << " asset-days kept, " << summary.dropped_days << " dropped, "
              << summary.malformed_rows << " malformed rows skipped\n";
    for (const auto& a : per_asset) {
        std::cout << "  " << a["asset"].get<std::string>() << ": " << a["days_kept"] << " days kept, "
                  << a["days_dropped"] << " dropped, " << a["malformed_rows"] << " malformed\n";
    }
    return summary;
}

// --- measures -------------------------------------------------------------------

MeasuresSummary cmd_measures(const RunConfig& cfg) {
    constexpr const char* kStage = "measures";
    if (cfg.assets.empty()) throw_config(kStage, "config lists no assets");
    const fs::path grid_root = cfg.output_dir / "grids";

    std::vector<std::vector<realized::DailyMeasures>> per_asset(cfg.assets.size());
    rolling::parallel_for(cfg.assets.size(), cfg.spillover.rolling.jobs, [&](std::size_t i) {
        const fs::path dir = grid_root / cfg.assets[i].id;
        if (!fs::is_directory(dir)) throw_data(kStage, dir.string() + ": no grids for asset " + cfg.assets[i].id + " (run ingest first)");
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(dir)) {
            if (entry.path().extension() == ".csv") files.push_back(entry.path());
        }
        std::sort(files.begin(), files.end());
        for (const auto& f : files) {
            const auto day = parse_date(f.stem().string());
            if (!day) throw_data(kStage, f.string() + ": grid file name is not a date");
            const auto grid = ingest::read_grid_csv(f, cfg.assets[i].id, *day, cfg.ingest.interval);
            per_asset[i].push_back(realized::daily_measures(grid));
        }
    });

    std::vector<realized::DailyMeasures> all;
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < cfg.assets.size(); ++i) {
        ids.push_back(cfg.assets[i].id);
        all.insert(all.end(), per_asset[i].begin(), per_asset[i].end());
    }
    const auto built = realized::build_panel(all, ids);

    ensure_dir(cfg.output_dir);
    const fs::path out = cfg.output_dir / "measures.csv";
    realized::write_measures_csv(out, built.panel);

    const fs::path report = cfg.output_dir / "measures_report.csv";
    {
        std::map<Date, std::set<std::string>> present;
        for (const auto& m : all) present[m.trading_day].insert(m.asset_id);
        std::ofstream os(report);
        if (!os) throw_data(kStage, report.string() + ": cannot write");
        os << "date,missing_assets\n";
        for (Date d : built.dropped_dates) {
            os << format_date(d) << ',';
            bool first = true;
            for (const auto& id : ids) {
                if (present[d].count(id) == 0) {
                    os << (first ? "" : ";") << id;
                    first = false;
                }
            }
            os << '\n';
        }
    }

    MeasuresSummary summary{built.panel.n_days(), built.panel.n_assets(), built.dropped_dates};
    json dropped = json::array();
    for (Date d : built.dropped_dates) dropped.push_back(format_date(d));
    record_stage(cfg, kStage,
                 {{"parameters", {{"interval_minutes", cfg.ingest.interval.count()}}},
                  {"outputs", json::array({file_entry(out, cfg.output_dir), file_entry(report, cfg.output_dir)})},
                  {"days", summary.days},
                  {"dropped_dates", dropped}});
    std::cout << "measures: " << summary.days << " common days x " << summary.assets << " assets, "
              << summary.dropped_dates.size() << " dates dropped (not present for every asset)\n";
    return summary;
}

// --- spillover ------------------------------------------------------------------

namespace {

void print_table(std::ostream& os, const fevd::FevdMatrix& f, const connectedness::SystemLayout& layout,
                 const std::vector<std::string>& labels) {
    const int k = f.dim;
    const bool is_signed = layout.mode == SystemMode::Signed;
    auto skip = [&](int r, int c) { return is_signed ? connectedness::excluded_cell(r, c, layout.n_assets) : r == c; };
    char buf[64];
    std::snprintf(buf, sizeof buf, "%-10s", "");
    os << buf;
    for (const auto& l : labels) {
        std::snprintf(buf, sizeof buf, "%9.9s", l.c_str());
        os << buf;
    }
    os << "     FROM\n";
    std::vector<double> to(static_cast<std::size_t>(k), 0.0);
    for (int r = 0; r < k; ++r) {
        std::snprintf(buf, sizeof buf, "%-10.10s", labels[static_cast<std::size_t>(r)].c_str());
        os << buf;
        double from = 0.0;
        for (int c = 0; c < k; ++c) {
            const double v = 100.0 * f.normalized(r, c);
            if (!skip(r, c)) {
                from += v;
                to[static_cast<std::size_t>(c)] += v;
            }
            std::snprintf(buf, sizeof buf, "%9s", fixed2(v).c_str());
            os << buf;
        }
        std::snprintf(buf, sizeof buf, "%9s", fixed2(from).c_str());
        os << buf << '\n';
    }
    std::snprintf(buf, sizeof buf, "%-10s", "TO");
    os << buf;
    for (double v : to) {
        std::snprintf(buf, sizeof buf, "%9s", fixed2(v).c_str());
        os << buf;
    }
    const double total = is_signed ? connectedness::total_spillover_signed(f, layout) : connectedness::total_spillover(f);
    os << "\nTOTAL " << fixed2(total) << '\n';
}

}  // namespace

SpilloverSummary cmd_spillover(const RunConfig& cfg) {
    constexpr const char* kStage = "spillover";
    const auto& rc = cfg.spillover.rolling;
    const fs::path measures = cfg.measures_file();
    if (!fs::exists(measures)) throw_data(kStage, measures.string() + ": measures file not found (run measures first)");
    const auto file = realized::read_measures_csv(measures);
    std::vector<std::string> ids;
    for (const auto& a : cfg.assets) ids.push_back(a.id);
    if (ids.empty()) ids = file.assets;
    const auto built = realized::build_panel(file.rows, ids);
    const auto data = rolling::system_data(built.panel, rc.mode, rc.block_order, rc.transform);
    rc.validate(data.layout.dim());

    ensure_dir(cfg.output_dir);
    json outputs = json::array();
    json notes = json::array();

    // Full sample.
    const Date last_day = data.dates.back();
    SpilloverSummary summary;
    try {
        const auto model = var::fit_var(data.values, rc.lag_order, rc.rank_policy);
        const auto f = fevd::gfevd(model, rc.horizon, data.labels);
        const fs::path table = cfg.output_dir / "spillover_table.csv";
        connectedness::write_spillover_table(table, f, data.layout, data.labels);
        const fs::path fevd_csv = cfg.output_dir / "fevd.csv";
        fevd::write_fevd_csv(fevd_csv, f, data.labels);
        const fs::path model_json = cfg.output_dir / "var_model.json";
        {
            json j = var::to_json(model);
            j["labels"] = data.labels;
            std::ofstream os(model_json);
            os << j.dump(2) << '\n';
        }
        for (const auto& p : {table, fevd_csv, model_json}) outputs.push_back(file_entry(p, cfg.output_dir));
        summary.full_sample_total = data.layout.mode == SystemMode::Signed
                                        ? connectedness::total_spillover_signed(f, data.layout)
                                        : connectedness::total_spillover(f);
        std::cout << "full-sample spillover table (" << format_date(data.dates.front()) << " to "
                  << format_date(last_day) << ", " << connectedness::to_string(rc.mode) << ", H=" << rc.horizon
                  << ", p=" << rc.lag_order << (model.stationary ? "" : ", NON-STATIONARY") << ")\n";
        print_table(std::cout, f, data.layout, data.labels);
    } catch (const Error& e) {
        throw Error(e.kind(), kStage, std::string("full sample ending ") + format_date(last_day) + ": " + e.what());
    }

    const auto series = rolling::run_rolling(data, rc);
    const fs::path rolling_csv = cfg.output_dir / "rolling.csv";
    rolling::write_rolling_csv(rolling_csv, series);
    const fs::path gaps_csv = cfg.output_dir / "gaps.csv";
    rolling::write_gaps_csv(gaps_csv, series);
    outputs.push_back(file_entry(rolling_csv, cfg.output_dir));
    outputs.push_back(file_entry(gaps_csv, cfg.output_dir));

    const fs::path hyp_csv = cfg.output_dir / "hypotheses.csv";
    if (rc.mode == SystemMode::Signed && rc.bootstrap_reps > 0) {
        rolling::write_hypotheses_csv(hyp_csv, series, rolling::test_hypotheses(series));
        outputs.push_back(file_entry(hyp_csv, cfg.output_dir));
    } else {
        std::error_code ec;
        fs::remove(hyp_csv, ec);
        notes.push_back("hypotheses.csv not written: needs signed mode with bootstrap > 0");
    }

    for (int w : cfg.spillover.robustness_windows) {
        auto alt = rc;
        alt.window_length = w;
        const auto s = rolling::run_rolling(data, alt);
        const fs::path p = cfg.output_dir / ("rolling_w" + std::to_string(w) + ".csv");
        rolling::write_rolling_csv(p, s);
        outputs.push_back(file_entry(p, cfg.output_dir));
    }

    summary.snapshots = series.snapshots.size();
    summary.gaps = series.gaps.size();
    std::size_t non_stationary = 0;
    for (const auto& s : series.snapshots) non_stationary += s.stationary ? 0 : 1;
    std::cout << "rolling: " << summary.snapshots << " windows of " << rc.window_length << " days, " << summary.gaps
              << " gaps, " << non_stationary << " non-stationary fits\n";
    if (!series.gaps.empty()) {
        spdlog::warn("{} rolling windows failed; see gaps.csv (first: {} {})", series.gaps.size(),
                     format_date(series.gaps.front().window_end), series.gaps.front().reason);
    }

    json params = cfg.spillover_parameters();
    params["jobs"] = rc.jobs;
    params["layout"] = {{"mode", connectedness::to_string(data.layout.mode)},
                        {"block_order", connectedness::to_string(data.layout.block_order)},
                        {"variables", data.labels}};
    record_stage(cfg, kStage,
                 {{"parameters", params},
                  {"inputs", json::array({file_entry(measures, cfg.config_path.parent_path())})},
                  {"outputs", outputs},
                  {"snapshots", summary.snapshots},
                  {"gaps", summary.gaps},
                  {"notes", notes}});
    return summary;
}

// --- plotdata -------------------------------------------------------------------

void cmd_plotdata(const RunConfig& cfg) {
    constexpr const char* kStage = "plotdata";
    const fs::path rolling_csv = cfg.output_dir / "rolling.csv";
    std::ifstream is(rolling_csv);
    if (!is) throw_data(kStage, rolling_csv.string() + ": missing (run spillover first)");
    std::string line;
    if (!std::getline(is, line)) throw_data(kStage, rolling_csv.string() + ": empty file");
    const auto header = split_csv(line);
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
    std::vector<std::string> assets;
    for (const auto& h : header) {
        if (h.rfind("net_", 0) == 0) assets.push_back(h.substr(4));
    }
    const bool is_signed = col.count("sam") != 0;
    auto need = [&](const std::string& name) {
        auto it = col.find(name);
        if (it == col.end()) throw_data(kStage, rolling_csv.string() + ": missing column " + name);
        return it->second;
    };

    std::vector<std::vector<std::string>> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        auto r = split_csv(line);
        if (r.size() != header.size()) throw_data(kStage, rolling_csv.string() + ": ragged row");
        rows.push_back(std::move(r));
    }

    json outputs = json::array();
    json notes = json::array();
    auto open = [&](const std::string& name) {
        const fs::path p = cfg.output_dir / name;
        std::ofstream os(p);
        if (!os) throw_data(kStage, p.string() + ": cannot write");
        return std::make_pair(p, std::move(os));
    };

    {
        auto [p, os] = open("fig_total.csv");
        os << "window_end,total\n";
        const auto t = need("total");
        for (const auto& r : rows) os << r[0] << ',' << r[t] << '\n';
        os.close();
        outputs.push_back(file_entry(p, cfg.output_dir));
    }
    {
        auto [p, os] = open("fig_net.csv");
        os << "window_end,asset,net\n";
        for (const auto& r : rows) {
            for (const auto& a : assets) os << r[0] << ',' << a << ',' << r[need("net_" + a)] << '\n';
        }
        os.close();
        outputs.push_back(file_entry(p, cfg.output_dir));
    }
    if (is_signed) {
        {
            auto [p, os] = open("fig_sam.csv");
            os << "window_end,sam,lo,hi\n";
            const auto s = need("sam"), lo = need("sam_lo"), hi = need("sam_hi");
            for (const auto& r : rows) os << r[0] << ',' << r[s] << ',' << r[lo] << ',' << r[hi] << '\n';
            os.close();
            outputs.push_back(file_entry(p, cfg.output_dir));
        }
        {
            auto [p, os] = open("fig_dsam.csv");
            os << "window_end,asset,good_to,bad_to,net\n";
            for (const auto& r : rows) {
                for (const auto& a : assets) {
                    const double good = std::stod(r[need("to_" + a + "_pos")]);
                    const double bad = std::stod(r[need("to_" + a + "_neg")]);
                    os << r[0] << ',' << a << ',' << format_double(good) << ',' << format_double(bad) << ','
                       << format_double(good - bad) << '\n';
                }
            }
            os.close();
            outputs.push_back(file_entry(p, cfg.output_dir));
        }
    } else {
        for (const char* name : {"fig_sam.csv", "fig_dsam.csv"}) {
            std::error_code ec;
            fs::remove(cfg.output_dir / name, ec);
        }
        notes.push_back("fig_sam.csv and fig_dsam.csv not written: plain mode has no asymmetry measures");
    }
    record_stage(cfg, kStage,
                 {{"inputs", json::array({file_entry(rolling_csv, cfg.output_dir)})},
                  {"outputs", outputs},
                  {"mode", is_signed ? "signed" : "plain"},
                  {"notes", notes}});
    std::cout << "plotdata: " << outputs.size() << " figure files for " << rows.size() << " windows\n";
}

// --- CLI ------------------------------------------------------------------------

namespace {

struct Overrides {
    std::string out;
    std::string mode, transform, rank_policy, block_order;
    std::optional<int> window, horizon, lags, bootstrap, block_length, jobs;
    std::optional<std::uint64_t> seed;
    std::optional<double> ci_level;
    std::vector<int> robustness;
};

void apply(RunConfig& cfg, const Overrides& o) {
    if (!o.out.empty()) cfg.output_dir = fs::path(o.out);
    auto& r = cfg.spillover.rolling;
    if (!o.mode.empty()) r.mode = parse_mode(o.mode);
    if (!o.transform.empty()) r.transform = parse_transform(o.transform);
    if (!o.rank_policy.empty()) r.rank_policy = parse_rank_policy(o.rank_policy);
    if (!o.block_order.empty()) r.block_order = parse_block_order(o.block_order);
    if (o.window) r.window_length = *o.window;
    if (o.horizon) r.horizon = *o.horizon;
    if (o.lags) r.lag_order = *o.lags;
    if (o.bootstrap) r.bootstrap_reps = *o.bootstrap;
    if (o.block_length) r.block_length = *o.block_length;
    if (o.jobs) r.jobs = *o.jobs;
    if (o.seed) r.rng_seed = *o.seed;
    if (o.ci_level) r.ci_level = *o.ci_level;
    if (!o.robustness.empty()) cfg.spillover.robustness_windows = o.robustness;
}

void configure_logging() {
    static std::once_flag once;
    std::call_once(once, [] {
        auto logger = spdlog::stderr_color_mt("spillnet");
        spdlog::set_default_logger(logger);
        spdlog::set_pattern("%^%l%$: %v");
        spdlog::set_level(spdlog::level::warn);
        if (const char* lvl = std::getenv("SPILLNET_LOG"); lvl != nullptr && *lvl != '\0') {
            spdlog::set_level(spdlog::level::from_str(lvl));
        }
    });
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    configure_logging();
    CLI::App app{"spillnet: asymmetric volatility connectedness from high-frequency prices"};
    app.require_subcommand(1);

    std::string config_path;
    Overrides ov;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file")->required();
        sub->add_option("--out", ov.out, "output directory (overrides output_dir)");
        sub->add_option("--jobs", ov.jobs, "worker threads (0 = all cores)");
    };
    auto add_spillover = [&](CLI::App* sub) {
        sub->add_option("--mode", ov.mode, "plain (RV system) or signed (semivariance system)");
        sub->add_option("--window", ov.window, "rolling window length in days");
        sub->add_option("--horizon", ov.horizon, "forecast horizon H");
        sub->add_option("--lags", ov.lags, "VAR lag order");
        sub->add_option("--bootstrap", ov.bootstrap, "bootstrap replicates per window (0 disables intervals)");
        sub->add_option("--block-length", ov.block_length, "bootstrap block length in days");
        sub->add_option("--ci-level", ov.ci_level, "confidence level");
        sub->add_option("--seed", ov.seed, "random seed");
        sub->add_option("--transform", ov.transform, "raw or log measures in the VAR");
        sub->add_option("--block-order", ov.block_order, "positive_first or negative_first");
        sub->add_option("--rank-policy", ov.rank_policy, "error or min_norm for collinear windows");
        sub->add_option("--robustness", ov.robustness, "extra window lengths, e.g. --robustness 100 150");
    };

    auto* ingest_cmd = app.add_subcommand("ingest", "tick CSVs -> intraday log-price grids");
    add_common(ingest_cmd);
    auto* measures_cmd = app.add_subcommand("measures", "grids -> measures.csv");
    add_common(measures_cmd);
    auto* spill_cmd = app.add_subcommand("spillover", "measures.csv -> spillover tables and rolling series");
    add_common(spill_cmd);
    add_spillover(spill_cmd);
    auto* plot_cmd = app.add_subcommand("plotdata", "rolling.csv -> tidy figure data");
    add_common(plot_cmd);
    auto* all_cmd = app.add_subcommand("all", "ingest, measures, spillover and plotdata in one go");
    add_common(all_cmd);
    add_spillover(all_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        RunConfig cfg = load_config(config_path);
        apply(cfg, ov);
        if (*ingest_cmd) {
            cmd_ingest(cfg);
        } else if (*measures_cmd) {
            cmd_measures(cfg);
        } else if (*spill_cmd) {
            cmd_spillover(cfg);
        } else if (*plot_cmd) {
            cmd_plotdata(cfg);
        } else if (*all_cmd) {
            if (!cfg.assets.empty()) {
                const auto n = static_cast<int>(cfg.assets.size());
                cfg.spillover.rolling.validate(cfg.spillover.rolling.mode == connectedness::SystemMode::Signed ? 2 * n : n);
            }
            cmd_ingest(cfg);
            cmd_measures(cfg);
            cmd_spillover(cfg);
            cmd_plotdata(cfg);
        }
    } catch (const Error& e) {
        spdlog::error("{}", e.what());
        return exit_code(e.kind());
    } catch (const fs::filesystem_error& e) {
        spdlog::error("[io] {}", e.what());
        return exit_code(ErrorKind::Data);
    } catch (const std::exception& e) {
        spdlog::error("[internal] {}", e.what());
        return exit_code(ErrorKind::Numerical);
    }
    return 0;
}

}  // namespace spillnet::app
