// Writes synthetic inputs plus a matching config: tick CSVs for the full
// pipeline, or a measures.csv for the spillover stage alone.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "spillnet/common.hpp"
#include "spillnet/synth.hpp"

namespace fs = std::filesystem;
using namespace spillnet;

namespace {

std::string format_local(LocalTime t) {
    using namespace std::chrono;
    const auto day = floor<days>(t);
    const hh_mm_ss hms{t - day};
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s %02d:%02d:%02d.%03d", format_date(sys_days{day.time_since_epoch()}).c_str(),
                  static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                  static_cast<int>(hms.seconds().count()), static_cast<int>(hms.subseconds().count()));
    return buf;
}

void write_json(const fs::path& p, const nlohmann::json& j) {
    std::ofstream os(p);
    os << j.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spillnet_synth: synthetic fixtures"};
    app.require_subcommand(1);
    std::vector<std::string> assets{"AUD", "GBP", "CAD", "EUR", "JPY", "CHF"};
    int n_days = 600;
    std::uint64_t seed = 1;
    std::string out = "synthetic";
    std::string first = "2015-01-05";
    int ticks_per_day = 400;

    for (const char* name : {"measures", "ticks"}) {
        auto* sub = app.add_subcommand(name, std::string("write synthetic ") + name);
        sub->add_option("--assets", assets)->delimiter(',');
        sub->add_option("--days", n_days);
        sub->add_option("--seed", seed);
        sub->add_option("--out", out);
        sub->add_option("--first-day", first);
        if (std::string(name) == "ticks") sub->add_option("--ticks-per-day", ticks_per_day);
    }
    CLI11_PARSE(app, argc, argv);

    const auto first_day = parse_date(first);
    if (!first_day) {
        std::cerr << "bad --first-day\n";
        return 2;
    }
    fs::create_directories(out);
    nlohmann::json cfg = {{"output_dir", "out"},
                          {"spillover", {{"mode", "signed"}, {"window", 200}, {"horizon", 10}, {"lags", 2},
                                         {"bootstrap", 100}, {"seed", seed}}}};

    if (app.got_subcommand("measures")) {
        const auto panel = synth::synthetic_measures(assets, n_days, seed, *first_day);
        realized::write_measures_csv(fs::path(out) / "measures.csv", panel);
        cfg["measures"] = "measures.csv";
        nlohmann::json list = nlohmann::json::array();
        for (const auto& a : assets) list.push_back({{"id", a}});
        cfg["assets"] = list;
    } else {
        const auto cal = ingest::build_calendar(true, {}, true, {});
        std::vector<Date> days;
        for (Date d = *first_day; static_cast<int>(days.size()) < n_days; d += std::chrono::days{1}) {
            if (!cal.is_excluded(d)) days.push_back(d);
        }
        fs::create_directories(fs::path(out) / "ticks");
        nlohmann::json list = nlohmann::json::array();
        for (std::size_t i = 0; i < assets.size(); ++i) {
            const auto ticks = synth::synthetic_ticks(assets[i], days, cal, ticks_per_day, 0.006, mix_seed(seed, i));
            const fs::path rel = fs::path("ticks") / (assets[i] + ".csv");
            std::ofstream os(fs::path(out) / rel);
            os << "timestamp,price\n";
            for (const auto& t : ticks.records()) os << format_local(t.ts) << ',' << format_double(t.price) << '\n';
            list.push_back({{"id", assets[i]}, {"path", rel.generic_string()}});
        }
        cfg["assets"] = list;
        cfg["timezone"] = "America/Chicago";
        cfg["session"] = {{"start", "17:00"}, {"end", "16:00"}};
        cfg["interval_minutes"] = 5;
        cfg["exclusions"] = {{"weekends", true}, {"year_end", true}, {"us_federal_holidays", false}};
    }
    write_json(fs::path(out) / "config.json", cfg);
    std::cout << "wrote " << out << "\n";
    return 0;
}
