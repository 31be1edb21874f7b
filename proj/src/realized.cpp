#include "spillnet/realized.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "spillnet/simd/kernels.hpp"

namespace spillnet::realized {

namespace {
constexpr const char* kStage = "measures";
}

std::vector<double> intraday_returns(std::span<const double> log_prices) {
    if (log_prices.size() < 2) {
        throw_data(kStage, "degenerate day: need at least 2 grid points, got " +
                               std::to_string(log_prices.size()));
    }
    std::vector<double> r(log_prices.size() - 1);
    for (std::size_t k = 1; k < log_prices.size(); ++k) r[k - 1] = log_prices[k] - log_prices[k - 1];
    return r;
}

std::vector<double> intraday_returns(const ingest::IntradayGrid& grid) {
    try {
        return intraday_returns(grid.log_prices);
    } catch (const Error& e) {
        throw_data(kStage, grid.asset_id + " " + format_date(grid.trading_day) + ": " + e.what());
    }
}

double realized_variance(std::span<const double> returns) {
    if (returns.empty()) throw_data(kStage, "realized variance of an empty return list");
    return simd::sum_squares(returns);
}

Semivariances realized_semivariances(std::span<const double> returns) {
    if (returns.empty()) throw_data(kStage, "realized semivariances of an empty return list");
    const simd::SemiSums s = simd::semivariance(returns);
    return {s.negative, s.positive};
}

DailyMeasures daily_measures(const ingest::IntradayGrid& grid) {
    const auto r = intraday_returns(grid);
    const auto semi = realized_semivariances(r);
    return {grid.asset_id, grid.trading_day, realized_variance(r), semi.rs_neg, semi.rs_pos};
}

// --- Panel ------------------------------------------------------------------

MeasurePanel::MeasurePanel(std::vector<std::string> assets, std::vector<Date> days,
                           std::vector<DailyMeasures> values)
    : assets_(std::move(assets)), days_(std::move(days)), values_(std::move(values)) {
    if (values_.size() != assets_.size() * days_.size()) {
        throw_data(kStage, "panel is not rectangular");
    }
    for (std::size_t t = 1; t < days_.size(); ++t) {
        if (days_[t] <= days_[t - 1]) throw_data(kStage, "panel dates must be strictly increasing");
    }
}

MeasurePanel MeasurePanel::slice(std::size_t first, std::size_t count) const {
    if (first + count > days_.size()) throw_data(kStage, "panel slice out of range");
    const std::size_t n = assets_.size();
    std::vector<Date> d(days_.begin() + static_cast<long>(first),
                        days_.begin() + static_cast<long>(first + count));
    std::vector<DailyMeasures> v(values_.begin() + static_cast<long>(first * n),
                                 values_.begin() + static_cast<long>((first + count) * n));
    return MeasurePanel(assets_, std::move(d), std::move(v));
}

PanelBuild build_panel(const std::vector<DailyMeasures>& measures,
                       const std::vector<std::string>& assets) {
    if (assets.empty()) throw_data(kStage, "no assets");
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < assets.size(); ++i) index.emplace(assets[i], i);

    std::vector<std::map<Date, const DailyMeasures*>> by_asset(assets.size());
    for (const auto& m : measures) {
        auto it = index.find(m.asset_id);
        if (it != index.end()) by_asset[it->second][m.trading_day] = &m;
    }

    std::set<Date> all_dates;
    for (std::size_t i = 0; i < assets.size(); ++i) {
        if (by_asset[i].empty()) throw_data(kStage, "asset " + assets[i] + " has no measures");
        for (const auto& [d, _] : by_asset[i]) all_dates.insert(d);
    }

    PanelBuild out;
    std::vector<Date> days;
    std::vector<DailyMeasures> values;
    for (const Date d : all_dates) {
        const bool everywhere = std::all_of(by_asset.begin(), by_asset.end(),
                                            [d](const auto& m) { return m.count(d) != 0; });
        if (!everywhere) {
            out.dropped_dates.push_back(d);
            continue;
        }
        days.push_back(d);
        for (const auto& m : by_asset) values.push_back(*m.at(d));
    }
    if (days.empty()) throw_data(kStage, "no common dates across assets");
    out.panel = MeasurePanel(assets, std::move(days), std::move(values));
    return out;
}

void write_measures_csv(const std::filesystem::path& path, const MeasurePanel& panel) {
    std::ofstream os(path);
    if (!os) throw_data(kStage, path.string() + ": cannot write");
    os << "date,asset,rv,rs_neg,rs_pos\n";
    for (std::size_t t = 0; t < panel.n_days(); ++t) {
        const std::string date = format_date(panel.days()[t]);
        for (std::size_t i = 0; i < panel.n_assets(); ++i) {
            const auto& m = panel.at(t, i);
            os << date << ',' << panel.assets()[i] << ',' << format_double(m.rv) << ','
               << format_double(m.rs_neg) << ',' << format_double(m.rs_pos) << '\n';
        }
    }
    if (!os) throw_data(kStage, path.string() + ": write failed");
}

MeasuresFile read_measures_csv(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw_data(kStage, path.string() + ": cannot open measures file");
    std::string line;
    if (!std::getline(is, line)) throw_data(kStage, path.string() + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "date,asset,rv,rs_neg,rs_pos") {
        throw_data(kStage, path.string() + ": expected header 'date,asset,rv,rs_neg,rs_pos'");
    }
    MeasuresFile out;
    std::set<std::string> seen;
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string_view> fields;
        std::string_view rest = line;
        for (;;) {
            const auto c = rest.find(',');
            fields.push_back(rest.substr(0, c));
            if (c == std::string_view::npos) break;
            rest.remove_prefix(c + 1);
        }
        const auto where = path.string() + ":" + std::to_string(line_no);
        if (fields.size() != 5) throw_data(kStage, where + ": expected 5 fields");
        const auto date = parse_date(fields[0]);
        if (!date) throw_data(kStage, where + ": bad date");
        double v[3];
        for (int j = 0; j < 3; ++j) {
            const auto f = fields[2 + j];
            auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v[j]);
            if (ec != std::errc{} || ptr != f.data() + f.size() || !std::isfinite(v[j]) || v[j] < 0.0) {
                throw_data(kStage, where + ": bad value");
            }
        }
        std::string asset(fields[1]);
        if (seen.insert(asset).second) out.assets.push_back(asset);
        out.rows.push_back({std::move(asset), *date, v[0], v[1], v[2]});
    }
    return out;
}

}  // namespace spillnet::realized
