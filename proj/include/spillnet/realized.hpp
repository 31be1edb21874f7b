#pragma once

// Daily realized variance and signed realized semivariances, and the
// rectangular asset-by-day panel that feeds the VAR.

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "spillnet/common.hpp"
#include "spillnet/ingest.hpp"

namespace spillnet::realized {

struct DailyMeasures {
    std::string asset_id;
    Date trading_day{};
    double rv = 0.0;
    double rs_neg = 0.0;
    double rs_pos = 0.0;
};

struct Semivariances {
    double rs_neg = 0.0;
    double rs_pos = 0.0;
};

/// r_k = p_k - p_{k-1}. Throws Data for fewer than two grid points.
std::vector<double> intraday_returns(std::span<const double> log_prices);
std::vector<double> intraday_returns(const ingest::IntradayGrid& grid);

/// Sum of squared returns. Throws Data on an empty list.
double realized_variance(std::span<const double> returns);

/// Squares of strictly negative returns go to rs_neg, the rest (zeros
/// included) to rs_pos. Throws Data on an empty list.
Semivariances realized_semivariances(std::span<const double> returns);

DailyMeasures daily_measures(const ingest::IntradayGrid& grid);

/// T x N table of measures on the dates every asset has.
class MeasurePanel {
public:
    MeasurePanel() = default;
    /// `values` is row-major by day: values[t * N + i]. Throws Data if the
    /// table is not rectangular or the dates are not strictly increasing.
    MeasurePanel(std::vector<std::string> assets, std::vector<Date> days,
                 std::vector<DailyMeasures> values);

    const std::vector<std::string>& assets() const noexcept { return assets_; }
    const std::vector<Date>& days() const noexcept { return days_; }
    std::size_t n_assets() const noexcept { return assets_.size(); }
    std::size_t n_days() const noexcept { return days_.size(); }
    const DailyMeasures& at(std::size_t day, std::size_t asset) const {
        return values_[day * assets_.size() + asset];
    }

    /// Rows [first, first + count).
    MeasurePanel slice(std::size_t first, std::size_t count) const;

private:
    std::vector<std::string> assets_;
    std::vector<Date> days_;
    std::vector<DailyMeasures> values_;
};

struct PanelBuild {
    MeasurePanel panel;
    std::vector<Date> dropped_dates;  // dates some, but not all, assets have
};

/// Restricts to the intersection of dates across `assets`. Throws Data if an
/// asset has no measures or the intersection is empty.
PanelBuild build_panel(const std::vector<DailyMeasures>& measures,
                       const std::vector<std::string>& assets);

/// `date,asset,rv,rs_neg,rs_pos`, rows ordered by date then asset order.
void write_measures_csv(const std::filesystem::path& path, const MeasurePanel& panel);

/// Reads every row of a measures file (asset order = first appearance).
struct MeasuresFile {
    std::vector<std::string> assets;
    std::vector<DailyMeasures> rows;
};
MeasuresFile read_measures_csv(const std::filesystem::path& path);

}  // namespace spillnet::realized
