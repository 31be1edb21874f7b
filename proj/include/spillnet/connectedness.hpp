#pragma once

// Spillover indices read off a row-normalized FEVD.
//
// Variable indices are zero-based. In the signed system of k = 2N variables
// asset i owns columns i (first block) and i + N (second block); with the
// default layout the first block holds positive semivariances.

#include <filesystem>
#include <string>
#include <vector>

#include "spillnet/common.hpp"
#include "spillnet/fevd.hpp"

namespace spillnet::connectedness {

enum class SystemMode { Plain, Signed };
enum class BlockOrder { PositiveFirst, NegativeFirst };

struct SystemLayout {
    int n_assets = 0;
    SystemMode mode = SystemMode::Plain;
    BlockOrder block_order = BlockOrder::PositiveFirst;

    static SystemLayout plain(int n) { return {n, SystemMode::Plain, BlockOrder::PositiveFirst}; }
    static SystemLayout signed_system(int n, BlockOrder order = BlockOrder::PositiveFirst) {
        return {n, SystemMode::Signed, order};
    }

    int dim() const noexcept { return mode == SystemMode::Signed ? 2 * n_assets : n_assets; }

    /// Throws Config unless `k` matches this layout.
    void check(int k) const;

    /// Variable labels, e.g. `AUD` or `AUD_pos` / `AUD_neg`.
    std::vector<std::string> variable_labels(const std::vector<std::string>& assets) const;
};

std::string to_string(SystemMode m);
std::string to_string(BlockOrder b);

/// 100/k times the off-diagonal sum.
double total_spillover(const fevd::FevdMatrix& f);
/// 100/k times row i's off-diagonal sum (received by i).
double directional_from(const fevd::FevdMatrix& f, int i);
/// 100/k times column i's off-diagonal sum (transmitted by i).
double directional_to(const fevd::FevdMatrix& f, int i);
double net_spillover(const fevd::FevdMatrix& f, int i);

/// True when cell (row, col) of a 2N system is left out of signed sums: the
/// main diagonal and the diagonals of the two off-diagonal blocks
/// (|row - col| == N).
bool excluded_cell(int row, int col, int n_assets) noexcept;

/// 100/(2N) times column `col` summed over the 2N - 2 rows not excluded.
double directional_to_signed(const fevd::FevdMatrix& f, const SystemLayout& layout, int col);
/// Row analogue of directional_to_signed (used for the FROM column of tables).
double directional_from_signed(const fevd::FevdMatrix& f, const SystemLayout& layout, int row);
/// 100/(2N) times the sum of every non-excluded cell.
double total_spillover_signed(const fevd::FevdMatrix& f, const SystemLayout& layout);

/// First-block TO minus second-block TO for asset i.
double directional_sam(const fevd::FevdMatrix& f, const SystemLayout& layout, int asset);
/// Sum over the first block of TO minus the same over the second block. With
/// positive semivariances first, a negative value means bad volatility
/// dominates.
double sam(const fevd::FevdMatrix& f, const SystemLayout& layout);

/// All indices for one window.
///
/// Plain mode: `to`/`from` per variable, `net` per asset, no sam/dsam.
/// Signed mode: `to`/`from` per variable under the exclusion pattern, `net`
/// per asset as the sum over its two variables of TO minus FROM, `total` from
/// the non-excluded cells, and sam/dsam.
struct SpilloverSnapshot {
    Date window_end{};
    double total = 0.0;
    std::vector<double> to;
    std::vector<double> from;
    std::vector<double> net;
    double sam = 0.0;
    std::vector<double> dsam;
    bool stationary = true;
};

SpilloverSnapshot snapshot(const fevd::FevdMatrix& f, const SystemLayout& layout, Date window_end,
                           bool stationary);

/// The normalized FEVD in percent, bordered by a FROM column, a TO row and
/// a TOTAL row whose only value sits in the FROM column. FROM/TO cells are
/// sums of the percentage entries (k times the directional indices), so TOTAL
/// is their average.
void write_spillover_table(const std::filesystem::path& path, const fevd::FevdMatrix& f,
                           const SystemLayout& layout, const std::vector<std::string>& labels);

}  // namespace spillnet::connectedness
