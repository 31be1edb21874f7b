#include "spillnet/connectedness.hpp"

#include <cstdlib>
#include <fstream>

namespace spillnet::connectedness {

namespace {

constexpr const char* kStage = "connectedness";

void check_index(const fevd::FevdMatrix& f, int i) {
    if (i < 0 || i >= f.dim) throw_data(kStage, "variable index " + std::to_string(i) + " out of range");
}

void check_signed(const fevd::FevdMatrix& f, const SystemLayout& layout) {
    if (layout.mode != SystemMode::Signed) throw_config(kStage, "signed measure requested for a plain system");
    layout.check(f.dim);
}

}  // namespace

void SystemLayout::check(int k) const {
    if (n_assets < 1) throw_config(kStage, "layout needs at least one asset");
    if (k != dim()) {
        throw_config(kStage, "system of dimension " + std::to_string(k) + " does not match " +
                                 to_string(mode) + " layout with " + std::to_string(n_assets) + " assets");
    }
}

std::vector<std::string> SystemLayout::variable_labels(const std::vector<std::string>& assets) const {
    if (static_cast<int>(assets.size()) != n_assets) throw_config(kStage, "asset label count mismatch");
    if (mode == SystemMode::Plain) return assets;
    const bool pos_first = block_order == BlockOrder::PositiveFirst;
    std::vector<std::string> out;
    for (const char* suffix : {pos_first ? "_pos" : "_neg", pos_first ? "_neg" : "_pos"}) {
        for (const auto& a : assets) out.push_back(a + suffix);
    }
    return out;
}

std::string to_string(SystemMode m) { return m == SystemMode::Plain ? "plain" : "signed"; }
std::string to_string(BlockOrder b) {
    return b == BlockOrder::PositiveFirst ? "positive_first" : "negative_first";
}

double total_spillover(const fevd::FevdMatrix& f) {
    const auto& w = f.normalized;
    return 100.0 * (w.sum() - w.trace()) / f.dim;
}

double directional_from(const fevd::FevdMatrix& f, int i) {
    check_index(f, i);
    const auto& w = f.normalized;
    return 100.0 * (w.row(i).sum() - w(i, i)) / f.dim;
}

double directional_to(const fevd::FevdMatrix& f, int i) {
    check_index(f, i);
    const auto& w = f.normalized;
    return 100.0 * (w.col(i).sum() - w(i, i)) / f.dim;
}

double net_spillover(const fevd::FevdMatrix& f, int i) { return directional_to(f, i) - directional_from(f, i); }

bool excluded_cell(int row, int col, int n_assets) noexcept {
    return row == col || std::abs(row - col) == n_assets;
}

double directional_to_signed(const fevd::FevdMatrix& f, const SystemLayout& layout, int col) {
    check_signed(f, layout);
    check_index(f, col);
    double s = 0.0;
    for (int r = 0; r < f.dim; ++r) {
        if (!excluded_cell(r, col, layout.n_assets)) s += f.normalized(r, col);
    }
    return 100.0 * s / f.dim;
}

double directional_from_signed(const fevd::FevdMatrix& f, const SystemLayout& layout, int row) {
    check_signed(f, layout);
    check_index(f, row);
    double s = 0.0;
    for (int c = 0; c < f.dim; ++c) {
        if (!excluded_cell(row, c, layout.n_assets)) s += f.normalized(row, c);
    }
    return 100.0 * s / f.dim;
}

double total_spillover_signed(const fevd::FevdMatrix& f, const SystemLayout& layout) {
    check_signed(f, layout);
    double s = 0.0;
    for (int c = 0; c < f.dim; ++c) {
        for (int r = 0; r < f.dim; ++r) {
            if (!excluded_cell(r, c, layout.n_assets)) s += f.normalized(r, c);
        }
    }
    return 100.0 * s / f.dim;
}

double directional_sam(const fevd::FevdMatrix& f, const SystemLayout& layout, int asset) {
    check_signed(f, layout);
    if (asset < 0 || asset >= layout.n_assets) throw_data(kStage, "asset index out of range");
    return directional_to_signed(f, layout, asset) - directional_to_signed(f, layout, asset + layout.n_assets);
}

double sam(const fevd::FevdMatrix& f, const SystemLayout& layout) {
    check_signed(f, layout);
    double first = 0.0, second = 0.0;
    for (int i = 0; i < layout.n_assets; ++i) {
        first += directional_to_signed(f, layout, i);
        second += directional_to_signed(f, layout, i + layout.n_assets);
    }
    return first - second;
}

SpilloverSnapshot snapshot(const fevd::FevdMatrix& f, const SystemLayout& layout, Date window_end,
                           bool stationary) {
    layout.check(f.dim);
    SpilloverSnapshot s;
    s.window_end = window_end;
    s.stationary = stationary;
    const int k = f.dim;
    const int n = layout.n_assets;
    s.to.resize(static_cast<std::size_t>(k));
    s.from.resize(static_cast<std::size_t>(k));
    s.net.resize(static_cast<std::size_t>(n));
    if (layout.mode == SystemMode::Plain) {
        s.total = total_spillover(f);
        for (int i = 0; i < k; ++i) {
            s.to[static_cast<std::size_t>(i)] = directional_to(f, i);
            s.from[static_cast<std::size_t>(i)] = directional_from(f, i);
            s.net[static_cast<std::size_t>(i)] = s.to[static_cast<std::size_t>(i)] - s.from[static_cast<std::size_t>(i)];
        }
        return s;
    }
    s.total = total_spillover_signed(f, layout);
    for (int i = 0; i < k; ++i) {
        s.to[static_cast<std::size_t>(i)] = directional_to_signed(f, layout, i);
        s.from[static_cast<std::size_t>(i)] = directional_from_signed(f, layout, i);
    }
    s.dsam.resize(static_cast<std::size_t>(n));
    double first = 0.0, second = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto a = static_cast<std::size_t>(i);
        const auto b = static_cast<std::size_t>(i + n);
        s.net[a] = (s.to[a] + s.to[b]) - (s.from[a] + s.from[b]);
        s.dsam[a] = s.to[a] - s.to[b];
        first += s.to[a];
        second += s.to[b];
    }
    s.sam = first - second;
    return s;
}

void write_spillover_table(const std::filesystem::path& path, const fevd::FevdMatrix& f,
                           const SystemLayout& layout, const std::vector<std::string>& labels) {
    layout.check(f.dim);
    if (labels.size() != static_cast<std::size_t>(f.dim)) throw_data(kStage, "label count mismatch");
    const int k = f.dim;
    const bool is_signed = layout.mode == SystemMode::Signed;
    auto skip = [&](int r, int c) { return is_signed ? excluded_cell(r, c, layout.n_assets) : r == c; };

    std::ofstream os(path);
    if (!os) throw_data(kStage, path.string() + ": cannot write");
    os << "variable";
    for (const auto& l : labels) os << ',' << l;
    os << ",FROM\n";
    for (int r = 0; r < k; ++r) {
        os << labels[static_cast<std::size_t>(r)];
        double from = 0.0;
        for (int c = 0; c < k; ++c) {
            const double v = 100.0 * f.normalized(r, c);
            if (!skip(r, c)) from += v;
            os << ',' << format_double(v);
        }
        os << ',' << format_double(from) << '\n';
    }
    os << "TO";
    for (int c = 0; c < k; ++c) {
        double to = 0.0;
        for (int r = 0; r < k; ++r) {
            if (!skip(r, c)) to += 100.0 * f.normalized(r, c);
        }
        os << ',' << format_double(to);
    }
    const double total = is_signed ? total_spillover_signed(f, layout) : total_spillover(f);
    os << ",\nTOTAL";
    for (int c = 0; c < k; ++c) os << ',';
    os << ',' << format_double(total) << '\n';
}

}  // namespace spillnet::connectedness
