#include "spillnet/rolling.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <random>
#include <thread>

#include <spdlog/spdlog.h>

#include "spillnet/fevd.hpp"

namespace spillnet::rolling {

namespace {

constexpr const char* kStage = "rolling";

using connectedness::SystemLayout;
using connectedness::SystemMode;

struct SignedMeasures {
    double sam = 0.0;
    std::vector<double> dsam;
    std::vector<double> to;
};

SignedMeasures signed_measures(const Eigen::Ref<const Eigen::MatrixXd>& sample, const SystemLayout& layout,
                               const RollingConfig& cfg) {
    const auto model = var::fit_var(sample, cfg.lag_order, cfg.rank_policy);
    const auto f = fevd::gfevd(model, cfg.horizon);
    const auto snap = connectedness::snapshot(f, layout, Date{}, model.stationary);
    return {snap.sam, snap.dsam, snap.to};
}

}  // namespace

std::string to_string(Transform t) { return t == Transform::Raw ? "raw" : "log"; }

void RollingConfig::validate(int dim) const {
    if (lag_order < 1) throw_config(kStage, "lag order must be >= 1");
    if (horizon < 1) throw_config(kStage, "horizon must be >= 1");
    if (window_length <= lag_order * dim + 1) {
        throw_config(kStage, "window length " + std::to_string(window_length) +
                                 " must exceed lags * dim + 1 = " + std::to_string(lag_order * dim + 1));
    }
    if (bootstrap_reps < 0) throw_config(kStage, "bootstrap replicates must be >= 0");
    if (bootstrap_reps > 0 && (block_length < 1 || block_length >= window_length)) {
        throw_config(kStage, "block length must lie in [1, window length)");
    }
    if (!(ci_level > 0.0 && ci_level < 1.0)) throw_config(kStage, "ci level must lie in (0, 1)");
    if (jobs < 0) throw_config(kStage, "jobs must be >= 0");
}

SystemData system_data(const realized::MeasurePanel& panel, SystemMode mode, connectedness::BlockOrder order,
                       Transform transform) {
    const int n = static_cast<int>(panel.n_assets());
    SystemData d;
    d.layout = mode == SystemMode::Plain ? SystemLayout::plain(n) : SystemLayout::signed_system(n, order);
    d.assets = panel.assets();
    d.labels = d.layout.variable_labels(d.assets);
    d.dates = panel.days();
    const auto T = static_cast<Eigen::Index>(panel.n_days());
    const int k = d.layout.dim();
    d.values.resize(T, k);
    const bool pos_first = order == connectedness::BlockOrder::PositiveFirst;
    for (Eigen::Index t = 0; t < T; ++t) {
        for (int i = 0; i < n; ++i) {
            const auto& m = panel.at(static_cast<std::size_t>(t), static_cast<std::size_t>(i));
            if (mode == SystemMode::Plain) {
                d.values(t, i) = m.rv;
            } else {
                d.values(t, i) = pos_first ? m.rs_pos : m.rs_neg;
                d.values(t, i + n) = pos_first ? m.rs_neg : m.rs_pos;
            }
        }
    }
    if (transform == Transform::Log) {
        for (Eigen::Index t = 0; t < T; ++t) {
            for (int c = 0; c < k; ++c) {
                if (!(d.values(t, c) > 0.0)) {
                    throw_data("measures", "log transform of a zero measure: " + d.labels[static_cast<std::size_t>(c)] +
                                               " on " + format_date(d.dates[static_cast<std::size_t>(t)]));
                }
                d.values(t, c) = std::log(d.values(t, c));
            }
        }
    }
    return d;
}

Interval percentile_interval(std::vector<double> draws, double level) {
    if (draws.empty()) throw_numerical(kStage, "no bootstrap draws");
    std::sort(draws.begin(), draws.end());
    const double r = static_cast<double>(draws.size());
    const double alpha = 1.0 - level;
    auto order_stat = [&](double q) {
        // Small epsilon keeps exact products like 500 * 0.025 from rounding up.
        auto idx = static_cast<std::size_t>(std::ceil(r * q - 1e-9));
        idx = std::clamp<std::size_t>(idx, 1, draws.size());
        return draws[idx - 1];
    };
    return {order_stat(alpha / 2.0), order_stat(1.0 - alpha / 2.0)};
}

std::uint64_t window_seed(std::uint64_t rng_seed, Date window_end) noexcept {
    return mix_seed(rng_seed, static_cast<std::uint64_t>(window_end.time_since_epoch().count()));
}

WindowCi bootstrap_ci(const Eigen::Ref<const Eigen::MatrixXd>& window, const SystemLayout& layout,
                      const RollingConfig& cfg, std::uint64_t seed, int jobs) {
    if (layout.mode != SystemMode::Signed) throw_config(kStage, "bootstrap intervals need the signed system");
    layout.check(static_cast<int>(window.cols()));
    if (cfg.bootstrap_reps < 1) throw_config(kStage, "bootstrap needs at least one replicate");
    const auto W = window.rows();
    const int b = cfg.block_length;
    if (b < 1 || b >= W) throw_config(kStage, "block length must lie in [1, window length)");
    const int reps = cfg.bootstrap_reps;
    const int n = layout.n_assets;
    const int k = layout.dim();
    const long cap = 10L * reps;

    std::vector<SignedMeasures> draws(static_cast<std::size_t>(reps));
    std::atomic<long> attempts{0};
    const Eigen::MatrixXd block = window;

    parallel_for(static_cast<std::size_t>(reps), jobs, [&](std::size_t r) {
        std::mt19937_64 rng(mix_seed(seed, r));
        std::uniform_int_distribution<Eigen::Index> start_dist(0, W - 1);
        Eigen::MatrixXd sample(W, k);
        for (;;) {
            if (attempts.fetch_add(1) >= cap) {
                throw_numerical(kStage, "bootstrap exceeded " + std::to_string(cap) + " draws");
            }
            for (Eigen::Index row = 0; row < W;) {
                const Eigen::Index s = start_dist(rng);
                for (int j = 0; j < b && row < W; ++j, ++row) sample.row(row) = block.row((s + j) % W);
            }
            try {
                draws[r] = signed_measures(sample, layout, cfg);
                return;
            } catch (const Error&) {
                // redraw
            }
        }
    });

    WindowCi ci;
    ci.attempts = static_cast<int>(attempts.load());
    std::vector<double> v(static_cast<std::size_t>(reps));
    auto collect = [&](auto getter) {
        for (int r = 0; r < reps; ++r) v[static_cast<std::size_t>(r)] = getter(draws[static_cast<std::size_t>(r)]);
        return percentile_interval(v, cfg.ci_level);
    };
    ci.sam = collect([](const SignedMeasures& m) { return m.sam; });
    for (int i = 0; i < n; ++i) {
        ci.dsam.push_back(collect([i](const SignedMeasures& m) { return m.dsam[static_cast<std::size_t>(i)]; }));
    }
    for (int i = 0; i < k; ++i) {
        ci.to.push_back(collect([i](const SignedMeasures& m) { return m.to[static_cast<std::size_t>(i)]; }));
    }
    return ci;
}

SpilloverSeries run_rolling(const SystemData& data, const RollingConfig& cfg) {
    const int k = data.layout.dim();
    data.layout.check(static_cast<int>(data.values.cols()));
    cfg.validate(k);
    const auto T = data.values.rows();
    const auto W = static_cast<Eigen::Index>(cfg.window_length);
    if (T < W) {
        throw_data(kStage, "panel has " + std::to_string(T) + " days, shorter than the " +
                               std::to_string(W) + "-day window");
    }
    const auto n_windows = static_cast<std::size_t>(T - W + 1);
    const bool with_ci = data.layout.mode == SystemMode::Signed && cfg.bootstrap_reps > 0;

    struct Slot {
        std::optional<connectedness::SpilloverSnapshot> snap;
        std::optional<WindowCi> ci;
        std::string gap;
    };
    std::vector<Slot> slots(n_windows);

    parallel_for(n_windows, cfg.jobs, [&](std::size_t w) {
        const Eigen::Index first = static_cast<Eigen::Index>(w);
        const Date end = data.dates[w + static_cast<std::size_t>(W) - 1];
        const auto window = data.values.middleRows(first, W);
        Slot& slot = slots[w];
        try {
            const auto model = var::fit_var(window, cfg.lag_order, cfg.rank_policy);
            const auto f = fevd::gfevd(model, cfg.horizon, data.labels);
            slot.snap = connectedness::snapshot(f, data.layout, end, model.stationary);
        } catch (const Error& e) {
            slot.gap = e.what();
            return;
        }
        if (with_ci) {
            try {
                slot.ci = bootstrap_ci(window, data.layout, cfg, window_seed(cfg.rng_seed, end), 1);
            } catch (const Error& e) {
                spdlog::warn("window ending {}: no bootstrap interval: {}", format_date(end), e.what());
            }
        }
    });

    SpilloverSeries out;
    out.layout = data.layout;
    out.assets = data.assets;
    out.labels = data.labels;
    for (std::size_t w = 0; w < n_windows; ++w) {
        Slot& slot = slots[w];
        if (slot.snap) {
            out.snapshots.push_back(std::move(*slot.snap));
            out.ci.push_back(std::move(slot.ci));
        } else {
            out.gaps.push_back({data.dates[w + static_cast<std::size_t>(W) - 1], std::move(slot.gap)});
        }
    }
    return out;
}

SpilloverSeries run_rolling(const realized::MeasurePanel& panel, const RollingConfig& cfg) {
    return run_rolling(system_data(panel, cfg.mode, cfg.block_order, cfg.transform), cfg);
}

bool rejects_zero(const Interval& ci) noexcept { return ci.lower > 0.0 || ci.upper < 0.0; }

std::vector<HypothesisFlags> test_hypotheses(const SpilloverSeries& series) {
    std::vector<HypothesisFlags> out;
    for (std::size_t s = 0; s < series.snapshots.size(); ++s) {
        if (!series.ci[s]) continue;
        const WindowCi& ci = *series.ci[s];
        HypothesisFlags f;
        f.window_end = series.snapshots[s].window_end;
        f.h1 = rejects_zero(ci.sam);
        for (const auto& iv : ci.to) f.h2.push_back(rejects_zero(iv));
        for (const auto& iv : ci.dsam) f.h3.push_back(rejects_zero(iv));
        out.push_back(std::move(f));
    }
    return out;
}

// --- CSV --------------------------------------------------------------------

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream os(path);
    if (!os) throw_data(kStage, path.string() + ": cannot write");
    return os;
}

}  // namespace

void write_rolling_csv(const std::filesystem::path& path, const SpilloverSeries& series) {
    const bool is_signed = series.layout.mode == SystemMode::Signed;
    auto os = open_out(path);
    os << "window_end,total";
    if (is_signed) os << ",sam,sam_lo,sam_hi";
    for (const auto& l : series.labels) os << ",to_" << l;
    for (const auto& l : series.labels) os << ",from_" << l;
    for (const auto& a : series.assets) os << ",net_" << a;
    if (is_signed) {
        for (const auto& a : series.assets) os << ",dsam_" << a << ",dsam_" << a << "_lo,dsam_" << a << "_hi";
    }
    os << ",stationary\n";

    for (std::size_t s = 0; s < series.snapshots.size(); ++s) {
        const auto& snap = series.snapshots[s];
        const auto& ci = series.ci[s];
        os << format_date(snap.window_end) << ',' << format_double(snap.total);
        if (is_signed) {
            os << ',' << format_double(snap.sam);
            if (ci) {
                os << ',' << format_double(ci->sam.lower) << ',' << format_double(ci->sam.upper);
            } else {
                os << ",,";
            }
        }
        for (double v : snap.to) os << ',' << format_double(v);
        for (double v : snap.from) os << ',' << format_double(v);
        for (double v : snap.net) os << ',' << format_double(v);
        if (is_signed) {
            for (std::size_t i = 0; i < snap.dsam.size(); ++i) {
                os << ',' << format_double(snap.dsam[i]);
                if (ci) {
                    os << ',' << format_double(ci->dsam[i].lower) << ',' << format_double(ci->dsam[i].upper);
                } else {
                    os << ",,";
                }
            }
        }
        os << ',' << (snap.stationary ? "true" : "false") << '\n';
    }
}

void write_hypotheses_csv(const std::filesystem::path& path, const SpilloverSeries& series,
                          const std::vector<HypothesisFlags>& flags) {
    auto os = open_out(path);
    os << "window_end,h1_reject";
    for (const auto& l : series.labels) os << ",h2_reject_" << l;
    for (const auto& a : series.assets) os << ",h3_reject_" << a;
    os << '\n';
    for (const auto& f : flags) {
        os << format_date(f.window_end) << ',' << int{f.h1};
        for (bool b : f.h2) os << ',' << int{b};
        for (bool b : f.h3) os << ',' << int{b};
        os << '\n';
    }
}

void write_gaps_csv(const std::filesystem::path& path, const SpilloverSeries& series) {
    auto os = open_out(path);
    os << "window_end,reason\n";
    for (const auto& g : series.gaps) {
        std::string reason = g.reason;
        std::replace(reason.begin(), reason.end(), ',', ';');
        os << format_date(g.window_end) << ',' << reason << '\n';
    }
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
    std::size_t workers = jobs > 0 ? static_cast<std::size_t>(jobs) : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
        for (;;) {
            if (failed.load()) return;
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                failed.store(true);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace spillnet::rolling
