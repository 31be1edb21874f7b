#pragma once

// Rolling-window connectedness with circular-block-bootstrap intervals for
// the asymmetry measures.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spillnet/connectedness.hpp"
#include "spillnet/realized.hpp"
#include "spillnet/var.hpp"

namespace spillnet::rolling {

enum class Transform { Raw, Log };

std::string to_string(Transform t);

struct RollingConfig {
    int window_length = 200;
    int horizon = 10;
    int lag_order = 2;
    connectedness::SystemMode mode = connectedness::SystemMode::Signed;
    connectedness::BlockOrder block_order = connectedness::BlockOrder::PositiveFirst;
    Transform transform = Transform::Raw;
    int bootstrap_reps = 500;
    int block_length = 50;
    double ci_level = 0.95;
    std::uint64_t rng_seed = 0;
    int jobs = 0;  // 0 = hardware concurrency
    var::RankPolicy rank_policy = var::RankPolicy::Error;

    /// Throws Config when the settings cannot work for a `dim`-variable system.
    void validate(int dim) const;
};

/// The VAR input: a T x k matrix with its labels and layout.
struct SystemData {
    connectedness::SystemLayout layout;
    std::vector<std::string> assets;
    std::vector<std::string> labels;
    std::vector<Date> dates;
    Eigen::MatrixXd values;
};

/// Plain mode uses RV; signed mode stacks the two semivariance blocks in
/// `order`. Throws Data when the log transform meets a zero measure.
SystemData system_data(const realized::MeasurePanel& panel, connectedness::SystemMode mode,
                       connectedness::BlockOrder order, Transform transform);

struct Interval {
    double lower = 0.0;
    double upper = 0.0;
};

/// Bootstrap intervals for one window (signed mode).
struct WindowCi {
    Interval sam;
    std::vector<Interval> dsam;  // per asset
    std::vector<Interval> to;    // per variable
    int attempts = 0;            // replicates drawn, including redraws
};

struct GapRecord {
    Date window_end{};
    std::string reason;
};

struct SpilloverSeries {
    connectedness::SystemLayout layout;
    std::vector<std::string> assets;
    std::vector<std::string> labels;
    std::vector<connectedness::SpilloverSnapshot> snapshots;
    std::vector<std::optional<WindowCi>> ci;  // parallel to snapshots
    std::vector<GapRecord> gaps;
};

/// Order-statistic percentile interval: the ceil(R a/2)-th and
/// ceil(R (1 - a/2))-th smallest of R draws, a = 1 - level.
Interval percentile_interval(std::vector<double> draws, double level);

/// Circular block bootstrap of the window's rows: blocks of
/// cfg.block_length rows start uniformly at random and wrap around the
/// window end. Each replicate refits the VAR and recomputes sam, dsam and the
/// signed TO indices. Replicate r draws from its own stream seeded from
/// (seed, r); failed fits are redrawn, at most 10 * reps draws in total.
WindowCi bootstrap_ci(const Eigen::Ref<const Eigen::MatrixXd>& window,
                      const connectedness::SystemLayout& layout, const RollingConfig& cfg,
                      std::uint64_t seed, int jobs = 1);

/// Seed for the window ending at `window_end`.
std::uint64_t window_seed(std::uint64_t rng_seed, Date window_end) noexcept;

/// Fits every window of cfg.window_length consecutive rows. Windows whose fit
/// fails become gap records. Throws Data if the panel is shorter than a window.
SpilloverSeries run_rolling(const SystemData& data, const RollingConfig& cfg);
SpilloverSeries run_rolling(const realized::MeasurePanel& panel, const RollingConfig& cfg);

struct HypothesisFlags {
    Date window_end{};
    bool h1 = false;                // sam
    std::vector<bool> h2;           // signed TO per variable
    std::vector<bool> h3;           // dsam per asset
};

/// True when 0 lies strictly outside the interval.
bool rejects_zero(const Interval& ci) noexcept;

/// Flags for every snapshot that carries intervals.
std::vector<HypothesisFlags> test_hypotheses(const SpilloverSeries& series);

void write_rolling_csv(const std::filesystem::path& path, const SpilloverSeries& series);
void write_hypotheses_csv(const std::filesystem::path& path, const SpilloverSeries& series,
                          const std::vector<HypothesisFlags>& flags);
void write_gaps_csv(const std::filesystem::path& path, const SpilloverSeries& series);

/// Runs fn(0..n-1) on up to `jobs` threads (0 = hardware concurrency). The
/// first exception thrown is rethrown after all workers stop.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

}  // namespace spillnet::rolling
