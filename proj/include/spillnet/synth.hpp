#pragma once

// Synthetic data for tests, fixtures and simulation studies.

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "spillnet/ingest.hpp"
#include "spillnet/realized.hpp"

namespace spillnet::synth {

/// T draws from y_t = c + sum_j Phi_j y_{t-j} + e_t, e_t ~ N(0, Sigma), after
/// `burn_in` discarded steps from zero.
Eigen::MatrixXd simulate_var(const std::vector<Eigen::MatrixXd>& phi, const Eigen::VectorXd& intercept,
                             const Eigen::MatrixXd& sigma, int T, std::mt19937_64& rng, int burn_in = 200);

/// Random VAR(p) coefficients scaled so the companion spectral radius equals
/// `radius`.
std::vector<Eigen::MatrixXd> random_stable_phi(int k, int p, double radius, std::mt19937_64& rng);

/// Random symmetric positive-definite k x k matrix.
Eigen::MatrixXd random_spd(int k, std::mt19937_64& rng);

/// Weekdays starting at `first` (inclusive).
std::vector<Date> business_days(Date first, int count);

/// Daily measures with semivariance-like levels (around 1e-5) driven by a
/// stable VAR(1) in logs with cross-asset and cross-sign spillovers. The
/// negative block loads more on a common factor, so bad volatility dominates.
realized::MeasurePanel synthetic_measures(const std::vector<std::string>& assets, int n_days,
                                          std::uint64_t seed, Date first_day);

/// Trades over `days` trading days of `cal` (excluded days skipped): a
/// random-walk log price with `ticks_per_day` trades at random session times.
ingest::TickSeries synthetic_ticks(const std::string& asset_id, const std::vector<Date>& days,
                                   const ingest::SessionCalendar& cal, int ticks_per_day,
                                   double daily_vol, std::uint64_t seed);

}  // namespace spillnet::synth
