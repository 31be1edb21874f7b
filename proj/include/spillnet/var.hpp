#pragma once

// Least-squares VAR(p) with intercept and its moving-average representation.

#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace spillnet::var {

/// What fit_var does with a rank-deficient regressor matrix.
enum class RankPolicy {
    Error,        // throw Numerical "collinear window"
    MinimumNorm,  // minimum-norm least squares (complete orthogonal decomposition)
};

struct VarModel {
    int dim = 0;
    int lag_order = 0;
    Eigen::VectorXd intercept;
    std::vector<Eigen::MatrixXd> phi;  // phi[j] multiplies y_{t-j-1}
    Eigen::MatrixXd sigma_eps;         // residual cross-product / (T - p)
    int nobs = 0;                      // T - p
    double spectral_radius = 0.0;      // of the companion matrix
    bool stationary = false;           // spectral_radius < 1
};

struct MaCoefficients {
    std::vector<Eigen::MatrixXd> psi;  // psi[0] = I
};

/// Equation-by-equation least squares on a T x k block (rows are time).
/// Columns of the regressor matrix are scaled to unit norm before a
/// column-pivoted QR, so the rank test does not depend on the data's units.
/// Throws Data when T <= k*p + 1 or the block has non-finite values, and
/// Numerical "collinear window" on rank deficiency under RankPolicy::Error.
VarModel fit_var(const Eigen::Ref<const Eigen::MatrixXd>& window, int p,
                 RankPolicy policy = RankPolicy::Error);

/// Residuals of `model` on `window` (rows p..T-1).
Eigen::MatrixXd residuals(const VarModel& model, const Eigen::Ref<const Eigen::MatrixXd>& window);

/// [1, y_{t-1}', ..., y_{t-p}'] for t = p..T-1.
Eigen::MatrixXd lagged_regressors(const Eigen::Ref<const Eigen::MatrixXd>& window, int p);

/// ln det Sigma(p) + 2 (k^2 p + k) / T_eff, with every candidate fitted on the
/// same last T - p_max rows.
double aic(const Eigen::Ref<const Eigen::MatrixXd>& window, int p, int p_max);

/// Lag in 1..p_max with the smallest AIC; ties go to the smaller lag.
int select_lag(const Eigen::Ref<const Eigen::MatrixXd>& window, int p_max);

/// Psi_0 = I, Psi_i = sum_{j=1..min(i,p)} Phi_j Psi_{i-j}; returns H matrices.
MaCoefficients ma_coefficients(const VarModel& model, int horizon);

Eigen::MatrixXd companion_matrix(const VarModel& model);

/// Diagnostic dump with `phi`, `sigma`, `stationary` and friends.
nlohmann::json to_json(const VarModel& model);

}  // namespace spillnet::var
