#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spillnet/var.hpp"

namespace spillnet::fevd {

/// H-step generalized forecast-error variance decomposition.
/// raw(i, j) is the share of variable i's forecast-error variance due to
/// shocks in j; `normalized` divides each row by its sum.
struct FevdMatrix {
    int dim = 0;
    int horizon = 0;
    Eigen::MatrixXd raw;
    Eigen::MatrixXd normalized;
};

/// raw(i, j) = sigma_jj^{-1} sum_h (Psi_h Sigma)_{ij}^2 / sum_h (Psi_h Sigma Psi_h')_{ii}
/// for h = 0..H-1, with sigma_jj the j-th diagonal entry of Sigma.
///
/// `labels` (optional, size k) name variables in error messages. Throws
/// Numerical on a non-positive sigma_jj or a zero row sum.
FevdMatrix gfevd(const var::MaCoefficients& ma, const Eigen::MatrixXd& sigma, int horizon,
                 const std::vector<std::string>& labels = {});

/// Convenience: MA coefficients of `model` then gfevd with its residual covariance.
FevdMatrix gfevd(const var::VarModel& model, int horizon, const std::vector<std::string>& labels = {});

/// Normalized matrix with row and column labels.
void write_fevd_csv(const std::filesystem::path& path, const FevdMatrix& fevd,
                    const std::vector<std::string>& labels);

}  // namespace spillnet::fevd
