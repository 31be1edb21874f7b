#include "spillnet/fevd.hpp"

#include <cmath>
#include <fstream>

#include "spillnet/common.hpp"
#include "spillnet/simd/kernels.hpp"

namespace spillnet::fevd {

namespace {

constexpr const char* kStage = "fevd";

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

std::string var_name(const std::vector<std::string>& labels, Eigen::Index i) {
    if (static_cast<std::size_t>(i) < labels.size()) return labels[static_cast<std::size_t>(i)];
    return "variable " + std::to_string(i + 1);
}

}  // namespace

FevdMatrix gfevd(const var::MaCoefficients& ma, const Eigen::MatrixXd& sigma, int horizon,
                 const std::vector<std::string>& labels) {
    const Eigen::Index k = sigma.rows();
    if (horizon < 1) throw_config(kStage, "horizon must be >= 1");
    if (sigma.cols() != k) throw_data(kStage, "covariance must be square");
    if (ma.psi.size() < static_cast<std::size_t>(horizon)) {
        throw_data(kStage, "need " + std::to_string(horizon) + " MA coefficients, got " +
                               std::to_string(ma.psi.size()));
    }
    for (Eigen::Index j = 0; j < k; ++j) {
        if (!(sigma(j, j) > 0.0)) {
            throw_numerical(kStage, "non-positive error variance for " + var_name(labels, j));
        }
    }

    // Rows of Psi_h Sigma are contiguous so the kernels can stream them.
    RowMatrix numer = RowMatrix::Zero(k, k);
    Eigen::VectorXd denom = Eigen::VectorXd::Zero(k);
    RowMatrix psi_sigma(k, k);
    RowMatrix psi(k, k);
    for (int h = 0; h < horizon; ++h) {
        psi = ma.psi[static_cast<std::size_t>(h)];
        psi_sigma.noalias() = psi * sigma;
        for (Eigen::Index i = 0; i < k; ++i) {
            const std::span<const double> row(psi_sigma.row(i).data(), static_cast<std::size_t>(k));
            simd::square_accumulate(row, std::span<double>(numer.row(i).data(), static_cast<std::size_t>(k)));
            // (Psi_h Sigma Psi_h')_{ii} = <row i of Psi_h Sigma, row i of Psi_h>
            denom(i) += simd::dot(row, std::span<const double>(psi.row(i).data(), static_cast<std::size_t>(k)));
        }
    }

    FevdMatrix out;
    out.dim = static_cast<int>(k);
    out.horizon = horizon;
    out.raw.resize(k, k);
    out.normalized.resize(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
        for (Eigen::Index j = 0; j < k; ++j) out.raw(i, j) = numer(i, j) / sigma(j, j) / denom(i);
        const double row_sum = out.raw.row(i).sum();
        if (!(row_sum > 0.0) || !std::isfinite(row_sum)) {
            throw_numerical(kStage, "zero variance decomposition row for " + var_name(labels, i));
        }
        out.normalized.row(i) = out.raw.row(i) / row_sum;
    }
    return out;
}

FevdMatrix gfevd(const var::VarModel& model, int horizon, const std::vector<std::string>& labels) {
    return gfevd(var::ma_coefficients(model, horizon), model.sigma_eps, horizon, labels);
}

void write_fevd_csv(const std::filesystem::path& path, const FevdMatrix& fevd,
                    const std::vector<std::string>& labels) {
    if (labels.size() != static_cast<std::size_t>(fevd.dim)) throw_data(kStage, "label count mismatch");
    std::ofstream os(path);
    if (!os) throw_data(kStage, path.string() + ": cannot write");
    os << "variable";
    for (const auto& l : labels) os << ',' << l;
    os << '\n';
    for (int i = 0; i < fevd.dim; ++i) {
        os << labels[static_cast<std::size_t>(i)];
        for (int j = 0; j < fevd.dim; ++j) os << ',' << format_double(fevd.normalized(i, j));
        os << '\n';
    }
}

}  // namespace spillnet::fevd
