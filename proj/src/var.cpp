#include "spillnet/var.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "spillnet/common.hpp"

namespace spillnet::var {

namespace {

constexpr const char* kStage = "var";
constexpr double kRankThreshold = 1e-10;

}  // namespace

Eigen::MatrixXd lagged_regressors(const Eigen::Ref<const Eigen::MatrixXd>& window, int p) {
    const Eigen::Index T = window.rows();
    const Eigen::Index k = window.cols();
    const Eigen::Index n = T - p;
    Eigen::MatrixXd x(n, 1 + k * p);
    x.col(0).setOnes();
    for (int j = 1; j <= p; ++j) x.block(0, 1 + (j - 1) * k, n, k) = window.middleRows(p - j, n);
    return x;
}

VarModel fit_var(const Eigen::Ref<const Eigen::MatrixXd>& window, int p, RankPolicy policy) {
    const auto T = window.rows();
    const auto k = window.cols();
    if (p < 1) throw_config(kStage, "lag order must be >= 1");
    if (k < 1) throw_data(kStage, "empty system");
    if (T <= k * p + 1) {
        throw_data(kStage, "window too short: T=" + std::to_string(T) + " needs T > k*p+1 = " +
                               std::to_string(k * p + 1));
    }
    if (!window.allFinite()) throw_data(kStage, "window contains non-finite values");

    const Eigen::MatrixXd x = lagged_regressors(window, p);
    const Eigen::MatrixXd y = window.bottomRows(T - p);

    Eigen::VectorXd scale = x.colwise().norm().transpose();
    for (Eigen::Index c = 0; c < scale.size(); ++c) {
        if (scale(c) == 0.0) {
            if (policy == RankPolicy::Error) throw_numerical(kStage, "collinear window");
            scale(c) = 1.0;
        }
    }
    const Eigen::MatrixXd xs = x * scale.cwiseInverse().asDiagonal();

    Eigen::MatrixXd coef;  // (1 + kp) x k
    if (policy == RankPolicy::Error) {
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xs.rows(), xs.cols());
        qr.setThreshold(kRankThreshold);
        qr.compute(xs);
        if (qr.rank() < xs.cols()) throw_numerical(kStage, "collinear window");
        coef = qr.solve(y);
    } else {
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(xs.rows(), xs.cols());
        cod.setThreshold(kRankThreshold);
        cod.compute(xs);
        coef = cod.solve(y);
    }
    coef = scale.cwiseInverse().asDiagonal() * coef;

    VarModel m;
    m.dim = static_cast<int>(k);
    m.lag_order = p;
    m.nobs = static_cast<int>(T - p);
    m.intercept = coef.row(0).transpose();
    for (int j = 0; j < p; ++j) m.phi.push_back(coef.middleRows(1 + j * k, k).transpose());

    const Eigen::MatrixXd e = y - x * coef;
    Eigen::MatrixXd s = (e.transpose() * e) / static_cast<double>(T - p);
    m.sigma_eps = 0.5 * (s + s.transpose());
    for (Eigen::Index i = 0; i < k; ++i) {
        if (!(m.sigma_eps(i, i) > 0.0)) {
            throw_numerical(kStage, "degenerate residual variance for variable " + std::to_string(i + 1));
        }
    }

    const Eigen::MatrixXd comp = companion_matrix(m);
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp, /*computeEigenvectors=*/false);
    m.spectral_radius = es.eigenvalues().cwiseAbs().maxCoeff();
    m.stationary = m.spectral_radius < 1.0;
    return m;
}

Eigen::MatrixXd residuals(const VarModel& model, const Eigen::Ref<const Eigen::MatrixXd>& window) {
    const int p = model.lag_order;
    const Eigen::Index k = model.dim;
    const Eigen::MatrixXd x = lagged_regressors(window, p);
    Eigen::MatrixXd coef(1 + k * p, k);
    coef.row(0) = model.intercept.transpose();
    for (int j = 0; j < p; ++j) coef.middleRows(1 + j * k, k) = model.phi[static_cast<std::size_t>(j)].transpose();
    return window.bottomRows(window.rows() - p) - x * coef;
}

Eigen::MatrixXd companion_matrix(const VarModel& model) {
    const int k = model.dim;
    const int p = model.lag_order;
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(k * p, k * p);
    for (int j = 0; j < p; ++j) c.block(0, j * k, k, k) = model.phi[static_cast<std::size_t>(j)];
    if (p > 1) c.block(k, 0, k * (p - 1), k * (p - 1)).setIdentity();
    return c;
}

double aic(const Eigen::Ref<const Eigen::MatrixXd>& window, int p, int p_max) {
    if (p < 1 || p > p_max) throw_config(kStage, "lag candidate out of range");
    const Eigen::Index skip = p_max - p;
    const VarModel m = fit_var(window.bottomRows(window.rows() - skip), p);
    Eigen::LLT<Eigen::MatrixXd> llt(m.sigma_eps);
    if (llt.info() != Eigen::Success) {
        throw_numerical(kStage, "residual covariance not positive definite at p=" + std::to_string(p));
    }
    const double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    const double k = m.dim;
    return logdet + 2.0 * (k * k * p + k) / static_cast<double>(m.nobs);
}

int select_lag(const Eigen::Ref<const Eigen::MatrixXd>& window, int p_max) {
    if (p_max < 1) throw_config(kStage, "p_max must be >= 1");
    int best = 1;
    double best_value = std::numeric_limits<double>::infinity();
    for (int p = 1; p <= p_max; ++p) {
        const double v = aic(window, p, p_max);
        if (v < best_value) {
            best_value = v;
            best = p;
        }
    }
    return best;
}

MaCoefficients ma_coefficients(const VarModel& model, int horizon) {
    if (horizon < 1) throw_config(kStage, "horizon must be >= 1");
    const int k = model.dim;
    const int p = model.lag_order;
    MaCoefficients out;
    out.psi.reserve(static_cast<std::size_t>(horizon));
    out.psi.push_back(Eigen::MatrixXd::Identity(k, k));
    for (int i = 1; i < horizon; ++i) {
        Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(k, k);
        for (int j = 1; j <= std::min(i, p); ++j) {
            acc.noalias() += model.phi[static_cast<std::size_t>(j - 1)] * out.psi[static_cast<std::size_t>(i - j)];
        }
        out.psi.push_back(std::move(acc));
    }
    return out;
}

namespace {

nlohmann::json matrix_json(const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

nlohmann::json to_json(const VarModel& model) {
    nlohmann::json j;
    j["dim"] = model.dim;
    j["lag_order"] = model.lag_order;
    j["nobs"] = model.nobs;
    j["intercept"] = std::vector<double>(model.intercept.data(), model.intercept.data() + model.intercept.size());
    j["phi"] = nlohmann::json::array();
    for (const auto& phi : model.phi) j["phi"].push_back(matrix_json(phi));
    j["sigma"] = matrix_json(model.sigma_eps);
    j["spectral_radius"] = model.spectral_radius;
    j["stationary"] = model.stationary;
    return j;
}

}  // namespace spillnet::var
