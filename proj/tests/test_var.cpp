#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "spillnet/synth.hpp"
#include "spillnet/var.hpp"

using namespace spillnet;
using namespace spillnet::var;

namespace {

VarModel model_from(const std::vector<Eigen::MatrixXd>& phi) {
    VarModel m;
    m.dim = static_cast<int>(phi.front().rows());
    m.lag_order = static_cast<int>(phi.size());
    m.phi = phi;
    m.intercept = Eigen::VectorXd::Zero(m.dim);
    m.sigma_eps = Eigen::MatrixXd::Identity(m.dim, m.dim);
    return m;
}

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_SUITE("var") {

TEST_CASE("recovers a known VAR(1)") {
    std::mt19937_64 rng(42);
    Eigen::MatrixXd phi(2, 2);
    phi << 0.5, 0.1, 0.0, 0.3;
    const auto y = synth::simulate_var({phi}, Eigen::Vector2d(0.2, -0.1), Eigen::MatrixXd::Identity(2, 2), 10000, rng);
    const auto m = fit_var(y, 1);
    CHECK(max_abs(m.phi[0] - phi) <= 0.05);
    CHECK(m.stationary);
    CHECK(m.nobs == 9999);
    CHECK(max_abs(m.sigma_eps - Eigen::MatrixXd::Identity(2, 2)) < 0.05);
    CHECK(m.sigma_eps == m.sigma_eps.transpose());
}

TEST_CASE("white noise coefficients stay within three standard errors") {
    std::mt19937_64 rng(3);
    const auto y = synth::simulate_var({Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Zero(2, 2)}, Eigen::VectorXd::Zero(2),
                                       Eigen::MatrixXd::Identity(2, 2), 1000, rng);
    const auto m = fit_var(y, 2);
    const Eigen::MatrixXd x = lagged_regressors(y, 2);
    const Eigen::MatrixXd xtx_inv = (x.transpose() * x).inverse();
    for (int eq = 0; eq < 2; ++eq) {
        for (int j = 0; j < 2; ++j) {
            for (int c = 0; c < 2; ++c) {
                const int col = 1 + j * 2 + c;
                const double se = std::sqrt(m.sigma_eps(eq, eq) * xtx_inv(col, col));
                CHECK(std::abs(m.phi[static_cast<std::size_t>(j)](eq, c)) < 3.0 * se);
            }
        }
    }
}

TEST_CASE("least squares matches the normal equations and residuals are orthogonal") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 10; ++trial) {
        const int k = 2 + trial % 4;
        const int p = 1 + trial % 3;
        const auto phi = synth::random_stable_phi(k, p, 0.8, rng);
        const auto y = synth::simulate_var(phi, Eigen::VectorXd::Ones(k), synth::random_spd(k, rng), 300, rng);
        const auto m = fit_var(y, p);

        const Eigen::MatrixXd x = lagged_regressors(y, p);
        const Eigen::MatrixXd b = (x.transpose() * x).ldlt().solve(x.transpose() * y.bottomRows(300 - p));
        CHECK(std::abs(m.intercept(0) - b(0, 0)) < 1e-8);
        for (int j = 0; j < p; ++j) CHECK(max_abs(m.phi[static_cast<std::size_t>(j)] - b.middleRows(1 + j * k, k).transpose()) < 1e-8);

        const Eigen::MatrixXd e = residuals(m, y);
        CHECK(max_abs(x.transpose() * e) / 300.0 <= 1e-8);
        const Eigen::MatrixXd s = e.transpose() * e / static_cast<double>(300 - p);
        CHECK(max_abs(s - m.sigma_eps) < 1e-12);
    }
}

TEST_CASE("fitting is deterministic") {
    std::mt19937_64 rng(1);
    const auto y = synth::simulate_var(synth::random_stable_phi(4, 2, 0.9, rng), Eigen::VectorXd::Zero(4),
                                       synth::random_spd(4, rng), 250, rng);
    const auto a = fit_var(y, 2);
    const auto b = fit_var(y, 2);
    CHECK(a.phi[0] == b.phi[0]);
    CHECK(a.phi[1] == b.phi[1]);
    CHECK(a.sigma_eps == b.sigma_eps);
    CHECK(a.intercept == b.intercept);
}

TEST_CASE("degenerate windows") {
    std::mt19937_64 rng(5);
    Eigen::MatrixXd y = synth::simulate_var({0.3 * Eigen::MatrixXd::Identity(3, 3)}, Eigen::VectorXd::Zero(3),
                                            Eigen::MatrixXd::Identity(3, 3), 100, rng);
    Eigen::MatrixXd constant = y;
    constant.col(1).setConstant(2.5);
    CHECK_THROWS_WITH_AS(fit_var(constant, 2), doctest::Contains("collinear window"), Error);

    Eigen::MatrixXd duplicate = y;
    duplicate.col(2) = duplicate.col(0);
    CHECK_THROWS_WITH_AS(fit_var(duplicate, 1), doctest::Contains("collinear window"), Error);
    const auto mn = fit_var(duplicate, 1, RankPolicy::MinimumNorm);
    CHECK(mn.phi[0].allFinite());

    CHECK_THROWS_AS(fit_var(y.topRows(7), 2), Error);  // T = 7 <= k*p + 1
    Eigen::MatrixXd nan = y;
    nan(10, 1) = std::nan("");
    CHECK_THROWS_AS(fit_var(nan, 1), Error);
    try {
        fit_var(y.topRows(5), 2);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Data);
    }
    try {
        fit_var(constant, 1);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Numerical);
    }
}

TEST_CASE("explosive fits are flagged, not rejected") {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> z(0.0, 1.0);
    Eigen::MatrixXd y(300, 2);
    Eigen::RowVector2d v(1.0, 1.0);
    for (int t = 0; t < 300; ++t) {
        v = 1.03 * v + Eigen::RowVector2d(z(rng), z(rng));
        y.row(t) = v;
    }
    const auto m = fit_var(y, 1);
    CHECK_FALSE(m.stationary);
    CHECK(m.spectral_radius >= 1.0);
}

TEST_CASE("MA coefficients") {
    std::mt19937_64 rng(11);
    const auto m1 = model_from(synth::random_stable_phi(3, 1, 0.9, rng));
    const auto one = ma_coefficients(m1, 1);
    REQUIRE(one.psi.size() == 1);
    CHECK(one.psi[0] == Eigen::MatrixXd::Identity(3, 3));

    const auto ma = ma_coefficients(m1, 21);
    Eigen::MatrixXd power = Eigen::MatrixXd::Identity(3, 3);
    for (int h = 0; h <= 20; ++h) {
        CHECK(max_abs(ma.psi[static_cast<std::size_t>(h)] - power) <= 1e-10);
        power = power * m1.phi[0];
    }
    CHECK(ma.psi[20].norm() < ma.psi[1].norm());
    CHECK_THROWS_AS(ma_coefficients(m1, 0), Error);

    // VAR(2): zero-noise propagation of a unit shock in each variable.
    const auto m2 = model_from(synth::random_stable_phi(3, 2, 0.9, rng));
    const auto ma2 = ma_coefficients(m2, 15);
    for (int shock = 0; shock < 3; ++shock) {
        std::vector<Eigen::VectorXd> y(17, Eigen::VectorXd::Zero(3));
        y[2](shock) = 1.0;
        for (int t = 3; t < 17; ++t) y[t] = m2.phi[0] * y[t - 1] + m2.phi[1] * y[t - 2];
        for (int h = 0; h < 15; ++h) CHECK((ma2.psi[static_cast<std::size_t>(h)].col(shock) - y[2 + h]).cwiseAbs().maxCoeff() <= 1e-12);
    }

    // Against the loop-level recursion.
    std::vector<oracle::Mat> phi{oracle::from_eigen(m2.phi[0]), oracle::from_eigen(m2.phi[1])};
    const auto ref = oracle::ma(phi, 3, 15);
    for (int h = 0; h < 15; ++h)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) CHECK(std::abs(ref[h][i][j] - ma2.psi[static_cast<std::size_t>(h)](i, j)) <= 1e-12);
}

TEST_CASE("AIC formula and lag selection") {
    std::mt19937_64 rng(21);
    Eigen::MatrixXd phi(2, 2);
    phi << 0.6, 0.2, 0.1, 0.5;
    const auto y = synth::simulate_var({phi}, Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Identity(2, 2), 400, rng);

    // Hand evaluation: p = 1 fitted on the last T - 3 rows with normal equations.
    const int p_max = 3;
    const Eigen::MatrixXd sub = y.bottomRows(400 - 2);
    const Eigen::MatrixXd x = lagged_regressors(sub, 1);
    const Eigen::MatrixXd yy = sub.bottomRows(sub.rows() - 1);
    const Eigen::MatrixXd b = (x.transpose() * x).ldlt().solve(x.transpose() * yy);
    const Eigen::MatrixXd e = yy - x * b;
    const double n = static_cast<double>(e.rows());
    CHECK(n == 400 - p_max);
    const double expected = std::log((e.transpose() * e / n).determinant()) + 2.0 * (4 * 1 + 2) / n;
    CHECK(aic(y, 1, p_max) == doctest::Approx(expected).epsilon(1e-10));

    CHECK(select_lag(y, 1) == 1);
    CHECK_THROWS_AS(aic(y, 4, 3), Error);

    // White noise: the smallest lag wins most often.
    int ones = 0;
    for (int rep = 0; rep < 40; ++rep) {
        const auto w = synth::simulate_var({Eigen::MatrixXd::Zero(2, 2)}, Eigen::VectorXd::Zero(2),
                                           Eigen::MatrixXd::Identity(2, 2), 500, rng);
        ones += select_lag(w, 4) == 1 ? 1 : 0;
    }
    CHECK(ones > 20);

    // A genuine VAR(2) is not mistaken for a VAR(1).
    std::vector<Eigen::MatrixXd> phi2{0.3 * Eigen::MatrixXd::Identity(2, 2), -0.5 * Eigen::MatrixXd::Identity(2, 2)};
    const auto y2 = synth::simulate_var(phi2, Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Identity(2, 2), 2000, rng);
    CHECK(select_lag(y2, 4) >= 2);
}

TEST_CASE("JSON dump") {
    std::mt19937_64 rng(4);
    const auto y = synth::simulate_var({0.4 * Eigen::MatrixXd::Identity(2, 2)}, Eigen::VectorXd::Zero(2),
                                       Eigen::MatrixXd::Identity(2, 2), 100, rng);
    const auto j = to_json(fit_var(y, 2));
    CHECK(j["lag_order"] == 2);
    CHECK(j["phi"].size() == 2);
    CHECK(j["sigma"].size() == 2);
    CHECK(j.contains("stationary"));
}

}
