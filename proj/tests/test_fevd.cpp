#include <doctest.h>

#include <numeric>
#include <random>

#include "oracles.hpp"
#include "spillnet/fevd.hpp"
#include "spillnet/synth.hpp"
#include "test_util.hpp"

using namespace spillnet;
using namespace spillnet::fevd;

namespace {

var::VarModel make_model(const std::vector<Eigen::MatrixXd>& phi, const Eigen::MatrixXd& sigma) {
    var::VarModel m;
    m.dim = static_cast<int>(sigma.rows());
    m.lag_order = static_cast<int>(phi.size());
    m.phi = phi;
    m.intercept = Eigen::VectorXd::Zero(m.dim);
    m.sigma_eps = sigma;
    return m;
}

std::vector<oracle::Mat> to_oracle(const std::vector<Eigen::MatrixXd>& phi) {
    std::vector<oracle::Mat> out;
    for (const auto& m : phi) out.push_back(oracle::from_eigen(m));
    return out;
}

}  // namespace

TEST_SUITE("fevd") {

TEST_CASE("static orthogonal system is the identity decomposition") {
    for (int H : {1, 5, 10}) {
        const auto f = gfevd(make_model({Eigen::MatrixXd::Zero(3, 3)}, Eigen::MatrixXd::Identity(3, 3)), H);
        CHECK(f.raw == Eigen::MatrixXd::Identity(3, 3));
        CHECK(f.normalized == Eigen::MatrixXd::Identity(3, 3));
    }
    Eigen::MatrixXd diag = Eigen::Vector3d(0.5, 2.0, 7.0).asDiagonal();
    const auto f = gfevd(make_model({Eigen::MatrixXd::Zero(3, 3)}, diag), 4);
    CHECK((f.normalized - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("two-variable hand example") {
    Eigen::MatrixXd sigma(2, 2);
    sigma << 1.0, 0.5, 0.5, 1.0;
    const auto f = gfevd(make_model({Eigen::MatrixXd::Zero(2, 2)}, sigma), 1);
    Eigen::MatrixXd raw(2, 2), norm(2, 2);
    raw << 1.0, 0.25, 0.25, 1.0;
    norm << 0.8, 0.2, 0.2, 0.8;
    CHECK((f.raw - raw).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((f.normalized - norm).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("sigma_jj is the variance, not the standard deviation") {
    // With unequal variances the two readings give different answers.
    Eigen::MatrixXd sigma(2, 2);
    sigma << 4.0, 1.0, 1.0, 1.0;
    const auto f = gfevd(make_model({Eigen::MatrixXd::Zero(2, 2)}, sigma), 1);
    // raw(0,1) = sigma_01^2 / sigma_11 / sigma_00 = 1 / 1 / 4
    CHECK(f.raw(0, 1) == doctest::Approx(0.25).epsilon(1e-14));
    // raw(1,0) = sigma_10^2 / sigma_00 / sigma_11 = 1 / 4 / 1
    CHECK(f.raw(1, 0) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(f.raw(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("matches the loop-level oracle") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 30; ++trial) {
        const int k = 2 + trial % 5;
        const int p = 1 + trial % 2;
        const auto phi = synth::random_stable_phi(k, p, 0.95, rng);
        const auto sigma = synth::random_spd(k, rng);
        const auto f = gfevd(make_model(phi, sigma), 10);
        const auto ref = oracle::gfevd(to_oracle(phi), oracle::from_eigen(sigma), 10);
        double diff = 0.0;
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) diff = std::max(diff, std::abs(ref[i][j] - f.normalized(i, j)));
        CHECK(diff <= 1e-10);
    }
}

TEST_CASE("rows sum to one and the grand sum is k") {
    std::mt19937_64 rng(5);
    const auto phi = synth::random_stable_phi(6, 2, 0.9, rng);
    const auto f = gfevd(make_model(phi, synth::random_spd(6, rng)), 10);
    for (int i = 0; i < 6; ++i) CHECK(f.normalized.row(i).sum() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(f.normalized.sum() == doctest::Approx(6.0).epsilon(1e-13));
    CHECK(f.normalized.minCoeff() >= 0.0);
}

TEST_CASE("permuting variables permutes the decomposition") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 10; ++trial) {
        const int k = 5;
        const auto phi = synth::random_stable_phi(k, 2, 0.9, rng);
        const auto sigma = synth::random_spd(k, rng);
        std::vector<int> perm(k);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        Eigen::PermutationMatrix<Eigen::Dynamic> P(k);
        for (int i = 0; i < k; ++i) P.indices()(i) = perm[static_cast<std::size_t>(i)];
        std::vector<Eigen::MatrixXd> phi_p;
        for (const auto& m : phi) phi_p.push_back(P * m * P.transpose());
        const Eigen::MatrixXd sigma_p = P * sigma * P.transpose();
        const auto f = gfevd(make_model(phi, sigma), 10);
        const auto fp = gfevd(make_model(phi_p, sigma_p), 10);
        CHECK((P * f.normalized * P.transpose() - fp.normalized).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("longer horizons keep entries non-negative and denominators non-decreasing") {
    std::mt19937_64 rng(13);
    const auto phi = synth::random_stable_phi(4, 2, 0.95, rng);
    const auto sigma = synth::random_spd(4, rng);
    const auto m = make_model(phi, sigma);
    const auto ma = var::ma_coefficients(m, 30);
    Eigen::VectorXd prev = Eigen::VectorXd::Zero(4);
    for (int H = 1; H <= 30; ++H) {
        const auto f = gfevd(ma, sigma, H);
        CHECK(f.raw.minCoeff() >= 0.0);
        CHECK(f.normalized.minCoeff() >= 0.0);
        Eigen::VectorXd den = Eigen::VectorXd::Zero(4);
        for (int h = 0; h < H; ++h) den += (ma.psi[static_cast<std::size_t>(h)] * sigma * ma.psi[static_cast<std::size_t>(h)].transpose()).diagonal();
        CHECK((den - prev).minCoeff() >= 0.0);
        prev = den;
    }
}

TEST_CASE("errors") {
    Eigen::MatrixXd sigma = Eigen::MatrixXd::Identity(2, 2);
    sigma(1, 1) = 0.0;
    CHECK_THROWS_WITH_AS(gfevd(make_model({Eigen::MatrixXd::Zero(2, 2)}, sigma), 3, {"AUD", "GBP"}),
                         doctest::Contains("GBP"), Error);
    const auto ma = var::ma_coefficients(make_model({Eigen::MatrixXd::Zero(2, 2)}, Eigen::MatrixXd::Identity(2, 2)), 2);
    CHECK_THROWS_AS(gfevd(ma, Eigen::MatrixXd::Identity(2, 2), 3), Error);
    CHECK_THROWS_AS(gfevd(ma, Eigen::MatrixXd::Identity(2, 2), 0), Error);
}

TEST_CASE("CSV output") {
    const test::TempDir dir;
    Eigen::MatrixXd sigma(2, 2);
    sigma << 1.0, 0.5, 0.5, 1.0;
    const auto f = gfevd(make_model({Eigen::MatrixXd::Zero(2, 2)}, sigma), 1);
    write_fevd_csv(dir.path() / "f.csv", f, {"A", "B"});
    const auto text = test::slurp(dir.path() / "f.csv");
    CHECK(text.rfind("variable,A,B\nA,", 0) == 0);
    CHECK(test::count_lines(dir.path() / "f.csv") == 3);
}

}
