#pragma once

// Slow, loop-level reference implementations used as test oracles. Nothing in
// here calls into the library's numerical code.

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Mat = std::vector<std::vector<double>>;

inline Mat zeros(int r, int c) { return Mat(static_cast<std::size_t>(r), std::vector<double>(static_cast<std::size_t>(c), 0.0)); }

inline Mat from_eigen(const Eigen::MatrixXd& m) {
    Mat out = zeros(static_cast<int>(m.rows()), static_cast<int>(m.cols()));
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) out[i][j] = m(i, j);
    return out;
}

inline Mat matmul(const Mat& a, const Mat& b) {
    const std::size_t n = a.size(), m = b[0].size(), inner = b.size();
    Mat c = zeros(static_cast<int>(n), static_cast<int>(m));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t l = 0; l < inner; ++l) c[i][j] += a[i][l] * b[l][j];
    return c;
}

/// Psi_0..Psi_{H-1} by the recursion Psi_i = sum_j Phi_j Psi_{i-j}, spelled out.
inline std::vector<Mat> ma(const std::vector<Mat>& phi, int k, int H) {
    std::vector<Mat> psi;
    Mat id = zeros(k, k);
    for (int i = 0; i < k; ++i) id[i][i] = 1.0;
    psi.push_back(id);
    for (int h = 1; h < H; ++h) {
        Mat acc = zeros(k, k);
        for (int j = 1; j <= static_cast<int>(phi.size()) && j <= h; ++j) {
            const Mat term = matmul(phi[j - 1], psi[h - j]);
            for (int r = 0; r < k; ++r)
                for (int c = 0; c < k; ++c) acc[r][c] += term[r][c];
        }
        psi.push_back(acc);
    }
    return psi;
}

/// Normalized generalized FEVD with every inner product written as a loop:
/// num(i,j) = sum_h (sum_l psi_h(i,l) sigma(l,j))^2 / sigma(j,j)
/// den(i)   = sum_h sum_l sum_m psi_h(i,l) sigma(l,m) psi_h(i,m)
inline Mat gfevd(const std::vector<Mat>& phi, const Mat& sigma, int H) {
    const int k = static_cast<int>(sigma.size());
    const auto psi = ma(phi, k, H);
    Mat raw = zeros(k, k);
    for (int i = 0; i < k; ++i) {
        double den = 0.0;
        for (int h = 0; h < H; ++h)
            for (int l = 0; l < k; ++l)
                for (int m = 0; m < k; ++m) den += psi[h][i][l] * sigma[l][m] * psi[h][i][m];
        for (int j = 0; j < k; ++j) {
            double num = 0.0;
            for (int h = 0; h < H; ++h) {
                double e = 0.0;
                for (int l = 0; l < k; ++l) e += psi[h][i][l] * sigma[l][j];
                num += e * e;
            }
            raw[i][j] = num / sigma[j][j] / den;
        }
    }
    for (int i = 0; i < k; ++i) {
        double s = 0.0;
        for (int j = 0; j < k; ++j) s += raw[i][j];
        for (int j = 0; j < k; ++j) raw[i][j] /= s;
    }
    return raw;
}

/// Rows counted in the signed TO of column `col` for N = 2, listed by hand
/// from the bold cells of the 4 x 4 layout (own share and the matching
/// cross-sign entry left out).
inline std::vector<int> table1_rows_n2(int col) {
    static const std::vector<int> rows[4] = {{1, 3}, {0, 2}, {1, 3}, {0, 2}};
    return rows[col];
}

/// Random row-stochastic matrix with positive entries.
inline Eigen::MatrixXd random_stochastic(int k, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.01, 1.0);
    Eigen::MatrixXd m(k, k);
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) m(i, j) = u(rng);
        m.row(i) /= m.row(i).sum();
    }
    return m;
}

}  // namespace oracle
