#include "spillnet/synth.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "spillnet/var.hpp"

namespace spillnet::synth {

namespace {

Eigen::VectorXd standard_normal(Eigen::Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> z(0.0, 1.0);
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = z(rng);
    return v;
}

}  // namespace

Eigen::MatrixXd simulate_var(const std::vector<Eigen::MatrixXd>& phi, const Eigen::VectorXd& intercept,
                             const Eigen::MatrixXd& sigma, int T, std::mt19937_64& rng, int burn_in) {
    const Eigen::Index k = sigma.rows();
    const int p = static_cast<int>(phi.size());
    const Eigen::MatrixXd chol = sigma.llt().matrixL();
    const int total = T + burn_in;
    Eigen::MatrixXd y = Eigen::MatrixXd::Zero(total + p, k);
    for (int t = p; t < total + p; ++t) {
        Eigen::VectorXd v = intercept + chol * standard_normal(k, rng);
        for (int j = 0; j < p; ++j) v.noalias() += phi[static_cast<std::size_t>(j)] * y.row(t - j - 1).transpose();
        y.row(t) = v.transpose();
    }
    return y.bottomRows(T);
}

std::vector<Eigen::MatrixXd> random_stable_phi(int k, int p, double radius, std::mt19937_64& rng) {
    std::vector<Eigen::MatrixXd> phi;
    for (int j = 0; j < p; ++j) {
        Eigen::MatrixXd m(k, k);
        for (int c = 0; c < k; ++c) m.col(c) = standard_normal(k, rng);
        phi.push_back(m / std::sqrt(static_cast<double>(k * p)));
    }
    var::VarModel model;
    model.dim = k;
    model.lag_order = p;
    model.phi = phi;
    Eigen::EigenSolver<Eigen::MatrixXd> es(var::companion_matrix(model), false);
    const double rho = es.eigenvalues().cwiseAbs().maxCoeff();
    const double c = radius / rho;
    double factor = 1.0;
    for (auto& m : phi) {
        factor *= c;
        m *= factor;
    }
    return phi;
}

Eigen::MatrixXd random_spd(int k, std::mt19937_64& rng) {
    Eigen::MatrixXd a(k, k);
    for (int c = 0; c < k; ++c) a.col(c) = standard_normal(k, rng);
    return a * a.transpose() / k + 0.5 * Eigen::MatrixXd::Identity(k, k);
}

std::vector<Date> business_days(Date first, int count) {
    std::vector<Date> out;
    for (Date d = first; static_cast<int>(out.size()) < count; d += std::chrono::days{1}) {
        const std::chrono::weekday wd{d};
        if (wd != std::chrono::Saturday && wd != std::chrono::Sunday) out.push_back(d);
    }
    return out;
}

realized::MeasurePanel synthetic_measures(const std::vector<std::string>& assets, int n_days,
                                          std::uint64_t seed, Date first_day) {
    const int n = static_cast<int>(assets.size());
    const int k = 2 * n;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 0.08);

    // Columns 0..n-1 positive, n..2n-1 negative log semivariances.
    Eigen::MatrixXd phi = 0.45 * Eigen::MatrixXd::Identity(k, k);
    for (int r = 0; r < k; ++r) {
        for (int c = 0; c < k; ++c) {
            if (r != c) phi(r, c) = u(rng) / n;
        }
    }
    Eigen::VectorXd load(k);
    for (int i = 0; i < n; ++i) {
        load(i) = 0.3;
        load(i + n) = 0.6;
    }
    Eigen::MatrixXd sigma = load * load.transpose() + 0.25 * Eigen::MatrixXd::Identity(k, k);
    for (int i = 0; i < n; ++i) {
        sigma(i, i + n) += 0.1;
        sigma(i + n, i) += 0.1;
    }
    const Eigen::MatrixXd logs = simulate_var({phi}, Eigen::VectorXd::Zero(k), sigma, n_days, rng);

    const auto days = business_days(first_day, n_days);
    std::vector<realized::DailyMeasures> values;
    values.reserve(static_cast<std::size_t>(n_days * n));
    for (int t = 0; t < n_days; ++t) {
        for (int i = 0; i < n; ++i) {
            const double pos = 1e-5 * std::exp(logs(t, i));
            const double neg = 1e-5 * std::exp(logs(t, i + n));
            values.push_back({assets[static_cast<std::size_t>(i)], days[static_cast<std::size_t>(t)], pos + neg,
                              neg, pos});
        }
    }
    return realized::MeasurePanel(assets, days, std::move(values));
}

ingest::TickSeries synthetic_ticks(const std::string& asset_id, const std::vector<Date>& days,
                                   const ingest::SessionCalendar& cal, int ticks_per_day, double daily_vol,
                                   std::uint64_t seed) {
    using namespace std::chrono;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z(0.0, 1.0);
    std::lognormal_distribution<double> vol_scale(0.0, 0.4);
    const auto length_ms = duration_cast<milliseconds>(cal.session_length()).count();
    std::uniform_int_distribution<long> offset(1, length_ms - 1);

    std::vector<ingest::Tick> ticks;
    double log_price = 0.0;
    for (const Date d : days) {
        if (cal.is_excluded(d)) continue;
        const LocalTime open = cal.session_open(d);
        std::vector<long> offsets{0};
        for (int i = 1; i < ticks_per_day; ++i) offsets.push_back(offset(rng));
        std::sort(offsets.begin(), offsets.end());
        const double step = daily_vol * vol_scale(rng) / std::sqrt(static_cast<double>(ticks_per_day));
        for (long off : offsets) {
            log_price += step * z(rng);
            ticks.push_back({open + milliseconds{off}, std::exp(log_price)});
        }
    }
    return ingest::TickSeries(asset_id, std::move(ticks));
}

}  // namespace spillnet::synth
