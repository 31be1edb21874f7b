#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "spillnet/realized.hpp"
#include "test_util.hpp"

using namespace spillnet;
using namespace spillnet::realized;

namespace {

Date day(int n) { return Date{std::chrono::days{14000 + n}}; }

}  // namespace

TEST_SUITE("realized") {

TEST_CASE("intraday returns") {
    const std::vector<double> p{0.0, 0.01, -0.01};
    const auto r = intraday_returns(p);
    REQUIRE(r.size() == 2);
    CHECK(r[0] == doctest::Approx(0.01));
    CHECK(r[1] == doctest::Approx(-0.02));

    const std::vector<double> flat(10, 0.4);
    for (double x : intraday_returns(flat)) CHECK(x == 0.0);

    std::mt19937_64 rng(1);
    std::normal_distribution<double> z(0.0, 0.01);
    std::vector<double> walk{0.0};
    for (int i = 1; i < 100; ++i) walk.push_back(walk.back() + z(rng));
    const auto rw = intraday_returns(walk);
    double sum = 0.0;
    for (double x : rw) sum += x;
    CHECK(sum == doctest::Approx(walk.back() - walk.front()).epsilon(1e-12));

    CHECK_THROWS_AS(intraday_returns(std::vector<double>{1.0}), Error);
    CHECK_THROWS_AS(intraday_returns(std::vector<double>{}), Error);
}

TEST_CASE("realized variance and semivariances by hand") {
    const std::vector<double> r{0.01, -0.02};
    CHECK(realized_variance(r) == doctest::Approx(0.0005).epsilon(1e-14));
    const auto s = realized_semivariances(r);
    CHECK(s.rs_neg == doctest::Approx(0.0004).epsilon(1e-14));
    CHECK(s.rs_pos == doctest::Approx(0.0001).epsilon(1e-14));

    const std::vector<double> zeros(7, 0.0);
    CHECK(realized_variance(zeros) == 0.0);

    const std::vector<double> up{0.01, 0.02, 0.03};
    const auto su = realized_semivariances(up);
    CHECK(su.rs_neg == 0.0);
    CHECK(su.rs_pos == doctest::Approx(realized_variance(up)).epsilon(1e-15));

    // Zero returns count as positive.
    const std::vector<double> with_zero{0.0, -0.01};
    CHECK(realized_semivariances(with_zero).rs_pos == 0.0);

    CHECK_THROWS_AS(realized_variance(std::vector<double>{}), Error);
    CHECK_THROWS_AS(realized_semivariances(std::vector<double>{}), Error);
}

TEST_CASE("decomposition, sign flip, scale and non-negativity") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> z(0.0, 1e-3);
    std::uniform_int_distribution<int> len(1, 300);
    std::uniform_real_distribution<double> scale(0.1, 10.0);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<double> r(static_cast<std::size_t>(len(rng)));
        for (auto& x : r) x = z(rng);
        const double rv = realized_variance(r);
        const auto s = realized_semivariances(r);
        CHECK(std::abs(s.rs_neg + s.rs_pos - rv) <= 1e-12 * rv);
        CHECK(s.rs_neg >= 0.0);
        CHECK(s.rs_pos >= 0.0);

        std::vector<double> flipped(r);
        for (auto& x : flipped) x = -x;
        const auto f = realized_semivariances(flipped);
        CHECK(f.rs_neg == s.rs_pos);
        CHECK(f.rs_pos == s.rs_neg);
        CHECK(realized_variance(flipped) == rv);

        const double c = scale(rng);
        std::vector<double> scaled(r);
        for (auto& x : scaled) x *= c;
        const auto sc = realized_semivariances(scaled);
        CHECK(realized_variance(scaled) == doctest::Approx(c * c * rv).epsilon(1e-12));
        CHECK(sc.rs_neg == doctest::Approx(c * c * s.rs_neg).epsilon(1e-12));
        CHECK(sc.rs_pos == doctest::Approx(c * c * s.rs_pos).epsilon(1e-12));
    }
}

TEST_CASE("realized variance is consistent for the integrated variance") {
    const double sigma2 = 4e-5;
    const int n = 1000;
    const int reps = 10000;
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> z(0.0, std::sqrt(sigma2 / n));
    std::vector<double> r(n);
    double mean = 0.0;
    for (int rep = 0; rep < reps; ++rep) {
        for (auto& x : r) x = z(rng);
        mean += realized_variance(r);
    }
    mean /= reps;
    CHECK(std::abs(mean / sigma2 - 1.0) < 0.02);
}

TEST_CASE("panel keeps the date intersection") {
    const std::vector<std::string> ids{"A", "B"};
    std::vector<DailyMeasures> m;
    for (int t = 0; t < 5; ++t) {
        for (const auto& id : ids) {
            if (id == "A" && t == 2) continue;
            m.push_back({id, day(t), 2.0, 1.0, 1.0});
        }
    }
    const auto built = build_panel(m, ids);
    CHECK(built.panel.n_days() == 4);
    REQUIRE(built.dropped_dates.size() == 1);
    CHECK(built.dropped_dates[0] == day(2));

    std::vector<DailyMeasures> full;
    for (int t = 0; t < 5; ++t)
        for (const auto& id : ids) full.push_back({id, day(t), 2.0, 1.0, 1.0});
    CHECK(build_panel(full, ids).panel.n_days() == 5);
    CHECK(build_panel(full, ids).dropped_dates.empty());

    CHECK_THROWS_AS(build_panel(full, {"A", "C"}), Error);
    std::vector<DailyMeasures> disjoint{{"A", day(0), 1, 0.5, 0.5}, {"B", day(1), 1, 0.5, 0.5}};
    CHECK_THROWS_AS(build_panel(disjoint, ids), Error);
}

TEST_CASE("panel dates match a brute-force set intersection") {
    std::mt19937_64 rng(99);
    std::bernoulli_distribution keep(0.85);
    const std::vector<std::string> ids{"A", "B", "C"};
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<DailyMeasures> m;
        std::vector<std::set<Date>> per(3);
        for (int t = 0; t < 120; ++t) {
            for (std::size_t i = 0; i < 3; ++i) {
                if (!keep(rng)) continue;
                m.push_back({ids[i], day(t), 2.0 + i, 1.0, 1.0 + i});
                per[i].insert(day(t));
            }
        }
        std::shuffle(m.begin(), m.end(), rng);
        std::set<Date> common, any;
        for (const auto& d : per[0])
            if (per[1].count(d) && per[2].count(d)) common.insert(d);
        for (const auto& s : per) any.insert(s.begin(), s.end());
        std::vector<Date> dropped;
        for (const auto& d : any)
            if (!common.count(d)) dropped.push_back(d);

        const auto built = build_panel(m, ids);
        CHECK(built.panel.days() == std::vector<Date>(common.begin(), common.end()));
        CHECK(built.dropped_dates == dropped);
        for (std::size_t t = 0; t < built.panel.n_days(); ++t) {
            for (std::size_t i = 0; i < 3; ++i) {
                CHECK(built.panel.at(t, i).asset_id == ids[i]);
                CHECK(built.panel.at(t, i).rv == 2.0 + static_cast<double>(i));
            }
        }
    }
}

TEST_CASE("measures CSV round-trip") {
    const test::TempDir dir;
    const std::vector<std::string> ids{"AUD", "GBP"};
    std::vector<DailyMeasures> m;
    for (int t = 0; t < 3; ++t) {
        for (const auto& id : ids) m.push_back({id, day(t), 3e-5 + t * 1e-7, 1e-5 / 3.0, 3e-5 + t * 1e-7 - 1e-5 / 3.0});
    }
    const auto panel = build_panel(m, ids).panel;
    write_measures_csv(dir.path() / "m.csv", panel);
    CHECK(test::slurp(dir.path() / "m.csv").rfind("date,asset,rv,rs_neg,rs_pos\n", 0) == 0);
    const auto back = read_measures_csv(dir.path() / "m.csv");
    CHECK(back.assets == ids);
    REQUIRE(back.rows.size() == m.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
        CHECK(back.rows[i].rv == m[i].rv);
        CHECK(back.rows[i].rs_neg == m[i].rs_neg);
        CHECK(back.rows[i].trading_day == m[i].trading_day);
    }
}

}
