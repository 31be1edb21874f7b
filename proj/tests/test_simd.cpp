#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "spillnet/simd/kernels.hpp"

using namespace spillnet::simd;

namespace {

std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> z(0.0, 1e-3);
    std::bernoulli_distribution zero(0.1);
    std::vector<double> v(n);
    for (auto& x : v) x = zero(rng) ? 0.0 : z(rng);
    return v;
}

bool close(double a, double b, double rel) { return std::abs(a - b) <= rel * std::max({std::abs(a), std::abs(b), 1e-300}); }

}  // namespace

TEST_SUITE("simd") {

TEST_CASE("scalar set is always first") {
    const auto sets = available_kernels();
    REQUIRE(!sets.empty());
    CHECK(sets.front() == &scalar_kernels());
    CHECK(sets.front()->name == "scalar");
    bool found = false;
    for (const auto* s : sets) found = found || s == &active_kernels();
    CHECK(found);
    MESSAGE("active kernels: " << active_kernels().name);
}

TEST_CASE("scalar reference on small inputs") {
    const auto& k = scalar_kernels();
    const double x[] = {0.01, -0.02, 0.0, -0.0};
    const auto s = k.semivariance(x, 4);
    CHECK(s.negative == doctest::Approx(0.0004).epsilon(1e-15));
    CHECK(s.positive == doctest::Approx(0.0001).epsilon(1e-15));
    CHECK(k.sum_squares(x, 2) == doctest::Approx(0.0005).epsilon(1e-15));
    CHECK(k.semivariance(x, 0).negative == 0.0);
    const double y[] = {1.0, 2.0, 3.0};
    CHECK(k.dot(x, y, 3) == doctest::Approx(-0.03).epsilon(1e-15));
    double acc[] = {1.0, 1.0, 1.0};
    k.square_accumulate(y, acc, 3);
    CHECK(acc[0] == 2.0);
    CHECK(acc[1] == 5.0);
    CHECK(acc[2] == 10.0);
}

TEST_CASE("every variant matches scalar on every length and offset") {
    const auto& ref = scalar_kernels();
    std::mt19937_64 rng(11);
    for (const auto* set : available_kernels()) {
        CAPTURE(set->name);
        for (std::size_t n = 0; n <= 67; ++n) {
            for (std::size_t offset = 0; offset < 3; ++offset) {
                const auto a = random_vector(n + offset, rng);
                const auto b = random_vector(n + offset, rng);
                const double* pa = a.data() + offset;
                const double* pb = b.data() + offset;

                const auto s0 = ref.semivariance(pa, n);
                const auto s1 = set->semivariance(pa, n);
                CHECK(close(s0.negative, s1.negative, 1e-13));
                CHECK(close(s0.positive, s1.positive, 1e-13));
                CHECK(close(ref.sum_squares(pa, n), set->sum_squares(pa, n), 1e-13));
                CHECK(close(ref.dot(pa, pb, n), set->dot(pa, pb, n), 1e-12));

                std::vector<double> acc0(b.begin() + static_cast<long>(offset), b.end());
                std::vector<double> acc1 = acc0;
                ref.square_accumulate(pa, acc0.data(), n);
                set->square_accumulate(pa, acc1.data(), n);
                for (std::size_t i = 0; i < n; ++i) CHECK(close(acc0[i], acc1[i], 1e-15));
            }
        }
    }
}

TEST_CASE("signed zero and sign flip") {
    for (const auto* set : available_kernels()) {
        CAPTURE(set->name);
        std::vector<double> z(9, -0.0);
        const auto s = set->semivariance(z.data(), z.size());
        CHECK(s.negative == 0.0);
        CHECK(s.positive == 0.0);

        std::mt19937_64 rng(3);
        std::normal_distribution<double> d(0.0, 1.0);
        std::vector<double> x(37), y(37);
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] = d(rng);
            y[i] = -x[i];
        }
        const auto sx = set->semivariance(x.data(), x.size());
        const auto sy = set->semivariance(y.data(), y.size());
        CHECK(sx.negative == sy.positive);
        CHECK(sx.positive == sy.negative);
    }
}

}
