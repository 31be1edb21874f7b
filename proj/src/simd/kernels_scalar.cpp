#include "spillnet/simd/kernels.hpp"

namespace spillnet::simd {
namespace {

SemiSums semivariance_scalar(const double* x, std::size_t n) {
    SemiSums s;
    for (std::size_t i = 0; i < n; ++i) {
        const double sq = x[i] * x[i];
        if (x[i] < 0.0) {
            s.negative += sq;
        } else {
            s.positive += sq;
        }
    }
    return s;
}

double sum_squares_scalar(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * x[i];
    return s;
}

void square_accumulate_scalar(const double* x, double* acc, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) acc[i] += x[i] * x[i];
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

constexpr KernelSet kScalar{"scalar", semivariance_scalar, sum_squares_scalar,
                            square_accumulate_scalar, dot_scalar};

}  // namespace

const KernelSet& scalar_kernels() noexcept { return kScalar; }

}  // namespace spillnet::simd
