// Built with -mavx2 -mfma; only reached after a runtime CPU check.
#include "spillnet/simd/kernels.hpp"

#include <immintrin.h>

namespace spillnet::simd {
namespace {

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

SemiSums semivariance_avx2(const double* x, std::size_t n) {
    const __m256d zero = _mm256_setzero_pd();
    __m256d neg0 = zero, neg1 = zero, pos0 = zero, pos1 = zero;
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256d a = _mm256_loadu_pd(x + i);
        const __m256d b = _mm256_loadu_pd(x + i + 4);
        const __m256d sa = _mm256_mul_pd(a, a);
        const __m256d sb = _mm256_mul_pd(b, b);
        const __m256d ma = _mm256_cmp_pd(a, zero, _CMP_LT_OQ);
        const __m256d mb = _mm256_cmp_pd(b, zero, _CMP_LT_OQ);
        neg0 = _mm256_add_pd(neg0, _mm256_and_pd(ma, sa));
        pos0 = _mm256_add_pd(pos0, _mm256_andnot_pd(ma, sa));
        neg1 = _mm256_add_pd(neg1, _mm256_and_pd(mb, sb));
        pos1 = _mm256_add_pd(pos1, _mm256_andnot_pd(mb, sb));
    }
    for (; i + 4 <= n; i += 4) {
        const __m256d a = _mm256_loadu_pd(x + i);
        const __m256d sa = _mm256_mul_pd(a, a);
        const __m256d ma = _mm256_cmp_pd(a, zero, _CMP_LT_OQ);
        neg0 = _mm256_add_pd(neg0, _mm256_and_pd(ma, sa));
        pos0 = _mm256_add_pd(pos0, _mm256_andnot_pd(ma, sa));
    }
    SemiSums s{hsum(_mm256_add_pd(neg0, neg1)), hsum(_mm256_add_pd(pos0, pos1))};
    for (; i < n; ++i) {
        const double sq = x[i] * x[i];
        if (x[i] < 0.0) {
            s.negative += sq;
        } else {
            s.positive += sq;
        }
    }
    return s;
}

double sum_squares_avx2(const double* x, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256d a = _mm256_loadu_pd(x + i);
        const __m256d b = _mm256_loadu_pd(x + i + 4);
        acc0 = _mm256_fmadd_pd(a, a, acc0);
        acc1 = _mm256_fmadd_pd(b, b, acc1);
    }
    for (; i + 4 <= n; i += 4) {
        const __m256d a = _mm256_loadu_pd(x + i);
        acc0 = _mm256_fmadd_pd(a, a, acc0);
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += x[i] * x[i];
    return s;
}

void square_accumulate_avx2(const double* x, double* acc, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d a = _mm256_loadu_pd(x + i);
        _mm256_storeu_pd(acc + i, _mm256_fmadd_pd(a, a, _mm256_loadu_pd(acc + i)));
    }
    for (; i < n; ++i) acc[i] += x[i] * x[i];
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
    }
    double s = hsum(acc);
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

constexpr KernelSet kAvx2{"avx2", semivariance_avx2, sum_squares_avx2, square_accumulate_avx2,
                          dot_avx2};

}  // namespace

namespace detail {
const KernelSet* avx2_kernels() noexcept { return &kAvx2; }
}  // namespace detail

}  // namespace spillnet::simd
