#include "spillnet/simd/kernels.hpp"

#include <arm_neon.h>

namespace spillnet::simd {
namespace {

SemiSums semivariance_neon(const double* x, std::size_t n) {
    const float64x2_t zero = vdupq_n_f64(0.0);
    float64x2_t neg = zero, pos = zero;
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t a = vld1q_f64(x + i);
        const float64x2_t sq = vmulq_f64(a, a);
        const uint64x2_t m = vcltq_f64(a, zero);
        neg = vaddq_f64(neg, vreinterpretq_f64_u64(vandq_u64(m, vreinterpretq_u64_f64(sq))));
        pos = vaddq_f64(pos, vreinterpretq_f64_u64(vbicq_u64(vreinterpretq_u64_f64(sq), m)));
    }
    SemiSums s{vaddvq_f64(neg), vaddvq_f64(pos)};
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

double sum_squares_neon(const double* x, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t a = vld1q_f64(x + i);
        acc = vfmaq_f64(acc, a, a);
    }
    double s = vaddvq_f64(acc);
    for (; i < n; ++i) s += x[i] * x[i];
    return s;
}

void square_accumulate_neon(const double* x, double* acc, std::size_t n) {
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t a = vld1q_f64(x + i);
        vst1q_f64(acc + i, vfmaq_f64(vld1q_f64(acc + i), a, a));
    }
    for (; i < n; ++i) acc[i] += x[i] * x[i];
}

double dot_neon(const double* a, const double* b, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) acc = vfmaq_f64(acc, vld1q_f64(a + i), vld1q_f64(b + i));
    double s = vaddvq_f64(acc);
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

constexpr KernelSet kNeon{"neon", semivariance_neon, sum_squares_neon, square_accumulate_neon,
                          dot_neon};

}  // namespace

namespace detail {
const KernelSet* neon_kernels() noexcept { return &kNeon; }
}  // namespace detail

}  // namespace spillnet::simd
