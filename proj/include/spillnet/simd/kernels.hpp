#pragma once

// Arithmetic inner loops shared by the realized-measure and FEVD code.
//
// Every kernel has a scalar reference implementation. Vector variants
// (AVX2+FMA on x86-64, NEON on AArch64) are compiled into separate
// translation units and picked at runtime from the CPU's feature bits.
// Setting SPILLNET_SIMD=scalar|avx2|neon forces a particular set, which the
// equivalence tests use to compare every available variant against scalar.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace spillnet::simd {

struct SemiSums {
    double negative = 0.0;  // sum of r^2 over r < 0
    double positive = 0.0;  // sum of r^2 over r >= 0 (NaN compares false, lands here)
};

struct KernelSet {
    std::string_view name;
    SemiSums (*semivariance)(const double* x, std::size_t n);
    double (*sum_squares)(const double* x, std::size_t n);
    // acc[i] += x[i] * x[i]
    void (*square_accumulate)(const double* x, double* acc, std::size_t n);
    double (*dot)(const double* a, const double* b, std::size_t n);
};

const KernelSet& scalar_kernels() noexcept;

/// Kernel sets usable on this machine, scalar first.
std::vector<const KernelSet*> available_kernels();

/// Kernel set selected for this process (resolved once, on first call).
const KernelSet& active_kernels();

inline SemiSums semivariance(std::span<const double> x) {
    return active_kernels().semivariance(x.data(), x.size());
}

inline double sum_squares(std::span<const double> x) {
    return active_kernels().sum_squares(x.data(), x.size());
}

inline void square_accumulate(std::span<const double> x, std::span<double> acc) {
    active_kernels().square_accumulate(x.data(), acc.data(), x.size());
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    return active_kernels().dot(a.data(), b.data(), a.size());
}

namespace detail {
// Null when the variant was not compiled for this target.
const KernelSet* avx2_kernels() noexcept;
const KernelSet* neon_kernels() noexcept;
}  // namespace detail

}  // namespace spillnet::simd
