#include <cstdlib>
#include <string>

#include <spdlog/spdlog.h>

#include "spillnet/simd/kernels.hpp"

namespace spillnet::simd {

namespace detail {
#ifndef SPILLNET_HAVE_AVX2
const KernelSet* avx2_kernels() noexcept { return nullptr; }
#endif
#ifndef SPILLNET_HAVE_NEON
const KernelSet* neon_kernels() noexcept { return nullptr; }
#endif
}  // namespace detail

namespace {

bool cpu_has_avx2() noexcept {
#if defined(SPILLNET_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const KernelSet& resolve() {
    const auto sets = available_kernels();
    if (const char* forced = std::getenv("SPILLNET_SIMD"); forced != nullptr && *forced != '\0') {
        for (const KernelSet* k : sets) {
            if (k->name == forced) return *k;
        }
        spdlog::warn("SPILLNET_SIMD={} not available here; using {}", forced, sets.back()->name);
    }
    return *sets.back();
}

}  // namespace

std::vector<const KernelSet*> available_kernels() {
    std::vector<const KernelSet*> out{&scalar_kernels()};
    if (const KernelSet* k = detail::avx2_kernels(); k != nullptr && cpu_has_avx2()) out.push_back(k);
    // NEON is architecturally guaranteed on AArch64.
    if (const KernelSet* k = detail::neon_kernels(); k != nullptr) out.push_back(k);
    return out;
}

const KernelSet& active_kernels() {
    static const KernelSet& selected = resolve();
    return selected;
}

}  // namespace spillnet::simd
