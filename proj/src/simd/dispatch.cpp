#include "pedx/simd/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace pedx::simd {
namespace {

bool cpu_has_avx2() noexcept {
#if defined(PEDX_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Isa detect() noexcept {
    if (const char* env = std::getenv("PEDX_SIMD"); env != nullptr && std::strcmp(env, "scalar") == 0)
        return Isa::Scalar;
    return cpu_has_avx2() ? Isa::Avx2 : Isa::Scalar;
}

std::atomic<Isa>& current() {
    static std::atomic<Isa> isa{detect()};
    return isa;
}

}  // namespace

const char* isa_name(Isa isa) noexcept {
    switch (isa) {
        case Isa::Scalar: return "scalar";
        case Isa::Avx2: return "avx2";
    }
    return "unknown";
}

Isa active_isa() noexcept { return current().load(std::memory_order_relaxed); }

bool isa_available(Isa isa) noexcept { return isa == Isa::Scalar || cpu_has_avx2(); }

Isa set_isa(Isa isa) noexcept {
    if (!isa_available(isa)) return active_isa();
    return current().exchange(isa);
}

template <class T>
const KernelTable<T>& kernels(Isa isa) {
#ifdef PEDX_HAVE_AVX2
    if (isa == Isa::Avx2) return detail::avx2_table<T>();
#endif
    (void)isa;
    return detail::scalar_table<T>();
}

template const KernelTable<float>& kernels<float>(Isa);
template const KernelTable<double>& kernels<double>(Isa);

}  // namespace pedx::simd
