#pragma once

#include <cstddef>

// Dense inner-loop kernels. Every kernel has a scalar reference version and,
// on x86-64, an AVX2+FMA version; the active table is picked once at runtime.
// All matrices are row-major with explicit leading dimensions.
namespace pedx::simd {

enum class Isa { Scalar, Avx2 };

const char* isa_name(Isa isa) noexcept;

// ISA used by the free functions below. Defaults to the best the CPU supports
// unless the environment variable PEDX_SIMD=scalar is set.
Isa active_isa() noexcept;
bool isa_available(Isa isa) noexcept;
// Returns the previously active ISA. Requesting an unavailable ISA is ignored.
Isa set_isa(Isa isa) noexcept;

template <class T>
struct KernelTable {
    // C[M,N] += A[M,K] * B[K,N]
    void (*gemm_nn)(std::size_t M, std::size_t N, std::size_t K, const T* A, std::size_t lda,
                    const T* B, std::size_t ldb, T* C, std::size_t ldc);
    // C[M,N] += A[M,K] * B[N,K]^T
    void (*gemm_nt)(std::size_t M, std::size_t N, std::size_t K, const T* A, std::size_t lda,
                    const T* B, std::size_t ldb, T* C, std::size_t ldc);
    // C[M,N] += A[K,M]^T * B[K,N]
    void (*gemm_tn)(std::size_t M, std::size_t N, std::size_t K, const T* A, std::size_t lda,
                    const T* B, std::size_t ldb, T* C, std::size_t ldc);
    T (*dot)(std::size_t n, const T* x, const T* y);
    // y += a * x
    void (*axpy)(std::size_t n, T a, const T* x, T* y);
};

template <class T>
const KernelTable<T>& kernels(Isa isa);

template <class T>
const KernelTable<T>& kernels() {
    return kernels<T>(active_isa());
}

template <class T>
inline void gemm_nn(std::size_t M, std::size_t N, std::size_t K, const T* A, std::size_t lda,
                    const T* B, std::size_t ldb, T* C, std::size_t ldc) {
    kernels<T>().gemm_nn(M, N, K, A, lda, B, ldb, C, ldc);
}
template <class T>
inline void gemm_nt(std::size_t M, std::size_t N, std::size_t K, const T* A, std::size_t lda,
                    const T* B, std::size_t ldb, T* C, std::size_t ldc) {
    kernels<T>().gemm_nt(M, N, K, A, lda, B, ldb, C, ldc);
}
template <class T>
inline void gemm_tn(std::size_t M, std::size_t N, std::size_t K, const T* A, std::size_t lda,
                    const T* B, std::size_t ldb, T* C, std::size_t ldc) {
    kernels<T>().gemm_tn(M, N, K, A, lda, B, ldb, C, ldc);
}
template <class T>
inline T dot(std::size_t n, const T* x, const T* y) {
    return kernels<T>().dot(n, x, y);
}
template <class T>
inline void axpy(std::size_t n, T a, const T* x, T* y) {
    kernels<T>().axpy(n, a, x, y);
}

namespace detail {
template <class T>
const KernelTable<T>& scalar_table();
#ifdef PEDX_HAVE_AVX2
template <class T>
const KernelTable<T>& avx2_table();
#endif
}  // namespace detail

}  // namespace pedx::simd
