// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include "pedx/simd/kernels.hpp"

#include <immintrin.h>

namespace pedx::simd::detail {
namespace {

template <class T>
struct Vec;

template <>
struct Vec<float> {
    using reg = __m256;
    static constexpr std::size_t width = 8;
    static reg zero() { return _mm256_setzero_ps(); }
    static reg set1(float a) { return _mm256_set1_ps(a); }
    static reg load(const float* p) { return _mm256_loadu_ps(p); }
    static void store(float* p, reg v) { _mm256_storeu_ps(p, v); }
    static reg fmadd(reg a, reg b, reg c) { return _mm256_fmadd_ps(a, b, c); }
    static float hsum(reg v) {
        __m128 lo = _mm256_castps256_ps128(v);
        __m128 hi = _mm256_extractf128_ps(v, 1);
        lo = _mm_add_ps(lo, hi);
        __m128 shuf = _mm_movehdup_ps(lo);
        __m128 sums = _mm_add_ps(lo, shuf);
        shuf = _mm_movehl_ps(shuf, sums);
        sums = _mm_add_ss(sums, shuf);
        return _mm_cvtss_f32(sums);
    }
};

template <>
struct Vec<double> {
    using reg = __m256d;
    static constexpr std::size_t width = 4;
    static reg zero() { return _mm256_setzero_pd(); }
    static reg set1(double a) { return _mm256_set1_pd(a); }
    static reg load(const double* p) { return _mm256_loadu_pd(p); }
    static void store(double* p, reg v) { _mm256_storeu_pd(p, v); }
    static reg fmadd(reg a, reg b, reg c) { return _mm256_fmadd_pd(a, b, c); }
    static double hsum(reg v) {
        __m128d lo = _mm256_castpd256_pd128(v);
        __m128d hi = _mm256_extractf128_pd(v, 1);
        lo = _mm_add_pd(lo, hi);
        __m128d h = _mm_unpackhi_pd(lo, lo);
        return _mm_cvtsd_f64(_mm_add_sd(lo, h));
    }
};

template <class T>
void axpy(std::size_t n, T a, const T* x, T* y) {
    using V = Vec<T>;
    const auto va = V::set1(a);
    std::size_t i = 0;
    for (; i + 2 * V::width <= n; i += 2 * V::width) {
        V::store(y + i, V::fmadd(va, V::load(x + i), V::load(y + i)));
        V::store(y + i + V::width, V::fmadd(va, V::load(x + i + V::width), V::load(y + i + V::width)));
    }
    for (; i + V::width <= n; i += V::width) V::store(y + i, V::fmadd(va, V::load(x + i), V::load(y + i)));
    for (; i < n; ++i) y[i] += a * x[i];
}

template <class T>
T dot(std::size_t n, const T* x, const T* y) {
    using V = Vec<T>;
    auto acc0 = V::zero();
    auto acc1 = V::zero();
    std::size_t i = 0;
    for (; i + 2 * V::width <= n; i += 2 * V::width) {
        acc0 = V::fmadd(V::load(x + i), V::load(y + i), acc0);
        acc1 = V::fmadd(V::load(x + i + V::width), V::load(y + i + V::width), acc1);
    }
    for (; i + V::width <= n; i += V::width) acc0 = V::fmadd(V::load(x + i), V::load(y + i), acc0);
    T acc = V::hsum(acc0) + V::hsum(acc1);
    for (; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

// Four rows of C at a time so each B row is loaded once per block.
template <class T>
void gemm_nn(std::size_t M, std::size_t N, std::size_t K, const T* A, std::size_t lda, const T* B,
             std::size_t ldb, T* C, std::size_t ldc) {
    using V = Vec<T>;
    std::size_t i = 0;
    for (; i + 4 <= M; i += 4) {
        T* c0 = C + i * ldc;
        T* c1 = c0 + ldc;
        T* c2 = c1 + ldc;
        T* c3 = c2 + ldc;
        const T* a0 = A + i * lda;
        const T* a1 = a0 + lda;
        const T* a2 = a1 + lda;
        const T* a3 = a2 + lda;
        std::size_t j = 0;
        for (; j + V::width <= N; j += V::width) {
            auto r0 = V::load(c0 + j), r1 = V::load(c1 + j), r2 = V::load(c2 + j), r3 = V::load(c3 + j);
            for (std::size_t k = 0; k < K; ++k) {
                const auto b = V::load(B + k * ldb + j);
                r0 = V::fmadd(V::set1(a0[k]), b, r0);
                r1 = V::fmadd(V::set1(a1[k]), b, r1);
                r2 = V::fmadd(V::set1(a2[k]), b, r2);
                r3 = V::fmadd(V::set1(a3[k]), b, r3);
            }
            V::store(c0 + j, r0);
            V::store(c1 + j, r1);
            V::store(c2 + j, r2);
            V::store(c3 + j, r3);
        }
        for (; j < N; ++j) {
            T s0 = 0, s1 = 0, s2 = 0, s3 = 0;
            for (std::size_t k = 0; k < K; ++k) {
                const T b = B[k * ldb + j];
                s0 += a0[k] * b;
                s1 += a1[k] * b;
                s2 += a2[k] * b;
                s3 += a3[k] * b;
            }
            c0[j] += s0;
            c1[j] += s1;
            c2[j] += s2;
            c3[j] += s3;
        }
    }
    for (; i < M; ++i) {
        T* c = C + i * ldc;
        for (std::size_t k = 0; k < K; ++k) axpy<T>(N, A[i * lda + k], B + k * ldb, c);
    }
}

template <class T>
void gemm_nt(std::size_t M, std::size_t N, std::size_t K, const T* A, std::size_t lda, const T* B,
             std::size_t ldb, T* C, std::size_t ldc) {
    for (std::size_t i = 0; i < M; ++i)
        for (std::size_t j = 0; j < N; ++j) C[i * ldc + j] += dot<T>(K, A + i * lda, B + j * ldb);
}

template <class T>
void gemm_tn(std::size_t M, std::size_t N, std::size_t K, const T* A, std::size_t lda, const T* B,
             std::size_t ldb, T* C, std::size_t ldc) {
    for (std::size_t k = 0; k < K; ++k) {
        const T* b = B + k * ldb;
        for (std::size_t i = 0; i < M; ++i) axpy<T>(N, A[k * lda + i], b, C + i * ldc);
    }
}

}  // namespace

template <class T>
const KernelTable<T>& avx2_table() {
    static const KernelTable<T> table{&gemm_nn<T>, &gemm_nt<T>, &gemm_tn<T>, &dot<T>, &axpy<T>};
    return table;
}

template const KernelTable<float>& avx2_table<float>();
template const KernelTable<double>& avx2_table<double>();

}  // namespace pedx::simd::detail
