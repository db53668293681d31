#include <cmath>
#include <vector>

#include "doctest.h"
#include "pedx/rng.hpp"
#include "pedx/simd/kernels.hpp"

using namespace pedx;
using simd::Isa;

namespace {

template <class T>
std::vector<T> random_vec(Rng& rng, std::size_t n) {
    std::vector<T> v(n);
    for (auto& x : v) x = static_cast<T>(rng.uniform(-1.0, 1.0));
    return v;
}

template <class T>
double max_abs_diff(const std::vector<T>& a, const std::vector<T>& b) {
    double m = 0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(double(a[i]) - double(b[i])));
    return m;
}

// Scalar and vector kernels differ only by FMA contraction and summation
// order, so agreement is checked relative to the reduction length.
template <class T>
void check_equivalence(double tol_per_term) {
    if (!simd::isa_available(Isa::Avx2)) {
        MESSAGE("AVX2 unavailable; vector kernels not exercised");
        return;
    }
    const auto& ref = simd::kernels<T>(Isa::Scalar);
    const auto& vec = simd::kernels<T>(Isa::Avx2);
    Rng rng(42);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t M = 1 + rng.below(13), N = 1 + rng.below(37), K = 1 + rng.below(29);
        const double tol = tol_per_term * double(K + 1);
        {
            auto A = random_vec<T>(rng, M * K), B = random_vec<T>(rng, K * N), C0 = random_vec<T>(rng, M * N);
            auto C1 = C0;
            ref.gemm_nn(M, N, K, A.data(), K, B.data(), N, C0.data(), N);
            vec.gemm_nn(M, N, K, A.data(), K, B.data(), N, C1.data(), N);
            CHECK(max_abs_diff(C0, C1) < tol);
        }
        {
            auto A = random_vec<T>(rng, M * K), B = random_vec<T>(rng, N * K), C0 = random_vec<T>(rng, M * N);
            auto C1 = C0;
            ref.gemm_nt(M, N, K, A.data(), K, B.data(), K, C0.data(), N);
            vec.gemm_nt(M, N, K, A.data(), K, B.data(), K, C1.data(), N);
            CHECK(max_abs_diff(C0, C1) < tol);
        }
        {
            auto A = random_vec<T>(rng, K * M), B = random_vec<T>(rng, K * N), C0 = random_vec<T>(rng, M * N);
            auto C1 = C0;
            ref.gemm_tn(M, N, K, A.data(), M, B.data(), N, C0.data(), N);
            vec.gemm_tn(M, N, K, A.data(), M, B.data(), N, C1.data(), N);
            CHECK(max_abs_diff(C0, C1) < tol);
        }
        {
            const std::size_t n = rng.below(70);
            auto x = random_vec<T>(rng, n), y = random_vec<T>(rng, n);
            CHECK(std::abs(double(ref.dot(n, x.data(), y.data())) - double(vec.dot(n, x.data(), y.data()))) <
                  tol_per_term * double(n + 1));
            auto y1 = y;
            ref.axpy(n, T(0.37), x.data(), y.data());
            vec.axpy(n, T(0.37), x.data(), y1.data());
            CHECK(max_abs_diff(y, y1) < tol_per_term * 2);
        }
    }
}

}  // namespace

TEST_CASE("scalar and AVX2 kernels agree (f32)") { check_equivalence<float>(2e-6); }
TEST_CASE("scalar and AVX2 kernels agree (f64)") { check_equivalence<double>(1e-14); }

TEST_CASE("gemm against a hand example") {
    for (Isa isa : {Isa::Scalar, Isa::Avx2}) {
        if (!simd::isa_available(isa)) continue;
        const auto& k = simd::kernels<double>(isa);
        // [[1,2],[3,4]] * [[5,6],[7,8]] = [[19,22],[43,50]]
        std::vector<double> A{1, 2, 3, 4}, B{5, 6, 7, 8}, C(4, 0.0);
        k.gemm_nn(2, 2, 2, A.data(), 2, B.data(), 2, C.data(), 2);
        CHECK(C == std::vector<double>{19, 22, 43, 50});
        std::fill(C.begin(), C.end(), 0.0);
        k.gemm_nt(2, 2, 2, A.data(), 2, B.data(), 2, C.data(), 2);  // A * B^T
        CHECK(C == std::vector<double>{17, 23, 39, 53});
        std::fill(C.begin(), C.end(), 0.0);
        k.gemm_tn(2, 2, 2, A.data(), 2, B.data(), 2, C.data(), 2);  // A^T * B
        CHECK(C == std::vector<double>{26, 30, 38, 44});
    }
}

TEST_CASE("isa selection round-trips") {
    const Isa before = simd::active_isa();
    simd::set_isa(Isa::Scalar);
    CHECK(simd::active_isa() == Isa::Scalar);
    simd::set_isa(before);
    CHECK(simd::active_isa() == before);
}
