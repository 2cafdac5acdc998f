#include "schro/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>
#define SCHRO_X86 1
#endif

namespace schro::kernels::detail {

#ifdef SCHRO_X86

namespace {

__attribute__((target("avx2,fma"))) inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

}  // namespace

__attribute__((target("avx2,fma"))) double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4) acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    double sum = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) sum += a[i] * b[i];
    return sum;
}

__attribute__((target("avx2,fma"))) double weighted_dot_avx2(const double* a, const double* b, const double* w,
                                                           std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256d p0 = _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        __m256d p1 = _mm256_mul_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4));
        acc0 = _mm256_fmadd_pd(p0, _mm256_loadu_pd(w + i), acc0);
        acc1 = _mm256_fmadd_pd(p1, _mm256_loadu_pd(w + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4) {
        __m256d p0 = _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc0 = _mm256_fmadd_pd(p0, _mm256_loadu_pd(w + i), acc0);
    }
    double sum = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) sum += a[i] * b[i] * w[i];
    return sum;
}

__attribute__((target("avx2,fma"))) double weighted_sum_avx2(const double* a, const double* w, std::size_t n) {
    return dot_avx2(a, w, n);
}

__attribute__((target("avx2,fma"))) void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

__attribute__((target("avx2,fma"))) void csr_matvec_avx2(const std::int32_t* offsets, const std::int32_t* indices,
                                                       const double* values, std::size_t rows, const double* x,
                                                       double* y) {
    for (std::size_t r = 0; r < rows; ++r) {
        std::int32_t p = offsets[r];
        const std::int32_t end = offsets[r + 1];
        __m256d acc = _mm256_setzero_pd();
        for (; p + 4 <= end; p += 4) {
            __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(indices + p));
            __m256d xv = _mm256_i32gather_pd(x, idx, 8);
            acc = _mm256_fmadd_pd(_mm256_loadu_pd(values + p), xv, acc);
        }
        double sum = hsum(acc);
        for (; p < end; ++p) sum += values[p] * x[indices[p]];
        y[r] = sum;
    }
}

#else

double dot_avx2(const double* a, const double* b, std::size_t n) { return dot_scalar(a, b, n); }
double weighted_dot_avx2(const double* a, const double* b, const double* w, std::size_t n) {
    return weighted_dot_scalar(a, b, w, n);
}
double weighted_sum_avx2(const double* a, const double* w, std::size_t n) { return weighted_sum_scalar(a, w, n); }
void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) { axpy_scalar(alpha, x, y, n); }
void csr_matvec_avx2(const std::int32_t* offsets, const std::int32_t* indices, const double* values,
                     std::size_t rows, const double* x, double* y) {
    csr_matvec_scalar(offsets, indices, values, rows, x, y);
}

#endif

}  // namespace schro::kernels::detail
