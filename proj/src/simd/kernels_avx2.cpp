// Compiled with -mavx2 (no -mfma): see kernels.hpp for the bit-identity rule.
#include <immintrin.h>

#include "sdarb/simd/kernels.hpp"

namespace sdarb::simd::avx2 {

void axpy(double a, std::span<const double> x, std::span<double> y) noexcept {
    const std::size_t n = y.size();
    const double* xp = x.data();
    double* yp = y.data();
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256d y0 = _mm256_loadu_pd(yp + i);
        __m256d y1 = _mm256_loadu_pd(yp + i + 4);
        __m256d p0 = _mm256_mul_pd(va, _mm256_loadu_pd(xp + i));
        __m256d p1 = _mm256_mul_pd(va, _mm256_loadu_pd(xp + i + 4));
        _mm256_storeu_pd(yp + i, _mm256_add_pd(y0, p0));
        _mm256_storeu_pd(yp + i + 4, _mm256_add_pd(y1, p1));
    }
    for (; i + 4 <= n; i += 4) {
        __m256d p = _mm256_mul_pd(va, _mm256_loadu_pd(xp + i));
        _mm256_storeu_pd(yp + i, _mm256_add_pd(_mm256_loadu_pd(yp + i), p));
    }
    for (; i < n; ++i) {
        const double p = a * xp[i];
        yp[i] += p;
    }
}

void divide(std::span<double> y, double d) noexcept {
    const std::size_t n = y.size();
    double* yp = y.data();
    const __m256d vd = _mm256_set1_pd(d);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) _mm256_storeu_pd(yp + i, _mm256_div_pd(_mm256_loadu_pd(yp + i), vd));
    for (; i < n; ++i) yp[i] /= d;
}

double dot(std::span<const double> x, std::span<const double> y) noexcept {
    const std::size_t n = x.size();
    const double* xp = x.data();
    const double* yp = y.data();
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(xp + i), _mm256_loadu_pd(yp + i)));
        acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(_mm256_loadu_pd(xp + i + 4), _mm256_loadu_pd(yp + i + 4)));
    }
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(xp + i), _mm256_loadu_pd(yp + i)));
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, _mm256_add_pd(acc0, acc1));
    double acc = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
    for (; i < n; ++i) acc += xp[i] * yp[i];
    return acc;
}

}  // namespace sdarb::simd::avx2
