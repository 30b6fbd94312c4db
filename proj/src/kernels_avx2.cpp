#include "kernels_impl.hpp"

#include <immintrin.h>

#include <algorithm>
#include <cmath>

namespace pdm::kernels::avx2 {

namespace {

double hsum(__m256d v)
{
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

} // namespace

double dot(const double* a, const double* b, std::size_t n)
{
    __m256d acc = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4)
        acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k)));
    double s = hsum(acc);
    for (; k < n; ++k)
        s += a[k] * b[k];
    return s;
}

double sum(const double* a, std::size_t n)
{
    __m256d acc = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4)
        acc = _mm256_add_pd(acc, _mm256_loadu_pd(a + k));
    double s = hsum(acc);
    for (; k < n; ++k)
        s += a[k];
    return s;
}

double max_abs(const double* a, std::size_t n)
{
    const __m256d sign = _mm256_set1_pd(-0.0);
    __m256d acc = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4)
        acc = _mm256_max_pd(acc, _mm256_andnot_pd(sign, _mm256_loadu_pd(a + k)));
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    double m = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
    for (; k < n; ++k)
        m = std::max(m, std::abs(a[k]));
    return m;
}

void accumulate(double* acc, const double* x, std::size_t n)
{
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4)
        _mm256_storeu_pd(acc + k, _mm256_add_pd(_mm256_loadu_pd(acc + k), _mm256_loadu_pd(x + k)));
    for (; k < n; ++k)
        acc[k] += x[k];
}

void excess(const double* d, double* out, std::size_t n)
{
    const __m256d one = _mm256_set1_pd(1.0);
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4)
        _mm256_storeu_pd(out + k, _mm256_sub_pd(one, _mm256_loadu_pd(d + k)));
    for (; k < n; ++k)
        out[k] = 1.0 - d[k];
}

void projected_step(double* p, const double* g, double eta, double lo, double hi, std::size_t n)
{
    const __m256d e = _mm256_set1_pd(eta);
    const __m256d l = _mm256_set1_pd(lo);
    const __m256d h = _mm256_set1_pd(hi);
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        const __m256d v = _mm256_sub_pd(_mm256_loadu_pd(p + k), _mm256_mul_pd(e, _mm256_loadu_pd(g + k)));
        // Operand order matches std::max(v, lo) and std::min(., hi), NaN included.
        _mm256_storeu_pd(p + k, _mm256_min_pd(h, _mm256_max_pd(l, v)));
    }
    for (; k < n; ++k) {
        const double v = p[k] - eta * g[k];
        p[k] = std::min(std::max(v, lo), hi);
    }
}

} // namespace pdm::kernels::avx2
