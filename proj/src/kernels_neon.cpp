#include "kernels_impl.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

#include <algorithm>
#include <cmath>

namespace pdm::kernels::neon {

double dot(const double* a, const double* b, std::size_t n)
{
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t k = 0;
    for (; k + 2 <= n; k += 2)
        acc = vaddq_f64(acc, vmulq_f64(vld1q_f64(a + k), vld1q_f64(b + k)));
    double s = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
    for (; k < n; ++k)
        s += a[k] * b[k];
    return s;
}

double sum(const double* a, std::size_t n)
{
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t k = 0;
    for (; k + 2 <= n; k += 2)
        acc = vaddq_f64(acc, vld1q_f64(a + k));
    double s = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
    for (; k < n; ++k)
        s += a[k];
    return s;
}

double max_abs(const double* a, std::size_t n)
{
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t k = 0;
    for (; k + 2 <= n; k += 2) {
        const float64x2_t v = vabsq_f64(vld1q_f64(a + k));
        acc = vbslq_f64(vcltq_f64(acc, v), v, acc);
    }
    double m = std::max(vgetq_lane_f64(acc, 0), vgetq_lane_f64(acc, 1));
    for (; k < n; ++k)
        m = std::max(m, std::abs(a[k]));
    return m;
}

void accumulate(double* acc, const double* x, std::size_t n)
{
    std::size_t k = 0;
    for (; k + 2 <= n; k += 2)
        vst1q_f64(acc + k, vaddq_f64(vld1q_f64(acc + k), vld1q_f64(x + k)));
    for (; k < n; ++k)
        acc[k] += x[k];
}

void excess(const double* d, double* out, std::size_t n)
{
    const float64x2_t one = vdupq_n_f64(1.0);
    std::size_t k = 0;
    for (; k + 2 <= n; k += 2)
        vst1q_f64(out + k, vsubq_f64(one, vld1q_f64(d + k)));
    for (; k < n; ++k)
        out[k] = 1.0 - d[k];
}

void projected_step(double* p, const double* g, double eta, double lo, double hi, std::size_t n)
{
    const float64x2_t e = vdupq_n_f64(eta);
    const float64x2_t l = vdupq_n_f64(lo);
    const float64x2_t h = vdupq_n_f64(hi);
    std::size_t k = 0;
    for (; k + 2 <= n; k += 2) {
        const float64x2_t v = vsubq_f64(vld1q_f64(p + k), vmulq_f64(e, vld1q_f64(g + k)));
        // Select form keeps std::max / std::min semantics, NaN included.
        const float64x2_t up = vbslq_f64(vcltq_f64(v, l), l, v);
        vst1q_f64(p + k, vbslq_f64(vcltq_f64(h, up), h, up));
    }
    for (; k < n; ++k) {
        const double v = p[k] - eta * g[k];
        p[k] = std::min(std::max(v, lo), hi);
    }
}

} // namespace pdm::kernels::neon

#endif
