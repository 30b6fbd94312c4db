#include "kernels_impl.hpp"

#include <algorithm>
#include <cmath>

namespace pdm::kernels::scalar {

double dot(const double* a, const double* b, std::size_t n)
{
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k)
        s += a[k] * b[k];
    return s;
}

double sum(const double* a, std::size_t n)
{
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k)
        s += a[k];
    return s;
}

double max_abs(const double* a, std::size_t n)
{
    double m = 0.0;
    for (std::size_t k = 0; k < n; ++k)
        m = std::max(m, std::abs(a[k]));
    return m;
}

void accumulate(double* acc, const double* x, std::size_t n)
{
    for (std::size_t k = 0; k < n; ++k)
        acc[k] += x[k];
}

void excess(const double* d, double* out, std::size_t n)
{
    for (std::size_t k = 0; k < n; ++k)
        out[k] = 1.0 - d[k];
}

void projected_step(double* p, const double* g, double eta, double lo, double hi, std::size_t n)
{
    for (std::size_t k = 0; k < n; ++k) {
        const double v = p[k] - eta * g[k];
        p[k] = std::min(std::max(v, lo), hi);
    }
}

} // namespace pdm::kernels::scalar
