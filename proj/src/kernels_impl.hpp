#pragma once

#include <cstddef>

namespace pdm::kernels {

#define PDM_KERNEL_DECLS                                                                                     \
    double dot(const double* a, const double* b, std::size_t n);                                             \
    double sum(const double* a, std::size_t n);                                                              \
    double max_abs(const double* a, std::size_t n);                                                          \
    void accumulate(double* acc, const double* x, std::size_t n);                                            \
    void excess(const double* d, double* out, std::size_t n);                                                \
    void projected_step(double* p, const double* g, double eta, double lo, double hi, std::size_t n);

namespace scalar {
PDM_KERNEL_DECLS
}

namespace avx2 {
PDM_KERNEL_DECLS
}

namespace neon {
PDM_KERNEL_DECLS
}

#undef PDM_KERNEL_DECLS

} // namespace pdm::kernels
