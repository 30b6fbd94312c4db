#pragma once

#include <cstddef>
#include <string>

namespace pdm::kernels {

enum class Isa { Scalar, Avx2, Neon };

std::string to_string(Isa isa);

/// Dense vector kernels used by the price dynamics.
///
/// Elementwise kernels are bit-identical across variants. Reductions
/// (dot, sum) may differ from the scalar order by rounding only.
struct Table {
    Isa isa;
    double (*dot)(const double* a, const double* b, std::size_t n);
    double (*sum)(const double* a, std::size_t n);
    double (*max_abs)(const double* a, std::size_t n);
    /// acc[k] += x[k]
    void (*accumulate)(double* acc, const double* x, std::size_t n);
    /// out[k] = 1 - d[k]
    void (*excess)(const double* d, double* out, std::size_t n);
    /// p[k] = clamp(p[k] - eta * g[k], lo, hi)
    void (*projected_step)(double* p, const double* g, double eta, double lo, double hi, std::size_t n);
};

const Table& scalar_table();

/// Variant for `isa`, or nullptr when it is not compiled in or the CPU
/// lacks it.
const Table* table_for(Isa isa);

/// Best available variant. Setting PDM_KERNELS=scalar forces the scalar
/// table. Resolved once per process.
const Table& active();

} // namespace pdm::kernels
