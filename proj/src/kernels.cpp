#include "pdm/kernels.hpp"

#include "kernels_impl.hpp"

#include <cstdlib>
#include <cstring>

namespace pdm::kernels {

std::string to_string(Isa isa)
{
    switch (isa) {
    case Isa::Scalar:
        return "scalar";
    case Isa::Avx2:
        return "avx2";
    case Isa::Neon:
        return "neon";
    }
    return "unknown";
}

const Table& scalar_table()
{
    static const Table t{Isa::Scalar,   scalar::dot,    scalar::sum,           scalar::max_abs,
                         scalar::accumulate, scalar::excess, scalar::projected_step};
    return t;
}

const Table* table_for(Isa isa)
{
    switch (isa) {
    case Isa::Scalar:
        return &scalar_table();
    case Isa::Avx2:
#if defined(PDM_HAVE_AVX2)
        if (__builtin_cpu_supports("avx2")) {
            static const Table t{Isa::Avx2,       avx2::dot,    avx2::sum,           avx2::max_abs,
                                 avx2::accumulate, avx2::excess, avx2::projected_step};
            return &t;
        }
#endif
        return nullptr;
    case Isa::Neon:
#if defined(__aarch64__)
        {
            static const Table t{Isa::Neon,       neon::dot,    neon::sum,           neon::max_abs,
                                 neon::accumulate, neon::excess, neon::projected_step};
            return &t;
        }
#else
        return nullptr;
#endif
    }
    return nullptr;
}

const Table& active()
{
    static const Table* chosen = [] {
        const char* env = std::getenv("PDM_KERNELS");
        if (env && std::strcmp(env, "scalar") == 0)
            return &scalar_table();
        for (Isa isa : {Isa::Avx2, Isa::Neon})
            if (const Table* t = table_for(isa))
                return t;
        return &scalar_table();
    }();
    return *chosen;
}

} // namespace pdm::kernels
