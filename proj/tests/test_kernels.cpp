#include "support.hpp"

#include "pdm/kernels.hpp"

#include <cstdlib>
#include <cstring>
#include <limits>

using namespace pdm;
using namespace pdm::kernels;

namespace {

std::vector<const Table*> simd_tables()
{
    std::vector<const Table*> out;
    for (Isa isa : {Isa::Avx2, Isa::Neon})
        if (const Table* t = table_for(isa))
            out.push_back(t);
    return out;
}

std::vector<double> random_vector(SplitMix& rng, std::size_t n, double lo, double hi)
{
    std::vector<double> v(n);
    for (double& x : v)
        x = rng.uniform(lo, hi);
    return v;
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b)
{
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

const std::size_t kLengths[] = {0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 64, 101, 1000};

} // namespace

TEST_CASE("scalar reference kernels")
{
    const Table& s = scalar_table();
    CHECK(s.isa == Isa::Scalar);
    const std::vector<double> a{1, -2, 3}, b{4, 5, -6};
    CHECK(s.dot(a.data(), b.data(), 3) == -24.0);
    CHECK(s.sum(a.data(), 3) == 2.0);
    CHECK(s.max_abs(a.data(), 3) == 3.0);
    CHECK(s.max_abs(a.data(), 0) == 0.0);

    std::vector<double> acc{1, 1, 1};
    s.accumulate(acc.data(), a.data(), 3);
    CHECK(acc == std::vector<double>{2, -1, 4});

    std::vector<double> out(3);
    s.excess(a.data(), out.data(), 3);
    CHECK(out == std::vector<double>{0, 3, -2});

    std::vector<double> p{1.0, 1.0, 1.0};
    const std::vector<double> g{10.0, -10.0, 0.5};
    s.projected_step(p.data(), g.data(), 0.1, 0.001, 2.0, 3);
    CHECK(p == std::vector<double>{0.001, 2.0, 0.95});
}

TEST_CASE("dispatch")
{
    CHECK(to_string(Isa::Scalar) == "scalar");
    CHECK(to_string(Isa::Avx2) == "avx2");
    CHECK(to_string(Isa::Neon) == "neon");
    CHECK(table_for(Isa::Scalar) == &scalar_table());
    const Table& act = active();
    const char* env = std::getenv("PDM_KERNELS");
    if (env && std::strcmp(env, "scalar") == 0) {
        CHECK(act.isa == Isa::Scalar);
    } else {
        const auto simd = simd_tables();
        CHECK(act.isa == (simd.empty() ? Isa::Scalar : simd.front()->isa));
    }
    MESSAGE("active kernels: " << to_string(act.isa));
}

TEST_CASE("SIMD elementwise kernels are bit-identical to scalar")
{
    const Table& s = scalar_table();
    const auto simd = simd_tables();
    if (simd.empty())
        MESSAGE("no SIMD variant available on this machine");
    SplitMix rng(17);
    for (const Table* t : simd) {
        for (std::size_t n : kLengths) {
            for (int rep = 0; rep < 5; ++rep) {
                const auto x = random_vector(rng, n, -3.0, 3.0);
                const auto g = random_vector(rng, n, -50.0, 50.0);
                const auto p0 = random_vector(rng, n, 0.0, 2.5);

                auto acc_s = p0, acc_v = p0;
                s.accumulate(acc_s.data(), x.data(), n);
                t->accumulate(acc_v.data(), x.data(), n);
                CHECK(same_bits(acc_s, acc_v));

                std::vector<double> ex_s(n), ex_v(n);
                s.excess(x.data(), ex_s.data(), n);
                t->excess(x.data(), ex_v.data(), n);
                CHECK(same_bits(ex_s, ex_v));

                const double eta = rng.uniform(1e-4, 1.0);
                auto ps = p0, pv = p0;
                s.projected_step(ps.data(), g.data(), eta, 1e-3, 2.0, n);
                t->projected_step(pv.data(), g.data(), eta, 1e-3, 2.0, n);
                CHECK(same_bits(ps, pv));

                CHECK(s.max_abs(x.data(), n) == t->max_abs(x.data(), n));
            }
        }
    }
}

TEST_CASE("SIMD elementwise kernels match scalar on NaN, infinity and signed zero")
{
    const Table& s = scalar_table();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double inf = std::numeric_limits<double>::infinity();
    const std::vector<double> x{nan, inf, -inf, 0.0, -0.0, 1e308, -1e308, 5e-324, 1.0};
    const std::vector<double> g{1.0, nan, inf, -inf, -0.0, 0.0, 1e300, -1e300, nan};
    const std::size_t n = x.size();
    for (const Table* t : simd_tables()) {
        auto acc_s = x, acc_v = x;
        s.accumulate(acc_s.data(), g.data(), n);
        t->accumulate(acc_v.data(), g.data(), n);
        CHECK(same_bits(acc_s, acc_v));

        std::vector<double> ex_s(n), ex_v(n);
        s.excess(x.data(), ex_s.data(), n);
        t->excess(x.data(), ex_v.data(), n);
        CHECK(same_bits(ex_s, ex_v));

        auto ps = x, pv = x;
        s.projected_step(ps.data(), g.data(), 0.5, 1e-3, 2.0, n);
        t->projected_step(pv.data(), g.data(), 0.5, 1e-3, 2.0, n);
        CHECK(same_bits(ps, pv));
    }
}

TEST_CASE("SIMD reductions agree with scalar up to rounding")
{
    const Table& s = scalar_table();
    SplitMix rng(18);
    for (const Table* t : simd_tables()) {
        for (std::size_t n : kLengths) {
            const auto a = random_vector(rng, n, -1.0, 1.0);
            const auto b = random_vector(rng, n, -1.0, 1.0);
            double mag = 0.0, abs_sum = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                mag += std::abs(a[k] * b[k]);
                abs_sum += std::abs(a[k]);
            }
            const double eps = std::numeric_limits<double>::epsilon();
            CHECK(std::abs(s.dot(a.data(), b.data(), n) - t->dot(a.data(), b.data(), n)) <=
                  2.0 * static_cast<double>(n) * eps * mag);
            CHECK(std::abs(s.sum(a.data(), n) - t->sum(a.data(), n)) <= 2.0 * static_cast<double>(n) * eps * abs_sum);
        }
        // Exactly representable partial sums give identical results.
        std::vector<double> ones(37, 1.0);
        CHECK(t->sum(ones.data(), ones.size()) == 37.0);
        CHECK(t->dot(ones.data(), ones.data(), ones.size()) == 37.0);
    }
}
