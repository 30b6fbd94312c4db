#include "support.hpp"

#include "pdm/errors.hpp"
#include "pdm/reduction.hpp"

#include <algorithm>
#include <numeric>

using namespace pdm;
using namespace pdm::test;

TEST_CASE("utility values on hand-computed bundles")
{
    CHECK(evaluate_utility(UtilitySpec::linear({2, 1}), Bundle{0.5, 1}) == doctest::Approx(2.0));
    CHECK(evaluate_utility(UtilitySpec::leontief({1, 2}), Bundle{1, 1}) == doctest::Approx(0.5));
    // (1^0.5 * 1^0.5 + 1^0.5 * 1^0.5)^(1/0.5) = 2^2
    CHECK(evaluate_utility(UtilitySpec::ces({1, 1}, 0.5), Bundle{1, 1}) == doctest::Approx(4.0));
    // Cobb-Douglas exponents are normalized by the weight sum: sqrt(4 * 1).
    CHECK(evaluate_utility(UtilitySpec::cobb_douglas({1, 1}), Bundle{4, 1}) == doctest::Approx(2.0));
    // Leontief skips zero-weight coordinates.
    CHECK(evaluate_utility(UtilitySpec::leontief({0, 2}), Bundle{0, 1}) == doctest::Approx(0.5));
    CHECK(evaluate_utility(UtilitySpec::cobb_douglas({1, 2}), Bundle{0, 1}) == 0.0);
    CHECK(evaluate_utility(UtilitySpec::ces({1, 1}, -1.0), Bundle{0, 1}) == 0.0);
}

TEST_CASE("zero bundle has zero utility for every class")
{
    SplitMix rng(1);
    for (const auto& s : base_specs(rng, 3))
        CHECK(evaluate_utility(s, Bundle(3, 0.0)) == 0.0);
}

TEST_CASE("spec validation errors")
{
    CHECK_THROWS_AS(UtilitySpec::linear({0, 0}), InvalidSpec);
    CHECK_THROWS_AS(UtilitySpec::linear({1, -1}), InvalidSpec);
    CHECK_THROWS_AS(UtilitySpec::ces({1, 1}, 0.0), InvalidSpec);
    CHECK_THROWS_AS(UtilitySpec::ces({1, 1}, 1.5), InvalidSpec);
    CHECK_THROWS_AS(UtilitySpec::nested(UtilitySpec::linear({1, 1}), {{0, 1}, {1}}, 2), InvalidSpec);
    CHECK_THROWS_AS(UtilitySpec::nested(UtilitySpec::linear({1, 1}), {{0}}, 2), InvalidSpec);
    CHECK_THROWS_AS(evaluate_utility(UtilitySpec::linear({1, 1}), Bundle{1}), DimensionMismatch);
}

TEST_CASE("nested Leontief with Leontief outer simplifies to plain Leontief")
{
    const auto nested = UtilitySpec::nested(UtilitySpec::leontief({1, 2}), {{0, 2}, {1}}, 3);
    const auto flat = simplify(nested);
    CHECK(flat.cls == UtilityClass::Leontief);
    SplitMix rng(5);
    for (int s = 0; s < 50; ++s) {
        const Bundle x = random_bundle(rng, 3);
        CHECK(close(evaluate_utility(flat, x), evaluate_utility(nested, x), 1e-15));
    }
    const auto lin = UtilitySpec::nested(UtilitySpec::linear({1, 2}), {{0, 2}, {1}}, 3);
    CHECK(simplify(lin) == lin);
}

namespace {

// The sampled axiom battery: normalization, degree-1 homogeneity,
// concavity and monotonicity, all at 1e-9.
void check_axioms(const UtilitySpec& s, SplitMix& rng, int samples)
{
    const std::size_t d = s.dimension();
    CHECK(evaluate_utility(s, Bundle(d, 0.0)) == 0.0);
    CHECK(evaluate_utility(s, Bundle(d, 1.0)) > 0.0);
    for (int k = 0; k < samples; ++k) {
        const Bundle x = random_bundle(rng, d, 2.0);
        const Bundle y = random_bundle(rng, d, 2.0);
        const double ux = evaluate_utility(s, x), uy = evaluate_utility(s, y);

        const double lambda = rng.uniform(0.0, 5.0);
        Bundle scaled = x;
        for (double& v : scaled)
            v *= lambda;
        CHECK(close(evaluate_utility(s, scaled), lambda * ux, 1e-9, 1e-300));

        const double t = rng.uniform();
        Bundle mix(d);
        for (std::size_t j = 0; j < d; ++j)
            mix[j] = t * x[j] + (1.0 - t) * y[j];
        CHECK(evaluate_utility(s, mix) >= t * ux + (1.0 - t) * uy - 1e-9);

        Bundle more = x;
        for (double& v : more)
            v += rng.uniform(0.0, 0.5) * (rng.uniform() < 0.5 ? 0.0 : 1.0);
        CHECK(evaluate_utility(s, more) >= ux - 1e-9 * (1.0 + ux));
    }
}

} // namespace

TEST_CASE("utility axioms hold for every base class")
{
    SplitMix rng(11);
    for (std::size_t d : {1, 2, 4})
        for (const auto& s : base_specs(rng, d))
            check_axioms(s, rng, 200);
}

TEST_CASE("utility axioms hold for reduced nested specs")
{
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const FisherInstance f = reduce_instance(random_pdm(seed));
        SplitMix rng(seed + 100);
        for (const auto& u : f.utilities)
            check_axioms(u, rng, 40);
    }
}

TEST_CASE("public bundle reads the agent's side of each issue")
{
    PdmInstance p;
    p.n = 1;
    p.m = 2;
    p.preferred = {{0, 1}};
    p.budgets = {1};
    p.utilities = {UtilitySpec::linear({1, 1})};
    Outcome z{{{0.3, 0.7}, {0.4, 0.6}}};
    CHECK(public_bundle(p, z, 0) == Bundle{0.3, 0.6});

    p.preferred = {{0, 0}};
    Outcome ones{{{1.0, 0.0}, {1.0, 0.0}}};
    CHECK(public_bundle(p, ones, 0) == Bundle{1.0, 1.0});

    const PdmInstance phi = build_phi(4, 1.3, UtilityClass::Linear);
    const Outcome mid = midpoint_outcome(phi);
    for (std::size_t i = 0; i < phi.n; ++i)
        CHECK(public_bundle(phi, mid, i) == Bundle(4, 0.5));
}

TEST_CASE("outcome validity")
{
    CHECK(Outcome{{{0.5, 0.5}}}.valid());
    CHECK(Outcome{{{0.5, 0.5 + 1e-13}}}.valid());
    CHECK_FALSE(Outcome{{{0.5, 0.5 + 1e-9}}}.valid());
    CHECK_FALSE(Outcome{{{-0.1, 0.5}}}.valid());
    CHECK(Outcome{{{0.2, 0.3}}}.valid());
}

TEST_CASE("welfare on the Phi family")
{
    const double eps = 0.01;
    for (std::size_t n : {3, 5, 10, 50}) {
        const PdmInstance phi = build_phi(n, 1.0 + eps, UtilityClass::Linear);
        Outcome all0, all1;
        all0.z.assign(n, {1.0, 0.0});
        all1.z.assign(n, {0.0, 1.0});
        CHECK(welfare(phi, all0, Welfare::Nash) == doctest::Approx(1.0 + eps).epsilon(1e-14));
        CHECK(welfare(phi, all1, Welfare::Nash) == doctest::Approx(static_cast<double>(n) - 1.0).epsilon(1e-14));
        // Each agent values the midpoint at (1 + eps)/2 + (n - 1)/2.
        const double mid = (1.0 + eps + static_cast<double>(n - 1)) / 2.0;
        CHECK(welfare(phi, midpoint_outcome(phi), Welfare::Nash) == doctest::Approx(mid).epsilon(1e-14));
    }
    const PdmInstance phi1 = build_phi(6, 1.0, UtilityClass::Linear);
    CHECK(welfare(phi1, midpoint_outcome(phi1), Welfare::Nash) == doctest::Approx(3.0));
}

TEST_CASE("welfare functions agree when utilities are equal")
{
    const std::vector<double> u(5, 1.7), b(5, 1.0);
    CHECK(welfare_of(u, b, Welfare::Nash) == doctest::Approx(1.7));
    CHECK(welfare_of(u, b, Welfare::Utilitarian) / 5.0 == doctest::Approx(1.7));
    CHECK(welfare_of(u, b, Welfare::Egalitarian) == doctest::Approx(1.7));
}

TEST_CASE("Nash welfare: zero short-circuit, permutation invariance, homogeneity")
{
    CHECK(welfare_of(std::vector<double>{1.0, 0.0, 2.0}, std::vector<double>{1, 1, 1}, Welfare::Nash) == 0.0);
    // 2000 tiny utilities would underflow a direct product.
    const std::vector<double> tiny(2000, 1e-200), ones(2000, 1.0);
    CHECK(welfare_of(tiny, ones, Welfare::Nash) == doctest::Approx(1e-200).epsilon(1e-12));

    SplitMix rng(3);
    for (int k = 0; k < 100; ++k) {
        const std::size_t n = 1 + rng.below(6);
        std::vector<double> u(n), b(n);
        for (std::size_t i = 0; i < n; ++i) {
            u[i] = rng.uniform(0.1, 3.0);
            b[i] = rng.uniform(0.5, 2.0);
        }
        const double base = welfare_of(u, b, Welfare::Nash);
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        std::reverse(perm.begin(), perm.end());
        std::vector<double> pu(n), pb(n);
        for (std::size_t i = 0; i < n; ++i) {
            pu[i] = u[perm[i]];
            pb[i] = b[perm[i]];
        }
        CHECK(close(welfare_of(pu, pb, Welfare::Nash), base, 1e-13));
        const double lambda = rng.uniform(0.1, 10.0);
        for (double& v : u)
            v *= lambda;
        CHECK(close(welfare_of(u, b, Welfare::Nash), lambda * base, 1e-13));
    }
}

TEST_CASE("midpoint achieves at least half of every sampled outcome's Nash welfare")
{
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const PdmInstance pdm = random_pdm(seed);
        const double mid = welfare(pdm, midpoint_outcome(pdm), Welfare::Nash);
        SplitMix rng(seed);
        for (int k = 0; k < 50; ++k) {
            Outcome z;
            for (std::size_t j = 0; j < pdm.m; ++j) {
                const double a = rng.uniform();
                z.z.push_back({a, (1.0 - a) * rng.uniform()});
            }
            CHECK(mid >= 0.5 * welfare(pdm, z, Welfare::Nash) - 1e-12);
        }
    }
}

TEST_CASE("build_phi structure")
{
    const PdmInstance p = build_phi(3, 1.1, UtilityClass::Linear);
    CHECK(p.n == 3);
    CHECK(p.m == 3);
    CHECK(p.budgets == std::vector<double>(3, 1.0));
    CHECK(p.utilities[0].weights == std::vector<double>{1.1, 1, 1});
    CHECK(p.utilities[1].weights == std::vector<double>{1, 1.1, 1});
    CHECK(p.utilities[2].weights == std::vector<double>{1, 1, 1.1});
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            CHECK(p.preferred[i][j] == (i == j ? 0 : 1));

    const PdmInstance l = build_phi(2, 1.0, UtilityClass::Leontief);
    CHECK(l.utilities[0].cls == UtilityClass::Leontief);
    CHECK(l.preferred[0][0] != l.preferred[1][0]);
    CHECK(l.preferred[0][1] != l.preferred[1][1]);

    CHECK_THROWS_AS(build_phi(3, 1.0, UtilityClass::Ces), InvalidSpec);
    CHECK_THROWS_AS(build_phi(3, 1.0, UtilityClass::Ces, 2.0), InvalidSpec);
    CHECK_THROWS(build_phi(1, 1.0, UtilityClass::Linear));
}

TEST_CASE("instance validation")
{
    PdmInstance p = single_issue({0, 1});
    p.budgets[0] = 0.0;
    CHECK_THROWS_AS(p.validate(), InvalidInstance);
    p = single_issue({0, 1});
    p.preferred[1][0] = 2;
    CHECK_THROWS_AS(p.validate(), InvalidInstance);
    p = single_issue({0, 1});
    p.utilities[0] = UtilitySpec::linear({1, 1});
    CHECK_THROWS(p.validate());
}

TEST_CASE("random instances are reproducible and within bounds")
{
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const PdmInstance a = random_pdm(seed), b = random_pdm(seed);
        CHECK(a == b);
        CHECK(a.n >= 1);
        CHECK(a.n <= 5);
        CHECK(a.m >= 1);
        CHECK(a.m <= 4);
        for (const auto& u : a.utilities)
            for (double w : u.weights) {
                CHECK(w >= 0.1);
                CHECK(w <= 2.0);
            }
    }
}
