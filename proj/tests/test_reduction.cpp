#include "support.hpp"

#include "pdm/errors.hpp"
#include "pdm/reduction.hpp"

#include <algorithm>
#include <set>

using namespace pdm;
using namespace pdm::test;

namespace {

PdmInstance five_agent_issue()
{
    return single_issue({0, 0, 0, 1, 1});
}

std::size_t good_index(const FisherInstance& f, const GoodId& g)
{
    const auto it = std::find(f.goods.begin(), f.goods.end(), g);
    REQUIRE(it != f.goods.end());
    return static_cast<std::size_t>(it - f.goods.begin());
}

} // namespace

TEST_CASE("five agents on one issue give six pairwise goods")
{
    const FisherInstance f = reduce_instance(five_agent_issue());
    CHECK(f.good_count() == 6);
    std::set<GoodId> expected;
    for (std::size_t i : {0, 1, 2})
        for (std::size_t k : {3, 4})
            expected.insert(GoodId::pairwise(i, k, 0));
    CHECK(std::set<GoodId>(f.goods.begin(), f.goods.end()) == expected);
    CHECK(pairwise_good_count(five_agent_issue()) == 6);
    // Agents on the majority side hold two goods, the others three.
    CHECK(f.map->own[0][0].size() == 2);
    CHECK(f.map->own[3][0].size() == 3);
}

TEST_CASE("two opposed agents give one good")
{
    const FisherInstance f = reduce_instance(single_issue({0, 1}));
    REQUIRE(f.good_count() == 1);
    CHECK(f.goods[0] == GoodId::pairwise(0, 1, 0));
    CHECK(lift_bundle(f, 0, std::vector<double>{0.5}) == Bundle{0.5});
    CHECK(lift_bundle(f, 0, std::vector<double>{0.0}) == Bundle{0.0});
}

TEST_CASE("unanimous issues give one solo good per agent")
{
    const PdmInstance pdm = single_issue({1, 1, 1});
    CHECK(pairwise_good_count(pdm) == 0);
    const FisherInstance f = reduce_instance(pdm);
    CHECK(f.good_count() == 3);
    CHECK(f.map->unanimous[0]);
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(f.goods[f.map->own[i][0][0]] == GoodId::solo(i, 0));

    Allocation alloc{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    const Outcome z = outcome_from_reduced_equilibrium(f, alloc);
    CHECK(z.z[0] == std::array<double, 2>{0.0, 1.0});
}

TEST_CASE("lift on Phi(3, 1) agent 0")
{
    const FisherInstance f = reduce_instance(build_phi(3, 1.0, UtilityClass::Linear));
    CHECK(f.good_count() == 6);
    const Bundle y = lift_bundle(f, 0, std::vector<double>{0.2, 0.3, 0.4});
    CHECK(y[good_index(f, GoodId::pairwise(0, 1, 0))] == 0.2);
    CHECK(y[good_index(f, GoodId::pairwise(0, 2, 0))] == 0.2);
    CHECK(y[good_index(f, GoodId::pairwise(0, 1, 1))] == 0.3);
    CHECK(y[good_index(f, GoodId::pairwise(0, 2, 2))] == 0.4);
    CHECK(y[good_index(f, GoodId::pairwise(1, 2, 1))] == 0.0);
    double total = 0.0;
    for (double v : y)
        total += v;
    CHECK(total == doctest::Approx(1.1));
}

TEST_CASE("project takes the minimum and sums prices")
{
    const FisherInstance f = reduce_instance(five_agent_issue());
    Bundle x(6, 0.0);
    x[good_index(f, GoodId::pairwise(0, 3, 0))] = 0.7;
    x[good_index(f, GoodId::pairwise(0, 4, 0))] = 0.6;
    CHECK(project_bundle(f, 0, x) == Bundle{0.6});
    CHECK(project_bundle(f, 0, Bundle(6, 0.0)) == Bundle{0.0});

    std::vector<double> p(6, 0.0);
    CHECK(project_prices(f, p)[0][0] == 0.0);
    p[good_index(f, GoodId::pairwise(0, 3, 0))] = 0.3;
    p[good_index(f, GoodId::pairwise(0, 4, 0))] = 0.5;
    CHECK(project_prices(f, p)[0][0] == doctest::Approx(0.8));
    CHECK(project_prices(f, p)[3][0] == doctest::Approx(0.3));

    const FisherInstance two = reduce_instance(single_issue({0, 1}));
    const auto pp = project_prices(two, std::vector<double>{2.0});
    CHECK(pp[0][0] == 2.0);
    CHECK(pp[1][0] == 2.0);
}

TEST_CASE("outcome read off a reduced allocation")
{
    const FisherInstance two = reduce_instance(single_issue({0, 1}));
    const Outcome half = outcome_from_reduced_equilibrium(two, Allocation{{0.5}, {0.5}});
    CHECK(half.z[0] == std::array<double, 2>{0.5, 0.5});

    // Two side-0 agents with 0.3 each, one side-1 agent with 0.7 on both goods.
    const FisherInstance f = reduce_instance(single_issue({0, 0, 1}));
    Allocation alloc(3, Bundle(f.good_count(), 0.0));
    alloc[0][good_index(f, GoodId::pairwise(0, 2, 0))] = 0.3;
    alloc[1][good_index(f, GoodId::pairwise(1, 2, 0))] = 0.3;
    alloc[2] = Bundle(f.good_count(), 0.7);
    const Outcome z = outcome_from_reduced_equilibrium(f, alloc);
    CHECK(z.z[0][0] == doctest::Approx(0.3));
    CHECK(z.z[0][1] == doctest::Approx(0.7));
}

TEST_CASE("provenance is required")
{
    const FisherInstance plain = identical_weights_market(single_issue({0, 1}));
    CHECK_FALSE(plain.has_provenance());
    CHECK_THROWS_AS(lift_bundle(plain, 0, std::vector<double>{0.5}), ProvenanceMissing);
    CHECK_THROWS_AS(project_bundle(plain, 0, std::vector<double>{0.5}), ProvenanceMissing);
    CHECK_THROWS_AS(project_prices(plain, std::vector<double>{0.5}), ProvenanceMissing);
}

TEST_CASE("good count is n(n-1) on Phi(n, w)")
{
    for (std::size_t n : {2, 3, 5, 8}) {
        const PdmInstance phi = build_phi(n, 1.2, UtilityClass::Linear);
        CHECK(pairwise_good_count(phi) == n * (n - 1));
        CHECK(reduce_instance(phi).good_count() == n * (n - 1));
    }
}

TEST_CASE("R and its inverse: cost inequality, cost equality, identity, utility")
{
    std::size_t checked = 0;
    for (std::uint64_t seed = 0; checked < 1000; ++seed) {
        const PdmInstance pdm = random_pdm(seed);
        const FisherInstance f = reduce_instance(pdm);
        SplitMix rng(seed ^ 0x5eedULL);
        std::vector<double> p(f.good_count());
        for (double& v : p)
            v = rng.uniform(0.0, 2.0);
        const PersonalPrices pp = project_prices(f, p);
        for (std::size_t i = 0; i < pdm.n; ++i, ++checked) {
            // Any bundle over goods costs at least its projection.
            const Bundle x = random_bundle(rng, f.good_count());
            const Bundle px = project_bundle(f, i, x);
            CHECK(dot(pp[i], px) <= dot(p, x) + 1e-12);

            const Bundle y = random_bundle(rng, pdm.m);
            const Bundle lifted = lift_bundle(f, i, y);
            CHECK(close(dot(p, lifted), dot(pp[i], y), 1e-12, 1e-12));
            const Bundle back = project_bundle(f, i, lifted);
            for (std::size_t j = 0; j < pdm.m; ++j)
                CHECK(back[j] == y[j]);
            CHECK(close(evaluate_utility(f.utilities[i], lifted), evaluate_utility(pdm.utilities[i], y), 1e-12));
            // Projection never raises utility.
            CHECK(evaluate_utility(f.utilities[i], x) <=
                  evaluate_utility(pdm.utilities[i], px) * (1.0 + 1e-12) + 1e-300);
        }
    }
}

TEST_CASE("welfare of an outcome equals welfare of its lifted allocation")
{
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const PdmInstance pdm = random_pdm(seed);
        const FisherInstance f = reduce_instance(pdm);
        SplitMix rng(seed);
        Outcome z;
        for (std::size_t j = 0; j < pdm.m; ++j) {
            const double a = rng.uniform();
            z.z.push_back({a, 1.0 - a});
        }
        const Allocation lifted = lift_outcome(f, z);
        for (const Welfare psi : {Welfare::Nash, Welfare::Utilitarian, Welfare::Egalitarian})
            CHECK(close(welfare(f, lifted, psi), welfare(pdm, z, psi), 1e-12));
        // A lifted outcome never oversells a good.
        for (std::size_t g = 0; g < f.good_count(); ++g) {
            double s = 0.0;
            for (const auto& b : lifted)
                s += b[g];
            CHECK(s <= 1.0 + 1e-12);
        }
    }
}
