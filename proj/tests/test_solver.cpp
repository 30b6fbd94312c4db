#include "support.hpp"

#include "pdm/checkers.hpp"
#include "pdm/errors.hpp"
#include "pdm/solver.hpp"

using namespace pdm;
using namespace pdm::test;

TEST_CASE("two opposed linear agents split the issue")
{
    const SolveResult r = solve_pdm_nash(single_issue({0, 1}));
    REQUIRE(r.converged);
    REQUIRE(r.outcome);
    CHECK(r.outcome->z[0][0] == doctest::Approx(0.5).epsilon(1e-7));
    CHECK(r.outcome->z[0][1] == doctest::Approx(0.5).epsilon(1e-7));
    CHECK(r.objective == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(r.price_kind == PriceKind::PerIssue);
}

TEST_CASE("unequal budgets shift the outcome")
{
    PdmInstance p = single_issue({0, 1});
    p.budgets = {2.0, 1.0};
    const SolveResult r = solve_pdm_nash(p);
    REQUIRE(r.converged);
    CHECK(r.outcome->z[0][0] == doctest::Approx(2.0 / 3.0).epsilon(1e-7));
    CHECK(r.outcome->z[0][1] == doctest::Approx(1.0 / 3.0).epsilon(1e-7));
}

TEST_CASE("a single agent gets its preferred side everywhere")
{
    PdmInstance p;
    p.n = 1;
    p.m = 3;
    p.preferred = {{0, 1, 1}};
    p.budgets = {1.0};
    p.utilities = {UtilitySpec::cobb_douglas({1, 2, 0.5})};
    const SolveResult r = solve_pdm_nash(p);
    REQUIRE(r.converged);
    for (std::size_t j = 0; j < 3; ++j)
        CHECK(r.outcome->z[j][p.preferred[0][j]] == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(r.objective == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("one contested Fisher good clears at the total budget")
{
    FisherInstance f = identical_weights_market(single_issue({0, 1}));
    const SolveResult r = solve_fisher_eg(f);
    REQUIRE(r.converged);
    CHECK(r.allocation[0][0] == doctest::Approx(0.5).epsilon(1e-7));
    CHECK(r.allocation[1][0] == doctest::Approx(0.5).epsilon(1e-7));
    CHECK(r.prices[0] == doctest::Approx(2.0).epsilon(1e-7));
    CHECK(check_me(f, r.allocation, r.prices, 1e-6).pass);

    const FisherInstance red = reduce_instance(single_issue({0, 1}));
    const SolveResult rr = solve_fisher_eg(red);
    REQUIRE(rr.converged);
    CHECK(rr.prices[0] == doctest::Approx(2.0).epsilon(1e-7));
    CHECK(rr.objective == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("uncontested good goes to the only interested agent")
{
    FisherInstance f;
    f.n = 2;
    f.goods = {GoodId::plain(0), GoodId::plain(1)};
    f.budgets = {1.0, 1.0};
    f.utilities = {UtilitySpec::linear({1.0, 0.0}), UtilitySpec::linear({1.0, 1.0})};
    const SolveResult r = solve_fisher_eg(f);
    REQUIRE(r.converged);
    CHECK(r.allocation[1][1] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(check_me(f, r.allocation, r.prices, 1e-6).pass);
    CHECK(r.prices[0] + r.prices[1] == doctest::Approx(2.0).epsilon(1e-7));
}

TEST_CASE("brute-force grid on small instances")
{
    const GridResult g = brute_force_max_welfare(single_issue({0, 1}), Welfare::Nash, 100);
    CHECK(g.value == doctest::Approx(0.5));
    CHECK(g.outcome.z[0][0] == doctest::Approx(0.5));
    CHECK(g.points == 101);

    const PdmInstance phi4 = build_phi(4, 1.1, UtilityClass::Linear);
    const GridResult g4 = brute_force_max_welfare(phi4, Welfare::Nash, 50);
    CHECK(g4.value >= 3.0 - 0.1);
    CHECK_THROWS_AS(brute_force_max_welfare(phi4, Welfare::Nash, 50, 1000), GridTooLarge);
}

TEST_CASE("solver dominates the grid oracle on random small instances")
{
    RandomInstanceOptions opts;
    opts.n_max = 3;
    opts.m_max = 2;
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const PdmInstance pdm = random_pdm(seed, opts);
        const SolveResult r = solve_pdm_nash(pdm);
        REQUIRE(r.converged);
        const GridResult g = brute_force_max_welfare(pdm, Welfare::Nash, 40);
        CHECK(r.objective >= g.value - 1e-8);
        // The grid is within one step of the optimum in each coordinate.
        CHECK(g.value >= r.objective - 2.0 * static_cast<double>(pdm.m) / 40.0 * r.objective - 1e-12);
        CHECK(r.outcome->valid());
        for (const auto& zj : r.outcome->z)
            CHECK(zj[0] + zj[1] == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("Fisher solves of reduced markets are certified equilibria")
{
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        const PdmInstance pdm = random_pdm(seed);
        const FisherInstance f = reduce_instance(pdm);
        const SolveResult r = solve_fisher_eg(f);
        REQUIRE(r.converged);
        const EquilibriumReport rep = check_me(f, r.allocation, r.prices, 1e-5);
        CHECK(rep.pass);
        // Budgets are spent and goods with positive price clear, so prices sum to the budgets.
        double sp = 0.0;
        for (double v : r.prices)
            sp += v;
        CHECK(sp == doctest::Approx(f.budgets.size() * 1.0).epsilon(1e-5));
        const SolveResult d = solve_pdm_nash(pdm);
        REQUIRE(d.converged);
        CHECK(close(d.objective, r.objective, 1e-6));
    }
}

TEST_CASE("linear price cross-check agrees with solver multipliers")
{
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        RandomInstanceOptions opts;
        opts.classes = {UtilityClass::Linear};
        const FisherInstance f = identical_weights_market(random_pdm(seed, opts));
        const SolveResult r = solve_fisher_eg(f);
        REQUIRE(r.converged);
        const std::vector<double> cross = linear_price_crosscheck(f, r.allocation);
        for (std::size_t g = 0; g < cross.size(); ++g)
            if (!std::isnan(cross[g]))
                CHECK(close(cross[g], r.prices[g], 1e-4, 1e-6));
    }
}

TEST_CASE("Leontief and CES instances solve")
{
    for (const UtilityClass cls : {UtilityClass::Leontief, UtilityClass::Ces, UtilityClass::CobbDouglas}) {
        RandomInstanceOptions opts;
        opts.classes = {cls};
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const PdmInstance pdm = random_pdm(seed, opts);
            const SolveResult r = solve_pdm_nash(pdm);
            CHECK(r.converged);
            CHECK(r.objective >= welfare(pdm, midpoint_outcome(pdm), Welfare::Nash) - 1e-9);
        }
    }
}
