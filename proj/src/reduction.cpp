#include "pdm/reduction.hpp"

#include "pdm/errors.hpp"

#include <algorithm>
#include <limits>
#include <tuple>

namespace pdm {

GoodId GoodId::plain(std::size_t index)
{
    GoodId g;
    g.kind = Kind::Plain;
    g.index = index;
    return g;
}

GoodId GoodId::pairwise(std::size_t a, std::size_t b, std::size_t issue)
{
    if (a == b)
        throw InvalidInstance("pairwise good needs two distinct agents");
    GoodId g;
    g.kind = Kind::Pairwise;
    g.i = std::min(a, b);
    g.k = std::max(a, b);
    g.j = issue;
    return g;
}

GoodId GoodId::solo(std::size_t agent, std::size_t issue)
{
    GoodId g;
    g.kind = Kind::Solo;
    g.i = agent;
    g.j = issue;
    return g;
}

bool operator==(const GoodId& a, const GoodId& b)
{
    return std::tie(a.kind, a.index, a.i, a.k, a.j) == std::tie(b.kind, b.index, b.i, b.k, b.j);
}

bool operator<(const GoodId& a, const GoodId& b)
{
    return std::tie(a.kind, a.index, a.j, a.i, a.k) < std::tie(b.kind, b.index, b.j, b.i, b.k);
}

void FisherInstance::require_provenance() const
{
    if (!has_provenance())
        throw ProvenanceMissing("operation needs a Fisher instance produced by reduce_instance");
}

void FisherInstance::validate() const
{
    if (n < 1)
        throw InvalidInstance("Fisher market needs at least one agent");
    if (budgets.size() != n || utilities.size() != n)
        throw InvalidInstance("per-agent arrays must have n entries");
    for (std::size_t i = 0; i < n; ++i) {
        if (!(budgets[i] > 0.0))
            throw InvalidInstance("budgets must be positive");
        utilities[i].validate();
        if (utilities[i].dimension() != goods.size())
            throw InvalidInstance("utility dimension must equal the good count");
    }
}

FisherInstance identical_weights_market(const PdmInstance& pdm)
{
    pdm.validate();
    FisherInstance f;
    f.n = pdm.n;
    for (std::size_t j = 0; j < pdm.m; ++j)
        f.goods.push_back(GoodId::plain(j));
    f.budgets = pdm.budgets;
    f.utilities = pdm.utilities;
    return f;
}

std::size_t pairwise_good_count(const PdmInstance& pdm)
{
    std::size_t count = 0;
    for (std::size_t j = 0; j < pdm.m; ++j)
        count += pdm.side(j, 0).size() * pdm.side(j, 1).size();
    return count;
}

FisherInstance reduce_instance(const PdmInstance& pdm)
{
    pdm.validate();
    auto map = std::make_shared<ReductionMap>();
    map->own.assign(pdm.n, std::vector<std::vector<std::size_t>>(pdm.m));
    map->unanimous.assign(pdm.m, false);

    FisherInstance f;
    f.n = pdm.n;
    f.budgets = pdm.budgets;
    for (std::size_t j = 0; j < pdm.m; ++j) {
        if (pdm.unanimous(j)) {
            map->unanimous[j] = true;
            for (std::size_t i = 0; i < pdm.n; ++i) {
                map->own[i][j].push_back(f.goods.size());
                f.goods.push_back(GoodId::solo(i, j));
            }
            continue;
        }
        for (std::size_t i = 0; i < pdm.n; ++i) {
            for (std::size_t k = i + 1; k < pdm.n; ++k) {
                if (pdm.preferred[i][j] == pdm.preferred[k][j])
                    continue;
                map->own[i][j].push_back(f.goods.size());
                map->own[k][j].push_back(f.goods.size());
                f.goods.push_back(GoodId::pairwise(i, k, j));
            }
        }
    }
    map->goods = f.goods.size();
    for (auto& per_agent : map->own)
        for (auto& g : per_agent)
            std::sort(g.begin(), g.end());

    for (std::size_t i = 0; i < pdm.n; ++i)
        f.utilities.push_back(UtilitySpec::nested(pdm.utilities[i], map->own[i], f.goods.size()));

    f.source = std::make_shared<const PdmInstance>(pdm);
    f.map = std::move(map);
    return f;
}

Bundle lift_bundle(const FisherInstance& fisher, std::size_t agent, std::span<const double> y)
{
    fisher.require_provenance();
    const auto& own = fisher.map->own.at(agent);
    if (y.size() != own.size())
        throw DimensionMismatch("bundle over issues has wrong length");
    Bundle out(fisher.map->goods, 0.0);
    for (std::size_t j = 0; j < own.size(); ++j)
        for (std::size_t l : own[j])
            out[l] = y[j];
    return out;
}

Bundle project_bundle(const FisherInstance& fisher, std::size_t agent, std::span<const double> y)
{
    fisher.require_provenance();
    const auto& own = fisher.map->own.at(agent);
    if (y.size() != fisher.map->goods)
        throw DimensionMismatch("bundle over goods has wrong length");
    Bundle out(own.size());
    for (std::size_t j = 0; j < own.size(); ++j) {
        double v = std::numeric_limits<double>::infinity();
        for (std::size_t l : own[j])
            v = std::min(v, y[l]);
        out[j] = v;
    }
    return out;
}

PersonalPrices project_prices(const FisherInstance& fisher, std::span<const double> p)
{
    fisher.require_provenance();
    if (p.size() != fisher.map->goods)
        throw DimensionMismatch("price vector has wrong length");
    PersonalPrices out(fisher.n);
    for (std::size_t i = 0; i < fisher.n; ++i) {
        const auto& own = fisher.map->own[i];
        out[i].assign(own.size(), 0.0);
        for (std::size_t j = 0; j < own.size(); ++j)
            for (std::size_t l : own[j])
                out[i][j] += p[l];
    }
    return out;
}

Outcome outcome_from_reduced_equilibrium(const FisherInstance& fisher, const Allocation& alloc)
{
    fisher.require_provenance();
    const PdmInstance& pdm = *fisher.source;
    if (alloc.size() != pdm.n)
        throw DimensionMismatch("allocation needs one bundle per agent");
    std::vector<Bundle> projected(pdm.n);
    for (std::size_t i = 0; i < pdm.n; ++i)
        projected[i] = project_bundle(fisher, i, alloc[i]);

    Outcome z;
    z.z.resize(pdm.m);
    for (std::size_t j = 0; j < pdm.m; ++j) {
        if (fisher.map->unanimous[j]) {
            const int shared = pdm.preferred[0][j];
            z.z[j][shared] = 1.0;
            z.z[j][1 - shared] = 0.0;
            continue;
        }
        double z0 = 0.0;
        for (std::size_t i : pdm.side(j, 0))
            z0 = std::max(z0, projected[i][j]);
        z.z[j] = {z0, std::max(1.0 - z0, 0.0)};
    }
    return z;
}

Allocation lift_outcome(const FisherInstance& fisher, const Outcome& z)
{
    fisher.require_provenance();
    Allocation out(fisher.n);
    for (std::size_t i = 0; i < fisher.n; ++i)
        out[i] = lift_bundle(fisher, i, public_bundle(*fisher.source, z, i));
    return out;
}

std::vector<double> agent_utilities(const FisherInstance& fisher, const Allocation& alloc)
{
    if (alloc.size() != fisher.n)
        throw DimensionMismatch("allocation needs one bundle per agent");
    std::vector<double> u(fisher.n);
    for (std::size_t i = 0; i < fisher.n; ++i)
        u[i] = evaluate_utility(fisher.utilities[i], alloc[i]);
    return u;
}

double welfare(const FisherInstance& fisher, const Allocation& alloc, Welfare psi)
{
    const auto u = agent_utilities(fisher, alloc);
    return welfare_of(u, fisher.budgets, psi);
}

} // namespace pdm
