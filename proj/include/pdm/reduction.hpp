#pragma once

#include "pdm/model.hpp"

#include <memory>

namespace pdm {

/// Identifier of a Fisher good.
///
/// Pairwise goods stand for one disagreeing pair (i < k) on issue j.
/// Solo goods stand for agent i on an issue where every agent agrees.
struct GoodId {
    enum class Kind { Plain, Pairwise, Solo };
    Kind kind = Kind::Plain;
    std::size_t index = 0; // Plain
    std::size_t i = 0;     // Pairwise, Solo
    std::size_t k = 0;     // Pairwise
    std::size_t j = 0;     // Pairwise, Solo

    static GoodId plain(std::size_t index);
    static GoodId pairwise(std::size_t a, std::size_t b, std::size_t issue);
    static GoodId solo(std::size_t agent, std::size_t issue);
};

bool operator==(const GoodId& a, const GoodId& b);
bool operator<(const GoodId& a, const GoodId& b);

/// Index maps of a reduction, derived deterministically from the source.
struct ReductionMap {
    /// own[i][j]: goods of agent i on issue j, in good-index order.
    std::vector<std::vector<std::vector<std::size_t>>> own;
    std::vector<bool> unanimous;
    std::size_t goods = 0;
};

struct FisherInstance {
    std::size_t n = 0;
    std::vector<GoodId> goods;
    std::vector<double> budgets;
    std::vector<UtilitySpec> utilities;

    std::shared_ptr<const PdmInstance> source;
    std::shared_ptr<const ReductionMap> map;

    std::size_t good_count() const { return goods.size(); }
    bool has_provenance() const { return source && map; }
    /// Throws ProvenanceMissing when the instance does not come from a reduction.
    void require_provenance() const;
    void validate() const;
};

/// Plain Fisher market with one good per issue and the instance's own
/// utilities, as used for issue pricing with linear utilities.
FisherInstance identical_weights_market(const PdmInstance& pdm);

/// Pairwise issue expansion.
///
/// Contested issue j yields one good per disagreeing pair; agent i's group
/// for issue j is the set of its pairwise goods on j. Unanimous issue j yields
/// one solo good per agent, which keeps every reduced utility homogeneous.
/// The outer spec of each reduced utility is the agent's own spec over all m
/// issues, with groups in issue order.
FisherInstance reduce_instance(const PdmInstance& pdm);

/// Number of pairwise goods, sum over issues of |side 0| * |side 1|.
std::size_t pairwise_good_count(const PdmInstance& pdm);

/// R(y_i): puts y_ij on each of agent i's goods of issue j, zero elsewhere.
Bundle lift_bundle(const FisherInstance& fisher, std::size_t agent, std::span<const double> y);

/// R^{-1}(y_i)_j: minimum over agent i's goods of issue j.
Bundle project_bundle(const FisherInstance& fisher, std::size_t agent, std::span<const double> y);

/// R^{-1}(p)_ij: sum of agent i's good prices on issue j.
PersonalPrices project_prices(const FisherInstance& fisher, std::span<const double> p);

/// Outcome read off a reduced allocation: z^{j,0} is the largest projected
/// side-0 quantity, z^{j,1} = max(1 - z^{j,0}, 0). Unanimous issues put full
/// probability on the shared alternative.
Outcome outcome_from_reduced_equilibrium(const FisherInstance& fisher, const Allocation& alloc);

/// Lifted allocation of an outcome: agent i receives R(x_i(z)).
Allocation lift_outcome(const FisherInstance& fisher, const Outcome& z);

std::vector<double> agent_utilities(const FisherInstance& fisher, const Allocation& alloc);
double welfare(const FisherInstance& fisher, const Allocation& alloc, Welfare psi);

} // namespace pdm
