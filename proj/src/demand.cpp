#include "pdm/demand.hpp"

#include "pdm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pdm {

namespace {

// Sets x_j = min(cap, K g_j) for j in goods with K chosen so that the
// spending sum p_j x_j equals budget, or caps everything if that is cheaper.
void waterfill(const std::vector<std::size_t>& goods, const std::vector<double>& g,
               std::span<const double> p, double cap, double budget, Bundle& x)
{
    if (goods.empty())
        return;
    if (std::isinf(cap)) {
        double den = 0.0;
        for (std::size_t j : goods)
            den += p[j] * g[j];
        const double k = budget / den;
        for (std::size_t j : goods)
            x[j] = k * g[j];
        return;
    }
    double full = 0.0;
    for (std::size_t j : goods)
        full += p[j] * cap;
    if (full <= budget) {
        for (std::size_t j : goods)
            x[j] = cap;
        return;
    }
    std::vector<std::size_t> order = goods;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return cap / g[a] < cap / g[b]; });
    std::vector<double> suffix(order.size() + 1, 0.0);
    for (std::size_t r = order.size(); r-- > 0;)
        suffix[r] = suffix[r + 1] + p[order[r]] * g[order[r]];

    double capped_cost = 0.0;
    double k = 0.0;
    std::size_t r = 0;
    for (; r < order.size(); ++r) {
        const double tau = cap / g[order[r]];
        if (capped_cost + tau * suffix[r] >= budget) {
            k = (budget - capped_cost) / suffix[r];
            break;
        }
        capped_cost += p[order[r]] * cap;
    }
    for (std::size_t q = 0; q < order.size(); ++q)
        x[order[q]] = q < r ? cap : std::min(cap, k * g[order[q]]);
}

void check_prices(std::span<const double> p)
{
    for (double v : p)
        if (!std::isfinite(v) || v < 0.0)
            throw InvalidInstance("prices must be finite and nonnegative");
}

// Desired free goods get the cap; returns the desired goods with p > 0.
std::vector<std::size_t> split_free(const std::vector<double>& w, std::span<const double> p, double cap,
                                    Bundle& x)
{
    std::vector<std::size_t> priced;
    for (std::size_t j = 0; j < w.size(); ++j) {
        if (w[j] <= 0.0)
            continue;
        if (p[j] > 0.0) {
            priced.push_back(j);
            continue;
        }
        if (std::isinf(cap))
            throw UnboundedDemand("desired good " + std::to_string(j) + " is free and no ceiling is set");
        x[j] = cap;
    }
    return priced;
}

Bundle demand_linear(const std::vector<double>& w, double budget, std::span<const double> p, double cap)
{
    Bundle x(w.size(), 0.0);
    auto priced = split_free(w, p, cap, x);
    std::stable_sort(priced.begin(), priced.end(),
                     [&](std::size_t a, std::size_t b) { return w[a] / p[a] > w[b] / p[b]; });
    std::vector<double> g(w.size(), 0.0);
    for (std::size_t j : priced)
        g[j] = 1.0 / p[j];
    double left = budget;
    std::size_t at = 0;
    while (at < priced.size() && left > 0.0) {
        const double lead = w[priced[at]] / p[priced[at]];
        std::vector<std::size_t> tie;
        while (at < priced.size() && w[priced[at]] / p[priced[at]] >= lead * (1.0 - 1e-12))
            tie.push_back(priced[at++]);
        double full = 0.0;
        for (std::size_t j : tie)
            full += p[j] * cap;
        if (full <= left) {
            for (std::size_t j : tie)
                x[j] = cap;
            left -= full;
        } else {
            waterfill(tie, g, p, cap, left, x);
            left = 0.0;
        }
    }
    return x;
}

Bundle demand_cobb_douglas(const std::vector<double>& w, double budget, std::span<const double> p,
                           double cap)
{
    Bundle x(w.size(), 0.0);
    const auto priced = split_free(w, p, cap, x);
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    std::vector<double> g(w.size(), 0.0);
    for (std::size_t j : priced)
        g[j] = (w[j] / total) / p[j];
    waterfill(priced, g, p, cap, budget, x);
    return x;
}

Bundle demand_ces(const std::vector<double>& w, double rho, double budget, std::span<const double> p,
                  double cap)
{
    Bundle x(w.size(), 0.0);
    const auto priced = split_free(w, p, cap, x);
    // Stationarity gives x_j proportional to (w_j^rho / p_j)^(1/(1-rho)).
    const double sigma = 1.0 / (1.0 - rho);
    std::vector<double> g(w.size(), 0.0);
    for (std::size_t j : priced)
        g[j] = std::exp(sigma * (rho * std::log(w[j]) - std::log(p[j])));
    waterfill(priced, g, p, cap, budget, x);
    return x;
}

Bundle demand_leontief(const std::vector<double>& w, double budget, std::span<const double> p, double cap)
{
    double rate = 0.0;
    double level_cap = kNoCeiling;
    for (std::size_t j = 0; j < w.size(); ++j) {
        if (w[j] <= 0.0)
            continue;
        rate += w[j] * p[j];
        level_cap = std::min(level_cap, cap / w[j]);
    }
    double level = 0.0;
    if (rate > 0.0)
        level = std::min(budget / rate, level_cap);
    else if (std::isinf(level_cap))
        throw UnboundedDemand("every desired good is free and no ceiling is set");
    else
        level = level_cap;
    Bundle x(w.size(), 0.0);
    for (std::size_t j = 0; j < w.size(); ++j)
        if (w[j] > 0.0)
            x[j] = w[j] * level;
    return x;
}

Bundle demand_base(const UtilitySpec& s, double budget, std::span<const double> p, double cap)
{
    switch (s.cls) {
    case UtilityClass::Linear:
        return demand_linear(s.weights, budget, p, cap);
    case UtilityClass::Leontief:
        return demand_leontief(s.weights, budget, p, cap);
    case UtilityClass::CobbDouglas:
        return demand_cobb_douglas(s.weights, budget, p, cap);
    case UtilityClass::Ces:
        if (s.rho == 1.0)
            return demand_linear(s.weights, budget, p, cap);
        return demand_ces(s.weights, s.rho, budget, p, cap);
    case UtilityClass::NestedLeontief:
        break;
    }
    throw InvalidSpec("unexpected utility class");
}

} // namespace

Bundle demand(const UtilitySpec& spec, double budget, std::span<const double> prices, double ceiling)
{
    if (prices.size() != spec.dimension())
        throw DimensionMismatch("price vector does not match spec dimension");
    if (!(budget > 0.0))
        throw InvalidInstance("budget must be positive");
    if (!(ceiling >= 1.0))
        throw InvalidInstance("ceiling must be at least 1");
    check_prices(prices);
    if (!spec.is_nested())
        return demand_base(spec, budget, prices, ceiling);

    // Matching amounts across a group is the cheapest way to raise its
    // minimum, so a group trades as one good priced at the group sum.
    std::vector<double> group_prices(spec.groups.size(), 0.0);
    for (std::size_t g = 0; g < spec.groups.size(); ++g)
        for (std::size_t l : spec.groups[g])
            group_prices[g] += prices[l];
    const Bundle v = demand_base(*spec.outer, budget, group_prices, ceiling);
    Bundle x(spec.goods, 0.0);
    for (std::size_t g = 0; g < spec.groups.size(); ++g)
        for (std::size_t l : spec.groups[g])
            x[l] = v[g];
    return x;
}

Bundle demand_reduced(const FisherInstance& fisher, std::size_t agent, std::span<const double> prices,
                      double ceiling)
{
    fisher.require_provenance();
    const auto personal = project_prices(fisher, prices);
    const PdmInstance& pdm = *fisher.source;
    const Bundle y = demand(pdm.utilities.at(agent), pdm.budgets[agent], personal[agent], ceiling);
    return lift_bundle(fisher, agent, y);
}

} // namespace pdm
