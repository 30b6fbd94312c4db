#include "pdm/checkers.hpp"

#include "pdm/demand.hpp"
#include "pdm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pdm {

void EquilibriumReport::add(std::string name, double residual, double threshold, bool ok)
{
    conditions.push_back({std::move(name), residual, threshold, ok});
    pass = pass && ok;
}

void EquilibriumReport::add_le(std::string name, double residual, double threshold)
{
    add(std::move(name), residual, threshold, residual <= threshold);
}

const Condition* EquilibriumReport::find(const std::string& name) const
{
    for (const auto& c : conditions)
        if (c.name == name)
            return &c;
    return nullptr;
}

namespace {

double dot(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k)
        s += a[k] * b[k];
    return s;
}

std::string indexed(const char* name, std::size_t i)
{
    return std::string(name) + "[" + std::to_string(i) + "]";
}

// Value-certified demand membership plus affordability for one agent.
// Returns the affordability residual.
double check_agent(EquilibriumReport& rep, std::size_t agent, const UtilitySpec& spec, double budget,
                   std::span<const double> prices, std::span<const double> bundle, double tol, double ceiling)
{
    const double have = evaluate_utility(spec, bundle);
    const double best = evaluate_utility(spec, demand(spec, budget, prices, ceiling));
    rep.add_le(indexed("demand", agent), best - have, tol * (1.0 + std::abs(best)));
    return dot(bundle, prices) - budget;
}

double min_entry(const Allocation& alloc)
{
    double lo = 0.0;
    for (const auto& b : alloc)
        for (double v : b)
            lo = std::min(lo, v);
    return lo;
}

void check_shape(const Allocation& alloc, std::size_t agents, std::size_t width, std::size_t prices)
{
    if (alloc.size() != agents)
        throw DimensionMismatch("allocation needs one bundle per agent");
    for (const auto& b : alloc)
        if (b.size() != width)
            throw DimensionMismatch("bundle width does not match the index space");
    if (prices != width)
        throw DimensionMismatch("price vector width does not match the index space");
}

std::vector<double> column_sums(const Allocation& alloc, std::size_t width)
{
    std::vector<double> s(width, 0.0);
    for (const auto& b : alloc)
        for (std::size_t l = 0; l < width; ++l)
            s[l] += b[l];
    return s;
}

} // namespace

EquilibriumReport check_me(const FisherInstance& fisher, const Allocation& alloc, std::span<const double> prices,
                           double tol, double ceiling)
{
    const std::size_t goods = fisher.good_count();
    check_shape(alloc, fisher.n, goods, prices.size());
    EquilibriumReport rep;
    double afford = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < fisher.n; ++i)
        afford = std::max(afford, check_agent(rep, i, fisher.utilities[i], fisher.budgets[i], prices, alloc[i], tol,
                                              ceiling));
    rep.add_le("affordability", afford, tol);
    rep.add_le("nonnegativity", -min_entry(alloc), tol);
    const auto sums = column_sums(alloc, goods);
    double over = -std::numeric_limits<double>::infinity(), under = 0.0;
    for (std::size_t l = 0; l < goods; ++l) {
        over = std::max(over, sums[l] - 1.0);
        if (prices[l] > tol)
            under = std::max(under, 1.0 - sums[l]);
    }
    rep.add_le("supply", goods ? over : 0.0, tol);
    rep.add_le("clearing", under, tol);
    return rep;
}

EquilibriumReport check_ime(const PdmInstance& pdm, const Allocation& y, std::span<const double> prices, double tol,
                            double ceiling)
{
    pdm.validate();
    check_shape(y, pdm.n, pdm.m, prices.size());
    bool all_linear = true;
    for (const auto& u : pdm.utilities) {
        const bool linear = u.cls == UtilityClass::Linear || (u.cls == UtilityClass::Ces && u.rho == 1.0);
        if (!linear && u.cls != UtilityClass::CobbDouglas && u.cls != UtilityClass::Ces)
            throw UnsupportedClass("issue-pricing check supports linear, Cobb-Douglas and CES agents");
        all_linear = all_linear && linear;
    }
    if (all_linear)
        return check_me(identical_weights_market(pdm), y, prices, tol, ceiling);

    EquilibriumReport rep;
    // Public bundle of agent i on issue j: total purchased by i's side.
    auto public_amount = [&](std::size_t i, std::size_t j) {
        double s = 0.0;
        for (std::size_t k = 0; k < pdm.n; ++k)
            if (pdm.preferred[k][j] == pdm.preferred[i][j])
                s += y[k][j];
        return s;
    };
    double afford = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pdm.n; ++i) {
        const UtilitySpec& u = pdm.utilities[i];
        const bool linear = u.cls == UtilityClass::Linear || (u.cls == UtilityClass::Ces && u.rho == 1.0);
        if (linear) {
            afford = std::max(afford, check_agent(rep, i, u, pdm.budgets[i], prices, y[i], tol, ceiling));
            continue;
        }
        const double rho = u.cls == UtilityClass::Ces ? u.rho : 0.0;
        std::vector<double> ratio(pdm.m, std::numeric_limits<double>::infinity());
        double lowest = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < pdm.m; ++j) {
            if (u.weights[j] <= 0.0)
                continue;
            const double x = public_amount(i, j);
            ratio[j] = std::pow(x, 1.0 - rho) * prices[j] / std::pow(u.weights[j], rho);
            lowest = std::min(lowest, ratio[j]);
        }
        double gap = 0.0;
        for (std::size_t j = 0; j < pdm.m; ++j)
            if (y[i][j] > tol)
                gap = std::max(gap, ratio[j] - lowest);
        rep.add_le(indexed("stationarity", i), gap, tol * (1.0 + std::abs(lowest)));
        const double spent = dot(y[i], prices);
        rep.add_le(indexed("budget", i), std::abs(spent - pdm.budgets[i]), tol);
    }
    if (afford > -std::numeric_limits<double>::infinity())
        rep.add_le("affordability", afford, tol);
    rep.add_le("nonnegativity", -min_entry(y), tol);
    const auto sums = column_sums(y, pdm.m);
    double over = -std::numeric_limits<double>::infinity(), under = 0.0;
    for (std::size_t j = 0; j < pdm.m; ++j) {
        over = std::max(over, sums[j] - 1.0);
        if (prices[j] > tol)
            under = std::max(under, 1.0 - sums[j]);
    }
    rep.add_le("supply", over, tol);
    rep.add_le("clearing", under, tol);
    return rep;
}

namespace {

void check_personal_shape(const PdmInstance& pdm, const Allocation& y, const PersonalPrices& p)
{
    if (y.size() != pdm.n || p.size() != pdm.n)
        throw DimensionMismatch("bundles and prices need one row per agent");
    for (std::size_t i = 0; i < pdm.n; ++i)
        if (y[i].size() != pdm.m || p[i].size() != pdm.m)
            throw DimensionMismatch("bundle and price rows need one entry per issue");
}

// Witness z^{j,0}: pinned by positively priced agents when there are any,
// otherwise the largest side-0 purchase.
double witness_z0(const PdmInstance& pdm, const Allocation& y, const PersonalPrices& p, std::size_t j, double tol)
{
    double pinned0 = -1.0, pinned1 = -1.0, max0 = 0.0;
    for (std::size_t i = 0; i < pdm.n; ++i) {
        const double v = y[i][j];
        if (pdm.preferred[i][j] == 0) {
            max0 = std::max(max0, v);
            if (p[i][j] > tol)
                pinned0 = std::max(pinned0, v);
        } else if (p[i][j] > tol) {
            pinned1 = std::max(pinned1, v);
        }
    }
    if (pinned0 >= 0.0)
        return pinned0;
    if (pinned1 >= 0.0)
        return 1.0 - pinned1;
    return max0;
}

} // namespace

EquilibriumReport check_pme(const PdmInstance& pdm, const Allocation& y, const PersonalPrices& prices, double tol,
                            double ceiling)
{
    pdm.validate();
    check_personal_shape(pdm, y, prices);
    EquilibriumReport rep;
    double afford = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pdm.n; ++i)
        afford = std::max(afford,
                          check_agent(rep, i, pdm.utilities[i], pdm.budgets[i], prices[i], y[i], tol, ceiling));
    rep.add_le("affordability", afford, tol);
    rep.add_le("nonnegativity", -min_entry(y), tol);

    Outcome z;
    z.z.resize(pdm.m);
    double range = 0.0, upper = 0.0, equality = 0.0;
    for (std::size_t j = 0; j < pdm.m; ++j) {
        const double z0 = witness_z0(pdm, y, prices, j, tol);
        range = std::max({range, z0 - 1.0, -z0});
        const double c0 = std::clamp(z0, 0.0, 1.0);
        z.z[j] = {c0, 1.0 - c0};
        for (std::size_t i = 0; i < pdm.n; ++i) {
            const double side = z.z[j][pdm.preferred[i][j]];
            upper = std::max(upper, y[i][j] - side);
            if (prices[i][j] > tol)
                equality = std::max(equality, std::abs(y[i][j] - side));
        }
    }
    rep.add_le("witness_valid", range, tol);
    rep.add_le("witness_upper", upper, tol);
    rep.add_le("witness_equality", equality, tol);
    rep.witness = std::move(z);
    return rep;
}

EquilibriumReport check_delta_eq(const FisherInstance& fisher, const Allocation& alloc,
                                 std::span<const double> prices, double delta, double tol, double ceiling)
{
    if (!(delta >= 0.0))
        throw InvalidInstance("delta must be nonnegative");
    const std::size_t goods = fisher.good_count();
    check_shape(alloc, fisher.n, goods, prices.size());
    EquilibriumReport rep;
    double afford = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < fisher.n; ++i)
        afford = std::max(afford, check_agent(rep, i, fisher.utilities[i], fisher.budgets[i], prices, alloc[i], tol,
                                              ceiling));
    rep.add_le("affordability", afford, tol);
    rep.add_le("nonnegativity", -min_entry(alloc), tol);
    const auto sums = column_sums(alloc, goods);
    // Strict inequality: a triggered good needs sum > 1 - delta.
    bool under_ok = true;
    double under = 0.0, over = 0.0;
    for (std::size_t l = 0; l < goods; ++l) {
        over = std::max(over, sums[l] - 1.0);
        if (prices[l] > delta) {
            under = std::max(under, 1.0 - sums[l]);
            under_ok = under_ok && sums[l] > 1.0 - delta;
        }
    }
    rep.add("undersell", under, delta, under_ok);
    rep.add_le("oversell", over, delta);
    return rep;
}

EquilibriumReport check_delta_pme(const PdmInstance& pdm, const Allocation& y, const PersonalPrices& prices,
                                  double delta, double tol, double ceiling)
{
    if (!(delta >= 0.0))
        throw InvalidInstance("delta must be nonnegative");
    pdm.validate();
    check_personal_shape(pdm, y, prices);
    EquilibriumReport rep;
    double afford = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pdm.n; ++i)
        afford = std::max(afford,
                          check_agent(rep, i, pdm.utilities[i], pdm.budgets[i], prices[i], y[i], tol, ceiling));
    rep.add_le("affordability", afford, tol);
    rep.add_le("nonnegativity", -min_entry(y), tol);

    const double trigger = static_cast<double>(pdm.n) * delta;
    Outcome z;
    z.z.resize(pdm.m);
    double total = 0.0, upper = 0.0, lower = 0.0;
    bool lower_ok = true;
    for (std::size_t j = 0; j < pdm.m; ++j) {
        double z0 = 0.0;
        for (std::size_t i = 0; i < pdm.n; ++i)
            if (pdm.preferred[i][j] == 0)
                z0 = std::max(z0, y[i][j]);
        const double z1 = std::max(1.0 - z0, 0.0);
        z.z[j] = {z0, z1};
        total = std::max(total, z0 + z1 - 1.0);
        for (std::size_t i = 0; i < pdm.n; ++i) {
            const double side = z.z[j][pdm.preferred[i][j]];
            upper = std::max(upper, y[i][j] - side);
            if (prices[i][j] > trigger) {
                lower = std::max(lower, side - y[i][j]);
                lower_ok = lower_ok && y[i][j] > side - delta;
            }
        }
    }
    rep.add_le("witness_total", total, delta);
    rep.add_le("witness_upper", upper, delta);
    rep.add("witness_lower", lower, delta, lower_ok);
    rep.witness = std::move(z);
    return rep;
}

LindahlPrices lindahl_from_personal(const PdmInstance& pdm, const PersonalPrices& p)
{
    LindahlPrices out(pdm.n, std::vector<std::array<double, 2>>(pdm.m, {0.0, 0.0}));
    for (std::size_t i = 0; i < pdm.n; ++i)
        for (std::size_t j = 0; j < pdm.m; ++j)
            out[i][j][pdm.preferred[i][j]] = p.at(i).at(j);
    return out;
}

EquilibriumReport check_lindahl(const PdmInstance& pdm, const Outcome& z, const LindahlPrices& prices, double tol,
                                double ceiling)
{
    pdm.validate();
    if (z.size() != pdm.m || prices.size() != pdm.n)
        throw DimensionMismatch("outcome or prices do not match the instance");
    EquilibriumReport rep;
    double afford = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pdm.n; ++i) {
        if (prices[i].size() != pdm.m)
            throw DimensionMismatch("price rows need one entry per issue");
        // The agent never pays for the non-preferred side, so the best
        // choice is the demand at own-side prices.
        std::vector<double> own(pdm.m);
        double cost = 0.0;
        for (std::size_t j = 0; j < pdm.m; ++j) {
            own[j] = prices[i][j][pdm.preferred[i][j]];
            cost += prices[i][j][0] * z.z[j][0] + prices[i][j][1] * z.z[j][1];
        }
        const Bundle x = public_bundle(pdm, z, i);
        const double have = evaluate_utility(pdm.utilities[i], x);
        const double best = evaluate_utility(pdm.utilities[i], demand(pdm.utilities[i], pdm.budgets[i], own, ceiling));
        rep.add_le(indexed("agent", i), best - have, tol * (1.0 + std::abs(best)));
        afford = std::max(afford, cost - pdm.budgets[i]);
    }
    rep.add_le("affordability", afford, tol);

    double feasible = 0.0, profit = 0.0, balance = 0.0;
    for (std::size_t j = 0; j < pdm.m; ++j) {
        const double z0 = z.z[j][0], z1 = z.z[j][1];
        feasible = std::max({feasible, z0 + z1 - 1.0, -z0, -z1});
        double side[2] = {0.0, 0.0};
        for (std::size_t i = 0; i < pdm.n; ++i) {
            side[0] += prices[i][j][0];
            side[1] += prices[i][j][1];
        }
        profit = std::max(profit, std::max(side[0], side[1]) - (side[0] * z0 + side[1] * z1));
        if (!pdm.unanimous(j))
            balance = std::max(balance, std::abs(side[0] - side[1]));
    }
    rep.add_le("feasibility", feasible, tol);
    rep.add_le("producer_profit", profit, tol);
    rep.add_le("side_balance", balance, tol);
    return rep;
}

std::vector<std::array<double, 2>> pme_witness_range(const PdmInstance& pdm, const Allocation& y,
                                                     const PersonalPrices& prices, double tol)
{
    check_personal_shape(pdm, y, prices);
    std::vector<std::array<double, 2>> out(pdm.m);
    for (std::size_t j = 0; j < pdm.m; ++j) {
        bool pinned = false;
        double lo = 0.0, hi = 1.0;
        for (std::size_t i = 0; i < pdm.n; ++i) {
            const double v = y[i][j];
            if (pdm.preferred[i][j] == 0) {
                lo = std::max(lo, v);
            } else {
                hi = std::min(hi, 1.0 - v);
            }
            pinned = pinned || prices[i][j] > tol;
        }
        if (pinned) {
            const double at = std::clamp(witness_z0(pdm, y, prices, j, tol), 0.0, 1.0);
            out[j] = {at, at};
        } else {
            out[j] = {lo, hi};
        }
    }
    return out;
}

} // namespace pdm
