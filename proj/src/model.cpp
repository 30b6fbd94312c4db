#include "pdm/model.hpp"

#include "pdm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace pdm {

double PdmInstance::total_budget() const
{
    return std::accumulate(budgets.begin(), budgets.end(), 0.0);
}

std::vector<std::size_t> PdmInstance::side(std::size_t issue, int s) const
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < n; ++i)
        if (preferred[i][issue] == s)
            out.push_back(i);
    return out;
}

bool PdmInstance::unanimous(std::size_t issue) const
{
    for (std::size_t i = 1; i < n; ++i)
        if (preferred[i][issue] != preferred[0][issue])
            return false;
    return true;
}

void PdmInstance::validate() const
{
    if (n < 1 || m < 1)
        throw InvalidInstance("instance needs at least one agent and one issue");
    if (preferred.size() != n || budgets.size() != n || utilities.size() != n)
        throw InvalidInstance("per-agent arrays must have n entries");
    for (std::size_t i = 0; i < n; ++i) {
        if (preferred[i].size() != m)
            throw InvalidInstance("preference row " + std::to_string(i) + " must have m entries");
        for (int a : preferred[i])
            if (a != 0 && a != 1)
                throw InvalidInstance("preferred alternatives must be 0 or 1");
        if (!(budgets[i] > 0.0) || !std::isfinite(budgets[i]))
            throw InvalidInstance("budgets must be positive and finite");
        if (utilities[i].is_nested())
            throw InvalidInstance("instance utilities must be base classes");
        utilities[i].validate();
        if (utilities[i].dimension() != m)
            throw InvalidInstance("utility of agent " + std::to_string(i) + " has wrong dimension");
    }
}

bool operator==(const PdmInstance& a, const PdmInstance& b)
{
    return a.n == b.n && a.m == b.m && a.preferred == b.preferred && a.budgets == b.budgets &&
           a.utilities == b.utilities;
}

bool Outcome::valid() const
{
    for (const auto& p : z) {
        if (!(p[0] >= 0.0 && p[0] <= 1.0 && p[1] >= 0.0 && p[1] <= 1.0))
            return false;
        if (p[0] + p[1] > 1.0 + 1e-12)
            return false;
    }
    return true;
}

bool operator==(const Outcome& a, const Outcome& b)
{
    return a.z == b.z;
}

std::string to_string(Welfare w)
{
    switch (w) {
    case Welfare::Nash:
        return "nash";
    case Welfare::Utilitarian:
        return "utilitarian";
    case Welfare::Egalitarian:
        return "egalitarian";
    }
    return "unknown";
}

Welfare welfare_from_string(const std::string& s)
{
    if (s == "nash")
        return Welfare::Nash;
    if (s == "utilitarian")
        return Welfare::Utilitarian;
    if (s == "egalitarian")
        return Welfare::Egalitarian;
    throw InvalidSpec("unknown welfare function '" + s + "'");
}

Bundle public_bundle(const PdmInstance& pdm, const Outcome& z, std::size_t agent)
{
    if (agent >= pdm.n)
        throw DimensionMismatch("agent index out of range");
    if (z.size() != pdm.m)
        throw DimensionMismatch("outcome size does not match issue count");
    Bundle x(pdm.m);
    for (std::size_t j = 0; j < pdm.m; ++j)
        x[j] = z.z[j][pdm.preferred[agent][j]];
    return x;
}

double welfare_of(std::span<const double> utilities, std::span<const double> budgets, Welfare psi)
{
    if (utilities.size() != budgets.size())
        throw DimensionMismatch("utilities and budgets differ in length");
    switch (psi) {
    case Welfare::Nash: {
        double total = 0.0, acc = 0.0;
        for (std::size_t i = 0; i < utilities.size(); ++i) {
            if (utilities[i] <= 1e-300)
                return 0.0;
            acc += budgets[i] * std::log(utilities[i]);
            total += budgets[i];
        }
        return std::exp(acc / total);
    }
    case Welfare::Utilitarian:
        return std::accumulate(utilities.begin(), utilities.end(), 0.0);
    case Welfare::Egalitarian:
        return *std::min_element(utilities.begin(), utilities.end());
    }
    return 0.0;
}

std::vector<double> agent_utilities(const PdmInstance& pdm, const Outcome& z)
{
    std::vector<double> u(pdm.n);
    for (std::size_t i = 0; i < pdm.n; ++i)
        u[i] = evaluate_utility(pdm.utilities[i], public_bundle(pdm, z, i));
    return u;
}

double welfare(const PdmInstance& pdm, const Outcome& z, Welfare psi)
{
    const auto u = agent_utilities(pdm, z);
    return welfare_of(u, pdm.budgets, psi);
}

Outcome midpoint_outcome(const PdmInstance& pdm)
{
    Outcome z;
    z.z.assign(pdm.m, {0.5, 0.5});
    return z;
}

PdmInstance build_phi(std::size_t n, double w, UtilityClass cls, std::optional<double> rho)
{
    if (n < 2)
        throw InvalidInstance("the inefficiency family needs n >= 2");
    if (!(w >= 0.0) || !std::isfinite(w))
        throw InvalidInstance("w must be finite and nonnegative");
    if (cls == UtilityClass::NestedLeontief)
        throw UnsupportedClass("the inefficiency family uses base classes only");
    if (cls == UtilityClass::Ces && !rho)
        throw InvalidSpec("CES family requires rho");

    PdmInstance pdm;
    pdm.n = n;
    pdm.m = n;
    pdm.budgets.assign(n, 1.0);
    pdm.preferred.assign(n, std::vector<int>(n, 1));
    for (std::size_t i = 0; i < n; ++i) {
        pdm.preferred[i][i] = 0;
        std::vector<double> weights(n, 1.0);
        weights[i] = w;
        switch (cls) {
        case UtilityClass::Linear:
            pdm.utilities.push_back(UtilitySpec::linear(weights));
            break;
        case UtilityClass::Leontief:
            pdm.utilities.push_back(UtilitySpec::leontief(weights));
            break;
        case UtilityClass::CobbDouglas:
            pdm.utilities.push_back(UtilitySpec::cobb_douglas(weights));
            break;
        case UtilityClass::Ces:
            pdm.utilities.push_back(UtilitySpec::ces(weights, *rho));
            break;
        case UtilityClass::NestedLeontief:
            break;
        }
    }
    pdm.validate();
    return pdm;
}

std::uint64_t SplitMix::next()
{
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double SplitMix::uniform()
{
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

PdmInstance random_pdm(std::uint64_t seed, const RandomInstanceOptions& opts)
{
    static constexpr double kRhoMenu[] = {-2.0, -1.0, -0.5, 0.25, 0.5, 0.75};
    static constexpr UtilityClass kAll[] = {UtilityClass::Linear, UtilityClass::Leontief,
                                            UtilityClass::CobbDouglas, UtilityClass::Ces};
    if (opts.n_min < 1 || opts.n_max < opts.n_min || opts.m_min < 1 || opts.m_max < opts.m_min)
        throw InvalidInstance("bad size range for random instances");

    SplitMix rng(seed);
    PdmInstance pdm;
    pdm.n = opts.n_min + rng.below(opts.n_max - opts.n_min + 1);
    pdm.m = opts.m_min + rng.below(opts.m_max - opts.m_min + 1);
    pdm.preferred.assign(pdm.n, std::vector<int>(pdm.m, 0));
    for (auto& row : pdm.preferred)
        for (auto& a : row)
            a = static_cast<int>(rng.next() >> 63);
    for (std::size_t i = 0; i < pdm.n; ++i) {
        pdm.budgets.push_back(opts.unit_budgets ? 1.0 : rng.uniform(0.5, 2.0));
        std::vector<double> w(pdm.m);
        for (auto& v : w)
            v = rng.uniform(opts.weight_lo, opts.weight_hi);
        const UtilityClass cls = opts.classes.empty() ? kAll[rng.below(4)]
                                                      : opts.classes[rng.below(opts.classes.size())];
        switch (cls) {
        case UtilityClass::Linear:
            pdm.utilities.push_back(UtilitySpec::linear(w));
            break;
        case UtilityClass::Leontief:
            pdm.utilities.push_back(UtilitySpec::leontief(w));
            break;
        case UtilityClass::CobbDouglas:
            pdm.utilities.push_back(UtilitySpec::cobb_douglas(w));
            break;
        case UtilityClass::Ces:
            pdm.utilities.push_back(UtilitySpec::ces(w, kRhoMenu[rng.below(6)]));
            break;
        case UtilityClass::NestedLeontief:
            throw UnsupportedClass("random instances use base classes");
        }
    }
    pdm.validate();
    return pdm;
}

} // namespace pdm
