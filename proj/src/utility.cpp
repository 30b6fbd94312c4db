#include "pdm/utility.hpp"

#include "pdm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pdm {

std::string to_string(UtilityClass c)
{
    switch (c) {
    case UtilityClass::Linear:
        return "linear";
    case UtilityClass::Leontief:
        return "leontief";
    case UtilityClass::CobbDouglas:
        return "cobb_douglas";
    case UtilityClass::Ces:
        return "ces";
    case UtilityClass::NestedLeontief:
        return "nested_leontief";
    }
    return "unknown";
}

UtilityClass utility_class_from_string(const std::string& s)
{
    if (s == "linear")
        return UtilityClass::Linear;
    if (s == "leontief")
        return UtilityClass::Leontief;
    if (s == "cobb_douglas" || s == "cobb-douglas" || s == "cd")
        return UtilityClass::CobbDouglas;
    if (s == "ces")
        return UtilityClass::Ces;
    if (s == "nested_leontief")
        return UtilityClass::NestedLeontief;
    throw InvalidSpec("unknown utility class '" + s + "'");
}

UtilitySpec UtilitySpec::linear(std::vector<double> w)
{
    UtilitySpec s;
    s.cls = UtilityClass::Linear;
    s.weights = std::move(w);
    s.validate();
    return s;
}

UtilitySpec UtilitySpec::leontief(std::vector<double> w)
{
    UtilitySpec s;
    s.cls = UtilityClass::Leontief;
    s.weights = std::move(w);
    s.validate();
    return s;
}

UtilitySpec UtilitySpec::cobb_douglas(std::vector<double> w)
{
    UtilitySpec s;
    s.cls = UtilityClass::CobbDouglas;
    s.weights = std::move(w);
    s.validate();
    return s;
}

UtilitySpec UtilitySpec::ces(std::vector<double> w, double rho)
{
    UtilitySpec s;
    s.cls = UtilityClass::Ces;
    s.weights = std::move(w);
    s.rho = rho;
    s.validate();
    return s;
}

UtilitySpec UtilitySpec::nested(UtilitySpec outer, std::vector<std::vector<std::size_t>> groups,
                                std::size_t goods)
{
    UtilitySpec s;
    s.cls = UtilityClass::NestedLeontief;
    s.outer = std::make_shared<const UtilitySpec>(std::move(outer));
    s.groups = std::move(groups);
    s.goods = goods;
    s.validate();
    return s;
}

std::size_t UtilitySpec::dimension() const
{
    return is_nested() ? goods : weights.size();
}

void UtilitySpec::validate() const
{
    if (is_nested()) {
        if (!outer)
            throw InvalidSpec("nested spec without outer spec");
        if (outer->is_nested())
            throw InvalidSpec("outer spec of a nested spec must be a base class");
        outer->validate();
        if (outer->dimension() != groups.size())
            throw InvalidSpec("outer spec dimension must equal the number of groups");
        std::vector<char> seen(goods, 0);
        for (const auto& g : groups) {
            if (g.empty())
                throw InvalidSpec("nested spec with an empty group");
            for (std::size_t l : g) {
                if (l >= goods)
                    throw InvalidSpec("group index out of range");
                if (seen[l])
                    throw InvalidSpec("nested spec groups must be disjoint");
                seen[l] = 1;
            }
        }
        return;
    }
    if (weights.empty())
        throw InvalidSpec("utility spec without weights");
    bool positive = false;
    for (double w : weights) {
        if (!std::isfinite(w) || w < 0.0)
            throw InvalidSpec("weights must be finite and nonnegative");
        positive = positive || w > 0.0;
    }
    if (!positive)
        throw InvalidSpec("all-zero weights make the utility constant");
    if (cls == UtilityClass::Ces) {
        if (!std::isfinite(rho) || rho == 0.0 || rho > 1.0)
            throw InvalidSpec("CES rho must lie in (-inf,0) or (0,1]");
    }
}

bool operator==(const UtilitySpec& a, const UtilitySpec& b)
{
    if (a.cls != b.cls)
        return false;
    if (a.is_nested())
        return a.goods == b.goods && a.groups == b.groups && *a.outer == *b.outer;
    if (a.cls == UtilityClass::Ces && a.rho != b.rho)
        return false;
    return a.weights == b.weights;
}

namespace {

double eval_base(const UtilitySpec& s, std::span<const double> x)
{
    const auto& w = s.weights;
    const std::size_t d = w.size();
    switch (s.cls) {
    case UtilityClass::Linear: {
        double u = 0.0;
        for (std::size_t j = 0; j < d; ++j)
            u += w[j] * x[j];
        return u;
    }
    case UtilityClass::Leontief: {
        double u = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < d; ++j)
            if (w[j] != 0.0)
                u = std::min(u, x[j] / w[j]);
        return u;
    }
    case UtilityClass::CobbDouglas: {
        double total = 0.0;
        for (double v : w)
            total += v;
        double acc = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            if (w[j] == 0.0)
                continue;
            if (x[j] <= 0.0)
                return 0.0;
            acc += (w[j] / total) * std::log(x[j]);
        }
        return std::exp(acc);
    }
    case UtilityClass::Ces: {
        if (s.rho == 1.0) {
            double u = 0.0;
            for (std::size_t j = 0; j < d; ++j)
                u += w[j] * x[j];
            return u;
        }
        // Factor out an extreme term to keep the power sum in range.
        double scale = s.rho > 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < d; ++j) {
            if (w[j] == 0.0)
                continue;
            const double t = w[j] * x[j];
            if (s.rho < 0.0 && t <= 0.0)
                return 0.0;
            scale = s.rho > 0.0 ? std::max(scale, t) : std::min(scale, t);
        }
        if (scale <= 0.0)
            return 0.0;
        double sum = 0.0;
        for (std::size_t j = 0; j < d; ++j)
            if (w[j] != 0.0)
                sum += std::pow(w[j] * x[j] / scale, s.rho);
        return scale * std::pow(sum, 1.0 / s.rho);
    }
    case UtilityClass::NestedLeontief:
        break;
    }
    throw InvalidSpec("unexpected utility class");
}

} // namespace

double evaluate_utility(const UtilitySpec& spec, std::span<const double> x)
{
    if (x.size() != spec.dimension())
        throw DimensionMismatch("bundle has " + std::to_string(x.size()) + " entries, spec expects " +
                                std::to_string(spec.dimension()));
    if (!spec.is_nested())
        return eval_base(spec, x);
    std::vector<double> inner(spec.groups.size());
    for (std::size_t g = 0; g < spec.groups.size(); ++g) {
        double v = std::numeric_limits<double>::infinity();
        for (std::size_t l : spec.groups[g])
            v = std::min(v, x[l]);
        inner[g] = v;
    }
    return eval_base(*spec.outer, inner);
}

UtilitySpec simplify(const UtilitySpec& spec)
{
    if (!spec.is_nested() || spec.outer->cls != UtilityClass::Leontief)
        return spec;
    std::vector<double> w(spec.goods, 0.0);
    for (std::size_t g = 0; g < spec.groups.size(); ++g)
        for (std::size_t l : spec.groups[g])
            w[l] = spec.outer->weights[g];
    return UtilitySpec::leontief(std::move(w));
}

namespace {

double expenditure_base(const UtilitySpec& s, std::span<const double> p)
{
    const auto& w = s.weights;
    const std::size_t d = w.size();
    const double inf = std::numeric_limits<double>::infinity();
    UtilityClass cls = s.cls;
    if (cls == UtilityClass::Ces && s.rho == 1.0)
        cls = UtilityClass::Linear;
    switch (cls) {
    case UtilityClass::Linear: {
        double e = inf;
        for (std::size_t j = 0; j < d; ++j)
            if (w[j] > 0.0)
                e = std::min(e, p[j] / w[j]);
        return e;
    }
    case UtilityClass::Leontief: {
        double e = 0.0;
        for (std::size_t j = 0; j < d; ++j)
            e += w[j] * p[j];
        return e;
    }
    case UtilityClass::CobbDouglas: {
        double total = 0.0;
        for (double v : w)
            total += v;
        double acc = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            if (w[j] == 0.0)
                continue;
            if (p[j] <= 0.0)
                return 0.0;
            const double a = w[j] / total;
            acc += a * (std::log(p[j]) - std::log(a));
        }
        return std::exp(acc);
    }
    case UtilityClass::Ces: {
        const double sigma = 1.0 / (1.0 - s.rho);
        const double q = 1.0 - sigma;
        double sum = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            if (w[j] == 0.0)
                continue;
            if (p[j] <= 0.0) {
                if (q < 0.0)
                    return 0.0;
                continue;
            }
            sum += std::pow(p[j] / w[j], q);
        }
        return std::pow(sum, 1.0 / q);
    }
    case UtilityClass::NestedLeontief:
        break;
    }
    throw InvalidSpec("unexpected utility class");
}

} // namespace

double unit_expenditure(const UtilitySpec& spec, std::span<const double> prices)
{
    if (prices.size() != spec.dimension())
        throw DimensionMismatch("price vector does not match spec dimension");
    if (!spec.is_nested())
        return expenditure_base(spec, prices);
    std::vector<double> group_prices(spec.groups.size(), 0.0);
    for (std::size_t g = 0; g < spec.groups.size(); ++g)
        for (std::size_t l : spec.groups[g])
            group_prices[g] += prices[l];
    return expenditure_base(*spec.outer, group_prices);
}

} // namespace pdm
