#pragma once

#include "pdm/model.hpp"

#include <doctest.h>

#include <cmath>

namespace pdm::test {

inline Bundle random_bundle(SplitMix& rng, std::size_t d, double hi = 1.0)
{
    Bundle x(d);
    for (double& v : x)
        v = rng.uniform(0.0, hi);
    return x;
}

inline std::vector<double> random_weights(SplitMix& rng, std::size_t d)
{
    std::vector<double> w(d);
    for (double& v : w)
        v = rng.uniform(0.1, 2.0);
    return w;
}

/// One spec of every base class over d coordinates.
inline std::vector<UtilitySpec> base_specs(SplitMix& rng, std::size_t d)
{
    return {UtilitySpec::linear(random_weights(rng, d)), UtilitySpec::leontief(random_weights(rng, d)),
            UtilitySpec::cobb_douglas(random_weights(rng, d)), UtilitySpec::ces(random_weights(rng, d), 0.5),
            UtilitySpec::ces(random_weights(rng, d), -1.0), UtilitySpec::ces(random_weights(rng, d), -3.0)};
}

inline bool close(double a, double b, double rel, double abs = 0.0)
{
    return std::abs(a - b) <= abs + rel * std::max(std::abs(a), std::abs(b));
}

inline double dot(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k)
        s += a[k] * b[k];
    return s;
}

/// Single-issue instance with the given sides, linear unit weights, unit budgets.
inline PdmInstance single_issue(const std::vector<int>& sides)
{
    PdmInstance p;
    p.n = sides.size();
    p.m = 1;
    for (int a : sides) {
        p.preferred.push_back({a});
        p.budgets.push_back(1.0);
        p.utilities.push_back(UtilitySpec::linear({1.0}));
    }
    p.validate();
    return p;
}

} // namespace pdm::test
