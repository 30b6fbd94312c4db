#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace pdm {

enum class UtilityClass { Linear, Leontief, CobbDouglas, Ces, NestedLeontief };

std::string to_string(UtilityClass c);
UtilityClass utility_class_from_string(const std::string& s);

struct UtilitySpec;
using SpecPtr = std::shared_ptr<const UtilitySpec>;

/// Utility function of one agent.
///
/// Base classes (Linear, Leontief, CobbDouglas, Ces) carry one weight per
/// coordinate. A NestedLeontief spec takes the minimum over each group of
/// goods and feeds the group minima to a base-class outer spec.
struct UtilitySpec {
    UtilityClass cls = UtilityClass::Linear;
    std::vector<double> weights;
    double rho = 1.0;

    SpecPtr outer;
    std::vector<std::vector<std::size_t>> groups;
    std::size_t goods = 0;

    static UtilitySpec linear(std::vector<double> w);
    static UtilitySpec leontief(std::vector<double> w);
    static UtilitySpec cobb_douglas(std::vector<double> w);
    static UtilitySpec ces(std::vector<double> w, double rho);
    static UtilitySpec nested(UtilitySpec outer, std::vector<std::vector<std::size_t>> groups,
                              std::size_t goods);

    std::size_t dimension() const;
    bool is_nested() const { return cls == UtilityClass::NestedLeontief; }

    /// Outer spec for nested utilities, the spec itself otherwise.
    const UtilitySpec& base() const { return is_nested() ? *outer : *this; }

    /// Throws InvalidSpec if the spec breaks a structural invariant.
    void validate() const;
};

bool operator==(const UtilitySpec& a, const UtilitySpec& b);

/// u(x) for the spec. Throws DimensionMismatch or InvalidSpec.
double evaluate_utility(const UtilitySpec& spec, std::span<const double> x);

/// Collapses a NestedLeontief with a Leontief outer into a plain Leontief
/// over goods. Other specs are returned unchanged.
UtilitySpec simplify(const UtilitySpec& spec);

/// Cost of one unit of utility at the given prices (the expenditure
/// function at utility level 1). Used for the dual of the EG program.
double unit_expenditure(const UtilitySpec& spec, std::span<const double> prices);

} // namespace pdm
