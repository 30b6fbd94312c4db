#pragma once

#include "pdm/reduction.hpp"

#include <limits>

namespace pdm {

/// Passing this as the ceiling disables the per-good cap.
inline constexpr double kNoCeiling = std::numeric_limits<double>::infinity();

/// One utility-maximizing affordable bundle with every entry capped at
/// `ceiling`. Ties in linear demand split spending equally among the goods
/// with the best bang-per-buck.
///
/// Throws UnboundedDemand if the ceiling is disabled and a desired good is
/// free, DimensionMismatch on size errors.
Bundle demand(const UtilitySpec& spec, double budget, std::span<const double> prices,
              double ceiling = 1.0);

/// PDM demand of `agent` at the projected prices R^{-1}(p)_i, lifted by R.
Bundle demand_reduced(const FisherInstance& fisher, std::size_t agent, std::span<const double> prices,
                      double ceiling = 1.0);

} // namespace pdm
