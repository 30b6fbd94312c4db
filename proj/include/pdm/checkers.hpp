#pragma once

#include "pdm/reduction.hpp"

#include <array>
#include <optional>
#include <string>

namespace pdm {

inline constexpr double kDefaultCheckTol = 1e-6;

struct Condition {
    std::string name;
    double residual = 0.0;
    double threshold = 0.0;
    bool pass = true;
};

struct EquilibriumReport {
    bool pass = true;
    std::vector<Condition> conditions;
    std::optional<Outcome> witness;

    void add(std::string name, double residual, double threshold, bool pass);
    /// Adds a condition that passes when residual <= threshold.
    void add_le(std::string name, double residual, double threshold);
    const Condition* find(const std::string& name) const;
};

/// Per-agent per-issue per-side prices, indexed [agent][issue][side].
using LindahlPrices = std::vector<std::vector<std::array<double, 2>>>;

/// Fisher market equilibrium: demand optimality by value, affordability,
/// supply (sum <= 1 + tol) and clearing of positively priced goods.
EquilibriumReport check_me(const FisherInstance& fisher, const Allocation& alloc, std::span<const double> prices,
                           double tol = kDefaultCheckTol, double ceiling = 1.0);

/// Issue-pricing equilibrium for private bundles y. All-linear instances
/// are checked as a Fisher market with identical weights. Cobb-Douglas and
/// CES agents are checked through the stationarity condition on the public
/// bundle (x_ij^c p_j / w_ij^{rho} minimal on purchased issues, c = 1 - rho,
/// rho = 0 for Cobb-Douglas) and budget exhaustion. Leontief agents raise
/// UnsupportedClass.
EquilibriumReport check_ime(const PdmInstance& pdm, const Allocation& y, std::span<const double> prices,
                            double tol = kDefaultCheckTol, double ceiling = 1.0);

/// Personalized-price equilibrium with a witness outcome.
EquilibriumReport check_pme(const PdmInstance& pdm, const Allocation& y, const PersonalPrices& prices,
                            double tol = kDefaultCheckTol, double ceiling = 1.0);

/// delta-equilibrium of a Fisher market. `tol` certifies demand membership.
EquilibriumReport check_delta_eq(const FisherInstance& fisher, const Allocation& alloc,
                                 std::span<const double> prices, double delta, double tol = kDefaultCheckTol,
                                 double ceiling = 1.0);

/// delta-approximate personalized-price equilibrium; witness
/// z^{j,0} = max side-0 y_ij, z^{j,1} = max(1 - z^{j,0}, 0).
EquilibriumReport check_delta_pme(const PdmInstance& pdm, const Allocation& y, const PersonalPrices& prices,
                                  double delta, double tol = kDefaultCheckTol, double ceiling = 1.0);

/// Lindahl conditions: agent optimality and affordability under personal
/// side prices, producer profit optimality, and side-price balance on
/// contested issues.
EquilibriumReport check_lindahl(const PdmInstance& pdm, const Outcome& z, const LindahlPrices& prices,
                                double tol = kDefaultCheckTol, double ceiling = 1.0);

/// Puts p_ij on agent i's preferred side of issue j and 0 on the other.
LindahlPrices lindahl_from_personal(const PdmInstance& pdm, const PersonalPrices& p);

/// Range [lo, hi] of z^{j,0} values admissible as PME witness for issue j
/// (z^{j,1} = 1 - z^{j,0}). Empty range when lo > hi.
std::vector<std::array<double, 2>> pme_witness_range(const PdmInstance& pdm, const Allocation& y,
                                                     const PersonalPrices& prices, double tol);

} // namespace pdm
