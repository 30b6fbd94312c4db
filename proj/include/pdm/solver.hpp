#pragma once

#include "pdm/reduction.hpp"

#include <optional>

namespace pdm {

enum class PriceKind { PerGood, PerIssue, Personalized };

std::string to_string(PriceKind k);

struct SolveOptions {
    /// Target accuracy; the barrier is driven until its duality gap is
    /// below gap_factor * tol * (sum of budgets).
    double tol = 1e-8;
    double gap_factor = 1e-2;
    int max_newton = 4000;
};

struct SolveResult {
    bool converged = false;
    std::optional<Outcome> outcome;  // PDM solves
    Allocation allocation;           // Fisher solves: bundles over goods; PDM: public bundles
    std::vector<double> prices;      // PerGood (Fisher) or PerIssue multipliers (PDM)
    PriceKind price_kind = PriceKind::PerGood;
    double objective = 0.0;          // Nash welfare of the returned point
    int iterations = 0;              // Newton steps
    double stationarity = 0.0;       // inf-norm of the barrier gradient at the last center
    double feasibility = 0.0;        // largest constraint violation
    double gap = 0.0;                // duality gap bound of the final barrier problem
};

/// Maximizes budget-weighted Nash welfare over valid outcomes.
///
/// Log-barrier interior-point method on the concave program with variables
/// z^{j,0}, z^{j,1} and the validity rows z^{j,0} + z^{j,1} <= 1. Leontief
/// agents get an epigraph variable. Prices are the multipliers of the
/// validity rows. Any slack left on an issue is split evenly afterwards.
SolveResult solve_pdm_nash(const PdmInstance& pdm, const SolveOptions& opts = {});

/// Eisenberg-Gale program of a Fisher market. Nested utilities are solved
/// over one variable per (agent, group); Leontief outer specs over one
/// variable per agent. Prices are the supply-row multipliers.
SolveResult solve_fisher_eg(const FisherInstance& fisher, const SolveOptions& opts = {});

struct GridResult {
    Outcome outcome;
    double value = 0.0;
    std::size_t points = 0;
};

/// Exhaustive search over z^{j,0} in {0, 1/G, ..., 1} with z^{j,1} = 1 - z^{j,0}.
/// Throws GridTooLarge past max_points.
GridResult brute_force_max_welfare(const PdmInstance& pdm, Welfare psi, std::size_t grid,
                                   std::size_t max_points = 50'000'000);

/// For plain linear markets: p_l = max over holders i of B_i w_il / u_i(x_i),
/// where holders are agents with x_il > holder_tol. NaN if nobody holds l.
std::vector<double> linear_price_crosscheck(const FisherInstance& fisher, const Allocation& alloc,
                                            double holder_tol = 1e-6);

} // namespace pdm
