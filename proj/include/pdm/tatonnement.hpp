#pragma once

#include "pdm/checkers.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>

namespace pdm {

struct TatonnementConfig {
    std::size_t max_iters = 200'000;
    /// eta_t = step_scale / t.
    double step_scale = 1.0;
    /// Price box [p_min, p_max] per good.
    double p_min = 1e-3;
    double p_max = 2.0;
    /// Starting prices; empty means every good starts at initial_price.
    std::vector<double> initial_prices;
    double initial_price = 1.0;
    /// Zero-mean Gaussian noise added to each aggregate demand per step.
    double noise_variance = 0.0;
    /// Constant bias added to each aggregate demand per step.
    double bias = 0.0;
    std::uint64_t seed = 0;
    /// Target for the Fisher-side delta-equilibrium check.
    double delta = 0.05;
    /// Value tolerance certifying demand-set membership in the checks.
    double membership_tol = 1e-6;
    /// The stopping check runs every check_every steps.
    std::size_t check_every = 10;
    /// When positive, the check also tries the mean demand over the last
    /// average_blocks * check_every steps as the candidate allocation.
    std::size_t average_blocks = 10;
    /// Record every trace_every-th step; 0 records only the final state.
    std::size_t trace_every = 1000;
    /// Raise a good's floor when its demand saturates the ceiling at the
    /// floor, lower it when a floored good goes unsold.
    bool adaptive_box = false;
    double ceiling = 1.0;

    void validate() const;
};

struct TraceRecord {
    std::size_t t = 0;
    std::vector<double> prices;
    std::vector<double> demand;  // aggregate, noise-free
    double dual = 0.0;           // EG dual objective at prices
    double excess_norm = 0.0;    // inf-norm of 1 - demand
};

struct TatonnementTrace {
    std::vector<TraceRecord> records;
    std::vector<double> prices;      // final
    std::vector<double> floors;      // final per-good lower bounds
    Allocation allocation;           // candidate allocation at the final prices
    bool averaged = false;           // allocation is the window mean
    std::size_t iterations = 0;
    bool converged = false;
    std::string stop_reason;         // "delta" or "max_iters"
    EquilibriumReport report;        // delta-equilibrium check of (allocation, prices)
};

struct LiftedResult {
    TatonnementTrace hidden;     // hidden Fisher market run
    PersonalPrices prices;       // R^{-1} of the final hidden prices
    Allocation bundles;          // PDM bundles matching hidden.allocation
    double pme_delta = 0.0;      // 3 * delta
    EquilibriumReport report;    // delta-PME check at pme_delta, with witness
};

/// 1 - sum_i D_i(p), with demands capped at `ceiling`.
std::vector<double> dual_gradient(const FisherInstance& fisher, std::span<const double> prices,
                                  double ceiling = 1.0);

/// EG dual phi(p) = sum_l p_l + sum_i B_i (log B_i - log e_i(p) - 1), with
/// e_i the unit expenditure function. Its gradient is the uncapped excess supply.
double dual_objective(const FisherInstance& fisher, std::span<const double> prices);

/// Projected update p <- [p - eta_t (1 - D~(p))] on the price box. Stops at
/// max_iters or at the first check where the delta-equilibrium check passes.
TatonnementTrace run_fisher_tatonnement(const FisherInstance& fisher, const TatonnementConfig& config);

/// The same dynamics on the hidden market reduce_instance(pdm), where each
/// step prices the PDM by R^{-1}(p), asks for PDM demands and lifts them.
/// The final state is checked as a 3 delta PME.
LiftedResult run_lifted_tatonnement(const PdmInstance& pdm, const TatonnementConfig& config);

/// Header "t,p_0..p_{L-1},excess_0..excess_{L-1}", one row per record.
void write_trace_csv(std::ostream& out, const TatonnementTrace& trace);

} // namespace pdm
