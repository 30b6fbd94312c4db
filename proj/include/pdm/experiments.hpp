#pragma once

#include "pdm/io.hpp"

#include <map>

namespace pdm {

struct ExperimentReport {
    std::string id;
    Json params;
    Json instance;                            // summary of the instance family
    std::map<std::string, double> quantities; // named computed values
    std::map<std::string, bool> checks;       // certificates that must hold
    double ratio = 0.0;
    double bound = 0.0;
    /// "ge": pass needs ratio >= bound - tol. "le": ratio <= bound * (1 + tol).
    std::string direction = "ge";
    double tol = 0.0;
    bool pass = false;
    double runtime_s = 0.0;
};

/// Recomputes the pass flag from the stored numbers.
bool recompute_pass(const ExperimentReport& r);

/// Private bundles of the analytic issue-pricing equilibrium on Phi(n, w):
/// agent j buys `own` of issue j, the n - 1 agents on the other side split
/// 1 - own equally. Prices are 1 per issue.
Allocation phi_ime_bundles(const PdmInstance& phi, double own);

/// Linear Phi(n, 1 + eps): IME y_ii = 1 against the witness z^{j,1} = 1.
ExperimentReport experiment_thm_3_2(std::size_t n, double eps);

/// Cobb-Douglas Phi(n, 1): IME x = 1/2 against the Nash optimum.
ExperimentReport experiment_thm_3_4(std::size_t n);

/// CES Phi(n, 1) with parameter rho: IME x = 1/2 against the Nash optimum.
ExperimentReport experiment_thm_3_5(std::size_t n, double rho);

/// Largest ratio max NW / NW(midpoint) over seeded random instances.
ExperimentReport experiment_prop_2_1(std::size_t count, std::uint64_t seed);

/// Largest relative gap between direct and reduce-then-solve Nash welfare
/// over seeded random instances.
ExperimentReport experiment_reduction_roundtrip(std::size_t count, std::uint64_t seed);

Json to_json(const ExperimentReport& r);
ExperimentReport experiment_from_json(const Json& j);

} // namespace pdm
