#pragma once

#include "pdm/utility.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace pdm {

using Bundle = std::vector<double>;
using Allocation = std::vector<Bundle>;
/// Per-agent per-issue prices, indexed [agent][issue].
using PersonalPrices = std::vector<std::vector<double>>;

/// Binary-issue public decision instance.
struct PdmInstance {
    std::size_t n = 0;
    std::size_t m = 0;
    std::vector<std::vector<int>> preferred; // a_ij in {0,1}, n x m
    std::vector<double> budgets;
    std::vector<UtilitySpec> utilities;

    double total_budget() const;
    /// Agents with a_ij == side.
    std::vector<std::size_t> side(std::size_t issue, int side) const;
    bool unanimous(std::size_t issue) const;

    void validate() const;
};

bool operator==(const PdmInstance& a, const PdmInstance& b);

/// Per-issue probability pairs (z^{j,0}, z^{j,1}).
struct Outcome {
    std::vector<std::array<double, 2>> z;

    std::size_t size() const { return z.size(); }
    /// Checks entries in [0,1] and z0 + z1 <= 1 + 1e-12.
    bool valid() const;
};

bool operator==(const Outcome& a, const Outcome& b);

enum class Welfare { Nash, Utilitarian, Egalitarian };

std::string to_string(Welfare w);
Welfare welfare_from_string(const std::string& s);

/// x_ij = z^{j, a_ij}.
Bundle public_bundle(const PdmInstance& pdm, const Outcome& z, std::size_t agent);

/// Aggregates utilities. Nash is exp(sum B_i log u_i / sum B) and returns 0
/// as soon as any u_i <= 1e-300.
double welfare_of(std::span<const double> utilities, std::span<const double> budgets, Welfare psi);

double welfare(const PdmInstance& pdm, const Outcome& z, Welfare psi);
std::vector<double> agent_utilities(const PdmInstance& pdm, const Outcome& z);

Outcome midpoint_outcome(const PdmInstance& pdm);

/// The n-agent inefficiency family: agent i is alone on side 0 of issue i
/// with weight w there and weight 1 on every other issue.
PdmInstance build_phi(std::size_t n, double w, UtilityClass cls, std::optional<double> rho = {});

struct RandomInstanceOptions {
    std::size_t n_min = 1;
    std::size_t n_max = 5;
    std::size_t m_min = 1;
    std::size_t m_max = 4;
    double weight_lo = 0.1;
    double weight_hi = 2.0;
    bool unit_budgets = true;
    /// Empty means every class, drawn uniformly per agent.
    std::vector<UtilityClass> classes;
};

/// Seeded generator. Weights are uniform on [weight_lo, weight_hi],
/// preferences are fair coins, CES rho is drawn from a fixed menu.
/// Uses splitmix64 so the stream is identical on every platform.
PdmInstance random_pdm(std::uint64_t seed, const RandomInstanceOptions& opts = {});

/// splitmix64 stream with a portable uniform double.
class SplitMix {
public:
    explicit SplitMix(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next();
    double uniform(); // [0, 1)
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    std::size_t below(std::size_t k) { return static_cast<std::size_t>(next() % k); }

private:
    std::uint64_t state_;
};

} // namespace pdm
