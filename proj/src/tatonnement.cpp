#include "pdm/tatonnement.hpp"

#include "pdm/demand.hpp"
#include "pdm/errors.hpp"
#include "pdm/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>
#include <random>

namespace pdm {

void TatonnementConfig::validate() const
{
    if (max_iters < 1)
        throw InvalidInstance("max_iters must be positive");
    if (!(step_scale > 0.0))
        throw InvalidInstance("step_scale must be positive");
    if (!(p_min >= 0.0) || !(p_max > p_min))
        throw InvalidInstance("price box needs 0 <= p_min < p_max");
    if (!(noise_variance >= 0.0) || !std::isfinite(bias))
        throw InvalidInstance("noise variance must be nonnegative and bias finite");
    if (!(delta >= 0.0) || !(membership_tol >= 0.0))
        throw InvalidInstance("delta and membership_tol must be nonnegative");
    if (check_every < 1)
        throw InvalidInstance("check_every must be positive");
    if (!(ceiling >= 1.0))
        throw InvalidInstance("ceiling must be at least 1");
    for (double p : initial_prices)
        if (!std::isfinite(p) || p < 0.0)
            throw InvalidInstance("initial prices must be finite and nonnegative");
}

std::vector<double> dual_gradient(const FisherInstance& fisher, std::span<const double> prices, double ceiling)
{
    const std::size_t goods = fisher.good_count();
    if (prices.size() != goods)
        throw DimensionMismatch("price vector has wrong length");
    const auto& k = kernels::active();
    std::vector<double> total(goods, 0.0), grad(goods);
    for (std::size_t i = 0; i < fisher.n; ++i) {
        const Bundle x = demand(fisher.utilities[i], fisher.budgets[i], prices, ceiling);
        k.accumulate(total.data(), x.data(), goods);
    }
    k.excess(total.data(), grad.data(), goods);
    return grad;
}

double dual_objective(const FisherInstance& fisher, std::span<const double> prices)
{
    if (prices.size() != fisher.good_count())
        throw DimensionMismatch("price vector has wrong length");
    double value = kernels::active().sum(prices.data(), prices.size());
    for (std::size_t i = 0; i < fisher.n; ++i) {
        const double b = fisher.budgets[i];
        value += b * (std::log(b) - std::log(unit_expenditure(fisher.utilities[i], prices)) - 1.0);
    }
    return value;
}

namespace {

using DemandFn = std::function<void(const std::vector<double>& prices, Allocation& out)>;

// Shared price loop. `demands` fills one bundle per agent over goods.
TatonnementTrace run_engine(const FisherInstance& fisher, const TatonnementConfig& cfg, const DemandFn& demands)
{
    cfg.validate();
    const std::size_t goods = fisher.good_count();
    const std::size_t n = fisher.n;
    const auto& k = kernels::active();

    std::vector<double> p = cfg.initial_prices;
    if (p.empty())
        p.assign(goods, cfg.initial_price);
    if (p.size() != goods)
        throw DimensionMismatch("initial prices do not match the good count");
    std::vector<double> lo(goods, cfg.p_min);
    for (std::size_t l = 0; l < goods; ++l)
        p[l] = std::clamp(p[l], lo[l], cfg.p_max);

    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> noise(0.0, std::sqrt(cfg.noise_variance));
    const bool noisy = cfg.noise_variance > 0.0;

    TatonnementTrace trace;
    Allocation alloc(n, Bundle(goods, 0.0));
    // Ring of per-block demand sums; the candidate mean covers the filled blocks.
    const std::size_t blocks = cfg.average_blocks;
    std::vector<Allocation> ring(blocks, Allocation(n, Bundle(goods, 0.0)));
    std::size_t filled = 0, head = 0;
    std::vector<double> total(goods), grad(goods);

    auto record = [&](std::size_t t) {
        TraceRecord r;
        r.t = t;
        r.prices = p;
        r.demand = total;
        r.dual = dual_objective(fisher, p);
        std::vector<double> ex(goods);
        k.excess(total.data(), ex.data(), goods);
        r.excess_norm = k.max_abs(ex.data(), goods);
        trace.records.push_back(std::move(r));
    };

    auto window_mean = [&]() {
        Allocation mean(n, Bundle(goods, 0.0));
        for (std::size_t b = 0; b < filled; ++b)
            for (std::size_t i = 0; i < n; ++i)
                k.accumulate(mean[i].data(), ring[b][i].data(), goods);
        const double scale = 1.0 / static_cast<double>(filled * cfg.check_every);
        for (auto& row : mean)
            for (double& v : row)
                v *= scale;
        return mean;
    };

    auto try_certify = [&]() {
        EquilibriumReport rep = check_delta_eq(fisher, alloc, p, cfg.delta, cfg.membership_tol, cfg.ceiling);
        trace.allocation = alloc;
        trace.averaged = false;
        if (!rep.pass && filled > 0) {
            Allocation mean = window_mean();
            EquilibriumReport avg = check_delta_eq(fisher, mean, p, cfg.delta, cfg.membership_tol, cfg.ceiling);
            if (avg.pass) {
                trace.allocation = std::move(mean);
                trace.averaged = true;
                rep = std::move(avg);
            }
        }
        trace.report = std::move(rep);
        return trace.report.pass;
    };

    std::size_t t = 0;
    for (;;) {
        ++t;
        demands(p, alloc);
        std::fill(total.begin(), total.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i)
            k.accumulate(total.data(), alloc[i].data(), goods);
        if (blocks > 0)
            for (std::size_t i = 0; i < n; ++i)
                k.accumulate(ring[head][i].data(), alloc[i].data(), goods);

        if (cfg.trace_every > 0 && (t - 1) % cfg.trace_every == 0)
            record(t);

        // Demands at p^t are final for this price; check before moving.
        if (t % cfg.check_every == 0 || t == cfg.max_iters) {
            if (blocks > 0 && t % cfg.check_every == 0) {
                filled = std::min(filled + 1, blocks);
                head = (head + 1) % blocks;
            }
            const bool ok = try_certify();
            if (blocks > 0)
                for (auto& row : ring[head])
                    std::fill(row.begin(), row.end(), 0.0);
            if (ok) {
                trace.converged = true;
                trace.stop_reason = "delta";
                break;
            }
            if (t == cfg.max_iters) {
                trace.stop_reason = "max_iters";
                break;
            }
        }

        k.excess(total.data(), grad.data(), goods);
        if (noisy || cfg.bias != 0.0)
            for (std::size_t l = 0; l < goods; ++l)
                grad[l] -= (noisy ? noise(rng) : 0.0) + cfg.bias;

        if (cfg.adaptive_box) {
            for (std::size_t l = 0; l < goods; ++l) {
                if (p[l] > lo[l])
                    continue;
                bool saturated = false;
                for (std::size_t i = 0; i < n; ++i)
                    saturated = saturated || alloc[i][l] >= cfg.ceiling;
                if (saturated)
                    lo[l] = std::min(2.0 * std::max(lo[l], 1e-12), 0.5 * cfg.p_max);
                else if (total[l] <= 0.0)
                    lo[l] = std::max(0.5 * lo[l], 1e-12);
            }
        }

        const double eta = cfg.step_scale / static_cast<double>(t);
        if (cfg.adaptive_box) {
            for (std::size_t l = 0; l < goods; ++l)
                k.projected_step(p.data() + l, grad.data() + l, eta, lo[l], cfg.p_max, 1);
        } else {
            k.projected_step(p.data(), grad.data(), eta, cfg.p_min, cfg.p_max, goods);
        }
    }

    trace.iterations = t;
    if (cfg.trace_every == 0 || trace.records.empty() || trace.records.back().t != t)
        record(t);
    trace.prices = p;
    trace.floors = lo;
    return trace;
}

} // namespace

TatonnementTrace run_fisher_tatonnement(const FisherInstance& fisher, const TatonnementConfig& config)
{
    fisher.validate();
    return run_engine(fisher, config, [&](const std::vector<double>& p, Allocation& out) {
        for (std::size_t i = 0; i < fisher.n; ++i)
            out[i] = demand(fisher.utilities[i], fisher.budgets[i], p, config.ceiling);
    });
}

LiftedResult run_lifted_tatonnement(const PdmInstance& pdm, const TatonnementConfig& config)
{
    const FisherInstance fisher = reduce_instance(pdm);
    LiftedResult res;
    res.hidden = run_engine(fisher, config, [&](const std::vector<double>& p, Allocation& out) {
        const PersonalPrices personal = project_prices(fisher, p);
        for (std::size_t i = 0; i < pdm.n; ++i) {
            const Bundle y = demand(pdm.utilities[i], pdm.budgets[i], personal[i], config.ceiling);
            out[i] = lift_bundle(fisher, i, y);
        }
    });
    res.prices = project_prices(fisher, res.hidden.prices);
    for (std::size_t i = 0; i < pdm.n; ++i)
        res.bundles.push_back(project_bundle(fisher, i, res.hidden.allocation[i]));
    res.pme_delta = 3.0 * config.delta;
    res.report = check_delta_pme(pdm, res.bundles, res.prices, res.pme_delta, config.membership_tol, config.ceiling);
    return res;
}

void write_trace_csv(std::ostream& out, const TatonnementTrace& trace)
{
    const std::size_t goods = trace.prices.size();
    out << "t";
    for (std::size_t l = 0; l < goods; ++l)
        out << ",p_" << l;
    for (std::size_t l = 0; l < goods; ++l)
        out << ",excess_" << l;
    out << '\n';
    const auto old = out.precision(17);
    for (const auto& r : trace.records) {
        out << r.t;
        for (double v : r.prices)
            out << ',' << v;
        for (double v : r.demand)
            out << ',' << 1.0 - v;
        out << '\n';
    }
    out.precision(old);
}

} // namespace pdm
