#include "pdm/solver.hpp"

#include "pdm/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace pdm {

std::string to_string(PriceKind k)
{
    switch (k) {
    case PriceKind::PerGood:
        return "per_good";
    case PriceKind::PerIssue:
        return "per_issue";
    case PriceKind::Personalized:
        return "personalized";
    }
    return "unknown";
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Row {
    std::vector<std::pair<int, double>> coef;
    double rhs = 0.0;
};

// One Nash-product factor: B log U with U = y[scalar] or U = h(y[vars]).
struct Term {
    double budget = 0.0;
    int scalar = -1;
    const UtilitySpec* spec = nullptr;
    std::vector<int> vars; // -1 where the weight is zero
};

struct Program {
    int nvar = 0;
    std::vector<Row> rows;
    std::vector<Term> terms;
    VectorXd start;
};

// log h(x) over the positively weighted coordinates, with gradient and
// Hessian with respect to those coordinates.
double log_utility(const UtilitySpec& s, const std::vector<double>& x, const std::vector<double>& w,
                   VectorXd& g, MatrixXd& h)
{
    const int d = static_cast<int>(x.size());
    g.setZero(d);
    h.setZero(d, d);
    const bool linear = s.cls == UtilityClass::Linear || (s.cls == UtilityClass::Ces && s.rho == 1.0);
    if (linear) {
        double sum = 0.0;
        for (int j = 0; j < d; ++j)
            sum += w[j] * x[j];
        for (int j = 0; j < d; ++j)
            g[j] = w[j] / sum;
        h = -g * g.transpose();
        return std::log(sum);
    }
    if (s.cls == UtilityClass::CobbDouglas) {
        double total = 0.0;
        for (double v : s.weights)
            total += v;
        double val = 0.0;
        for (int j = 0; j < d; ++j) {
            const double a = w[j] / total;
            val += a * std::log(x[j]);
            g[j] = a / x[j];
            h(j, j) = -a / (x[j] * x[j]);
        }
        return val;
    }
    if (s.cls == UtilityClass::Ces) {
        const double rho = s.rho;
        std::vector<double> l(d);
        double top = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < d; ++j) {
            l[j] = rho * std::log(w[j] * x[j]);
            top = std::max(top, l[j]);
        }
        double acc = 0.0;
        for (int j = 0; j < d; ++j)
            acc += std::exp(l[j] - top);
        const double log_sum = top + std::log(acc);
        VectorXd r(d);
        for (int j = 0; j < d; ++j) {
            const double share = std::exp(l[j] - log_sum);
            r[j] = share / x[j];
            g[j] = r[j];
            h(j, j) = (rho - 1.0) * share / (x[j] * x[j]);
        }
        h -= rho * r * r.transpose();
        return log_sum / rho;
    }
    throw InvalidSpec("solver term needs a smooth base class");
}

struct Eval {
    double value = 0.0;
    VectorXd grad;
    MatrixXd hess;
};

// Barrier objective psi(y) = -sum B log U - mu sum log(slack) - mu sum log y.
bool evaluate(const Program& prog, const VectorXd& y, double mu, Eval* out, bool derivatives)
{
    const int nv = prog.nvar;
    for (int v = 0; v < nv; ++v)
        if (!(y[v] > 0.0))
            return false;
    std::vector<double> slack(prog.rows.size());
    for (std::size_t k = 0; k < prog.rows.size(); ++k) {
        double s = prog.rows[k].rhs;
        for (auto [v, c] : prog.rows[k].coef)
            s -= c * y[v];
        if (!(s > 0.0))
            return false;
        slack[k] = s;
    }
    double value = 0.0;
    if (derivatives) {
        out->grad.setZero(nv);
        out->hess.setZero(nv, nv);
    }
    VectorXd g;
    MatrixXd h;
    for (const Term& t : prog.terms) {
        if (t.scalar >= 0) {
            const double s = y[t.scalar];
            value -= t.budget * std::log(s);
            if (derivatives) {
                out->grad[t.scalar] -= t.budget / s;
                out->hess(t.scalar, t.scalar) += t.budget / (s * s);
            }
            continue;
        }
        std::vector<double> x, w;
        std::vector<int> idx;
        for (std::size_t c = 0; c < t.vars.size(); ++c) {
            if (t.vars[c] < 0)
                continue;
            x.push_back(y[t.vars[c]]);
            w.push_back(t.spec->weights[c]);
            idx.push_back(t.vars[c]);
        }
        const double lu = log_utility(*t.spec, x, w, g, h);
        if (!std::isfinite(lu))
            return false;
        value -= t.budget * lu;
        if (derivatives) {
            for (std::size_t a = 0; a < idx.size(); ++a) {
                out->grad[idx[a]] -= t.budget * g[a];
                for (std::size_t b = 0; b < idx.size(); ++b)
                    out->hess(idx[a], idx[b]) -= t.budget * h(a, b);
            }
        }
    }
    for (std::size_t k = 0; k < prog.rows.size(); ++k) {
        value -= mu * std::log(slack[k]);
        if (derivatives) {
            const auto& coef = prog.rows[k].coef;
            const double inv = 1.0 / slack[k];
            for (auto [a, ca] : coef) {
                out->grad[a] += mu * ca * inv;
                for (auto [b, cb] : coef)
                    out->hess(a, b) += mu * ca * cb * inv * inv;
            }
        }
    }
    for (int v = 0; v < nv; ++v) {
        value -= mu * std::log(y[v]);
        if (derivatives) {
            out->grad[v] -= mu / y[v];
            out->hess(v, v) += mu / (y[v] * y[v]);
        }
    }
    if (!std::isfinite(value))
        return false;
    if (out)
        out->value = value;
    return true;
}

double max_step(const Program& prog, const VectorXd& y, const VectorXd& d)
{
    double alpha = std::numeric_limits<double>::infinity();
    for (int v = 0; v < prog.nvar; ++v)
        if (d[v] < 0.0)
            alpha = std::min(alpha, -y[v] / d[v]);
    for (const Row& row : prog.rows) {
        double s = row.rhs, rate = 0.0;
        for (auto [v, c] : row.coef) {
            s -= c * y[v];
            rate += c * d[v];
        }
        if (rate > 0.0)
            alpha = std::min(alpha, s / rate);
    }
    return alpha;
}

// Row multipliers at the final iterate. Inactive rows keep mu / slack.
// Active rows (tiny slack, where mu / slack loses precision to
// cancellation) are re-solved from the stationarity system
// A^T lambda = grad(sum B log U) + mu / y as a minimum-norm correction of
// the barrier estimate. Writes the resulting stationarity residual.
std::vector<double> recover_multipliers(const Program& prog, const VectorXd& y, double mu,
                                        double* stationarity)
{
    const std::size_t rows = prog.rows.size();
    std::vector<double> lambda(rows), slack(rows);
    std::vector<int> active;
    for (std::size_t k = 0; k < rows; ++k) {
        double s = prog.rows[k].rhs;
        for (auto [v, c] : prog.rows[k].coef)
            s -= c * y[v];
        slack[k] = s;
        lambda[k] = mu / s;
        if (s < 1e-6)
            active.push_back(static_cast<int>(k));
    }
    Eval plain;
    if (!evaluate(prog, y, 0.0, &plain, true))
        return lambda;
    // plain.grad = -grad(sum B log U) once the barrier weight is zero.
    VectorXd rhs = -plain.grad;
    for (int v = 0; v < prog.nvar; ++v)
        rhs[v] += mu / y[v];
    MatrixXd a = MatrixXd::Zero(prog.nvar, static_cast<Eigen::Index>(active.size()));
    std::vector<int> column(rows, -1);
    for (std::size_t c = 0; c < active.size(); ++c)
        column[active[c]] = static_cast<int>(c);
    for (std::size_t k = 0; k < rows; ++k)
        for (auto [v, coef] : prog.rows[k].coef) {
            if (column[k] >= 0)
                a(v, column[k]) += coef;
            else
                rhs[v] -= coef * lambda[k];
        }
    if (!active.empty()) {
        VectorXd guess(static_cast<Eigen::Index>(active.size()));
        for (std::size_t c = 0; c < active.size(); ++c)
            guess[c] = lambda[active[c]];
        const VectorXd fix = a.completeOrthogonalDecomposition().solve(rhs - a * guess);
        for (std::size_t c = 0; c < active.size(); ++c)
            lambda[active[c]] = std::max(0.0, guess[c] + fix[c]);
    }
    VectorXd resid = rhs;
    for (std::size_t c = 0; c < active.size(); ++c)
        resid -= a.col(static_cast<Eigen::Index>(c)) * lambda[active[c]];
    *stationarity = prog.nvar > 0 ? resid.cwiseAbs().maxCoeff() : 0.0;
    return lambda;
}

struct BarrierResult {
    VectorXd y;
    std::vector<double> multipliers; // one per row
    double mu = 0.0;
    double stationarity = 0.0;
    int iterations = 0;
    bool converged = false;
};

BarrierResult run_barrier(const Program& prog, double gap_target, int max_newton)
{
    BarrierResult res;
    VectorXd y = prog.start;
    const double barrier_terms = static_cast<double>(prog.rows.size() + prog.nvar);
    double mu = 1.0;
    Eval cur;
    bool ok = true;
    for (;;) {
        for (int inner = 0; inner < 100; ++inner) {
            if (!evaluate(prog, y, mu, &cur, true)) {
                ok = false;
                break;
            }
            Eigen::LDLT<MatrixXd> ldlt(cur.hess);
            VectorXd d = ldlt.solve(-cur.grad);
            if (ldlt.info() != Eigen::Success || !d.allFinite()) {
                MatrixXd reg = cur.hess;
                reg.diagonal().array() += 1e-12 * (1.0 + reg.diagonal().cwiseAbs().maxCoeff());
                d = reg.ldlt().solve(-cur.grad);
            }
            const double decrement = -cur.grad.dot(d);
            if (decrement <= 1e-13 * mu + 1e-24)
                break;
            if (++res.iterations > max_newton) {
                ok = false;
                break;
            }
            double alpha = std::min(1.0, 0.99 * max_step(prog, y, d));
            Eval trial;
            bool moved = false;
            for (int ls = 0; ls < 60; ++ls) {
                const VectorXd cand = y + alpha * d;
                if (evaluate(prog, cand, mu, &trial, false)) {
                    const bool small = decrement < 1e-10 && alpha >= 0.5;
                    if (small || trial.value <= cur.value - 0.25 * alpha * decrement) {
                        y = cand;
                        moved = true;
                        break;
                    }
                }
                alpha *= 0.5;
            }
            if (!moved || alpha * d.cwiseAbs().maxCoeff() <= 1e-15 * (1.0 + y.cwiseAbs().maxCoeff()))
                break;
        }
        if (!ok)
            break;
        if (barrier_terms * mu <= gap_target)
            break;
        mu *= 0.1;
    }
    if (!evaluate(prog, y, mu, nullptr, false))
        ok = false;
    res.multipliers = recover_multipliers(prog, y, mu, &res.stationarity);
    res.y = y;
    res.mu = mu;
    res.converged = ok;
    return res;
}

double positive_min_ratio(const std::vector<double>& w, double value)
{
    double r = std::numeric_limits<double>::infinity();
    for (double v : w)
        if (v > 0.0)
            r = std::min(r, value / v);
    return r;
}

} // namespace

SolveResult solve_pdm_nash(const PdmInstance& pdm, const SolveOptions& opts)
{
    pdm.validate();
    const int m = static_cast<int>(pdm.m);
    Program prog;
    prog.nvar = 2 * m;
    std::vector<int> epigraph(pdm.n, -1);
    for (std::size_t i = 0; i < pdm.n; ++i)
        if (pdm.utilities[i].cls == UtilityClass::Leontief)
            epigraph[i] = prog.nvar++;
    prog.start = VectorXd::Constant(prog.nvar, 0.25);

    for (int j = 0; j < m; ++j)
        prog.rows.push_back({{{2 * j, 1.0}, {2 * j + 1, 1.0}}, 1.0});
    for (std::size_t i = 0; i < pdm.n; ++i) {
        const UtilitySpec& u = pdm.utilities[i];
        auto zvar = [&](int j) { return 2 * j + pdm.preferred[i][j]; };
        Term t;
        t.budget = pdm.budgets[i];
        if (epigraph[i] >= 0) {
            t.scalar = epigraph[i];
            for (int j = 0; j < m; ++j)
                if (u.weights[j] > 0.0)
                    prog.rows.push_back({{{epigraph[i], u.weights[j]}, {zvar(j), -1.0}}, 0.0});
            prog.start[epigraph[i]] = 0.5 * positive_min_ratio(u.weights, 0.25);
        } else {
            t.spec = &u;
            t.vars.assign(m, -1);
            for (int j = 0; j < m; ++j)
                if (u.weights[j] > 0.0)
                    t.vars[j] = zvar(j);
        }
        prog.terms.push_back(std::move(t));
    }

    const double gap_target = opts.gap_factor * opts.tol * pdm.total_budget();
    const BarrierResult br = run_barrier(prog, gap_target, opts.max_newton);

    SolveResult res;
    Outcome z;
    z.z.resize(pdm.m);
    for (int j = 0; j < m; ++j) {
        double z0 = std::clamp(br.y[2 * j], 0.0, 1.0);
        double z1 = std::clamp(br.y[2 * j + 1], 0.0, 1.0);
        const double slack = 1.0 - z0 - z1;
        if (slack > 0.0) {
            z0 += 0.5 * slack;
            z1 = 1.0 - z0;
        }
        z.z[j] = {z0, z1};
    }
    res.prices.assign(br.multipliers.begin(), br.multipliers.begin() + m);
    res.price_kind = PriceKind::PerIssue;
    for (std::size_t i = 0; i < pdm.n; ++i)
        res.allocation.push_back(public_bundle(pdm, z, i));
    res.objective = welfare(pdm, z, Welfare::Nash);
    res.outcome = std::move(z);
    res.iterations = br.iterations;
    res.stationarity = br.stationarity;
    res.gap = br.mu * static_cast<double>(prog.rows.size() + prog.nvar);
    res.feasibility = 0.0;
    res.converged = br.converged;
    return res;
}

SolveResult solve_fisher_eg(const FisherInstance& fisher, const SolveOptions& opts)
{
    fisher.validate();
    const std::size_t goods = fisher.good_count();
    Program prog;
    std::vector<std::vector<std::pair<int, double>>> good_coef(goods);

    // Per agent: either one scalar level (Leontief outer) or one variable per group.
    struct AgentVars {
        int scalar = -1;
        std::vector<int> group_var;
    };
    std::vector<AgentVars> agent_vars(fisher.n);
    std::vector<std::vector<std::vector<std::size_t>>> agent_groups(fisher.n);
    std::vector<const UtilitySpec*> outer(fisher.n);

    for (std::size_t i = 0; i < fisher.n; ++i) {
        const UtilitySpec& u = fisher.utilities[i];
        if (u.is_nested()) {
            agent_groups[i] = u.groups;
            outer[i] = u.outer.get();
        } else {
            for (std::size_t l = 0; l < goods; ++l)
                agent_groups[i].push_back({l});
            outer[i] = &u;
        }
        const auto& w = outer[i]->weights;
        Term t;
        t.budget = fisher.budgets[i];
        if (outer[i]->cls == UtilityClass::Leontief) {
            const int s = prog.nvar++;
            agent_vars[i].scalar = s;
            t.scalar = s;
            for (std::size_t g = 0; g < w.size(); ++g)
                if (w[g] > 0.0)
                    for (std::size_t l : agent_groups[i][g])
                        good_coef[l].push_back({s, w[g]});
        } else {
            t.spec = outer[i];
            t.vars.assign(w.size(), -1);
            agent_vars[i].group_var.assign(w.size(), -1);
            for (std::size_t g = 0; g < w.size(); ++g) {
                if (w[g] <= 0.0)
                    continue;
                const int v = prog.nvar++;
                t.vars[g] = v;
                agent_vars[i].group_var[g] = v;
                for (std::size_t l : agent_groups[i][g])
                    good_coef[l].push_back({v, 1.0});
            }
        }
        prog.terms.push_back(std::move(t));
    }

    std::vector<int> good_row(goods, -1);
    double widest = 0.0;
    for (std::size_t l = 0; l < goods; ++l) {
        if (good_coef[l].empty())
            continue;
        good_row[l] = static_cast<int>(prog.rows.size());
        double sum = 0.0;
        for (auto [v, c] : good_coef[l])
            sum += c;
        widest = std::max(widest, sum);
        prog.rows.push_back({good_coef[l], 1.0});
    }
    prog.start = VectorXd::Constant(prog.nvar, widest > 0.0 ? 0.5 / widest : 0.5);

    const double total_budget = std::accumulate(fisher.budgets.begin(), fisher.budgets.end(), 0.0);
    const double gap_target = opts.gap_factor * opts.tol * total_budget;
    const BarrierResult br = run_barrier(prog, gap_target, opts.max_newton);

    SolveResult res;
    res.allocation.assign(fisher.n, Bundle(goods, 0.0));
    for (std::size_t i = 0; i < fisher.n; ++i) {
        const auto& w = outer[i]->weights;
        for (std::size_t g = 0; g < w.size(); ++g) {
            if (w[g] <= 0.0)
                continue;
            const double level = agent_vars[i].scalar >= 0 ? w[g] * br.y[agent_vars[i].scalar]
                                                           : br.y[agent_vars[i].group_var[g]];
            for (std::size_t l : agent_groups[i][g])
                res.allocation[i][l] = level;
        }
    }
    res.prices.assign(goods, 0.0);
    for (std::size_t l = 0; l < goods; ++l)
        if (good_row[l] >= 0)
            res.prices[l] = br.multipliers[good_row[l]];
    res.price_kind = PriceKind::PerGood;
    res.objective = welfare(fisher, res.allocation, Welfare::Nash);
    res.iterations = br.iterations;
    res.stationarity = br.stationarity;
    res.gap = br.mu * static_cast<double>(prog.rows.size() + prog.nvar);
    double violation = 0.0;
    for (std::size_t l = 0; l < goods; ++l) {
        double sum = 0.0;
        for (std::size_t i = 0; i < fisher.n; ++i)
            sum += res.allocation[i][l];
        violation = std::max(violation, sum - 1.0);
    }
    res.feasibility = violation;
    res.converged = br.converged;
    return res;
}

GridResult brute_force_max_welfare(const PdmInstance& pdm, Welfare psi, std::size_t grid,
                                   std::size_t max_points)
{
    pdm.validate();
    if (grid < 1)
        throw GridTooLarge("grid needs at least one step");
    double points = 1.0;
    for (std::size_t j = 0; j < pdm.m; ++j)
        points *= static_cast<double>(grid + 1);
    if (points > static_cast<double>(max_points))
        throw GridTooLarge("grid has " + std::to_string(points) + " points, cap is " +
                           std::to_string(max_points));

    GridResult best;
    best.value = -std::numeric_limits<double>::infinity();
    std::vector<std::size_t> counter(pdm.m, 0);
    Outcome z;
    z.z.assign(pdm.m, {0.0, 1.0});
    std::vector<double> u(pdm.n);
    std::vector<double> x(pdm.m);
    for (;;) {
        for (std::size_t j = 0; j < pdm.m; ++j) {
            const double z0 = static_cast<double>(counter[j]) / static_cast<double>(grid);
            z.z[j] = {z0, 1.0 - z0};
        }
        for (std::size_t i = 0; i < pdm.n; ++i) {
            for (std::size_t j = 0; j < pdm.m; ++j)
                x[j] = z.z[j][pdm.preferred[i][j]];
            u[i] = evaluate_utility(pdm.utilities[i], x);
        }
        const double value = welfare_of(u, pdm.budgets, psi);
        ++best.points;
        if (value > best.value) {
            best.value = value;
            best.outcome = z;
        }
        std::size_t j = 0;
        while (j < pdm.m && ++counter[j] > grid)
            counter[j++] = 0;
        if (j == pdm.m)
            break;
    }
    return best;
}

std::vector<double> linear_price_crosscheck(const FisherInstance& fisher, const Allocation& alloc,
                                            double holder_tol)
{
    const std::size_t goods = fisher.good_count();
    std::vector<double> p(goods, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = 0; i < fisher.n; ++i) {
        const UtilitySpec& u = fisher.utilities[i];
        if (u.cls != UtilityClass::Linear)
            throw UnsupportedClass("price cross-check applies to plain linear markets");
        const double ui = evaluate_utility(u, alloc[i]);
        for (std::size_t l = 0; l < goods; ++l) {
            if (alloc[i][l] <= holder_tol)
                continue;
            const double cand = fisher.budgets[i] * u.weights[l] / ui;
            p[l] = std::isnan(p[l]) ? cand : std::max(p[l], cand);
        }
    }
    return p;
}

} // namespace pdm
