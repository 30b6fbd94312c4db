// Command-line front end. Exit codes: 0 success, 1 malformed input,
// 2 failed check, experiment or non-converged run.

#include "pdm/demand.hpp"
#include "pdm/errors.hpp"
#include "pdm/experiments.hpp"
#include "pdm/io.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>

using namespace pdm;

namespace {

constexpr int kOk = 0;
constexpr int kMalformed = 1;
constexpr int kFailed = 2;

double default_tol()
{
    if (const char* env = std::getenv("PDM_TOL")) {
        char* end = nullptr;
        const double v = std::strtod(env, &end);
        if (end == env || *end != '\0' || !(v > 0.0))
            throw ParseError(std::string("PDM_TOL is not a positive number: ") + env);
        return v;
    }
    return kDefaultCheckTol;
}

void emit(const Json& j, const std::string& path)
{
    if (path.empty() || path == "-") {
        std::cout << j.dump(2) << '\n';
        return;
    }
    std::ofstream out(path);
    if (!out)
        throw ParseError("cannot write " + path);
    out << j.dump(2) << '\n';
}

bool is_schema(const Json& j, const char* schema)
{
    return j.is_object() && j.contains("schema") && j.at("schema") == schema;
}

FisherInstance load_market(const Json& j)
{
    if (is_schema(j, kPdmSchema))
        return reduce_instance(pdm_from_json(j));
    return fisher_from_json(j);
}

Allocation rows(const Json& j, const char* what)
{
    try {
        return j.get<Allocation>();
    } catch (const Json::exception&) {
        throw ParseError(std::string(what) + " must be an array of number arrays");
    }
}

std::vector<double> vec(const Json& j, const char* what)
{
    try {
        return j.get<std::vector<double>>();
    } catch (const Json::exception&) {
        throw ParseError(std::string(what) + " must be an array of numbers");
    }
}

const Json& field(const Json& j, const char* key, const char* what)
{
    if (!j.is_object() || !j.contains(key))
        throw ParseError(std::string(what) + " has no \"" + key + "\" field");
    return j.at(key);
}

struct CheckArgs {
    std::string kind;
    std::string instance;
    std::string solution;
    std::string alloc;
    std::string prices;
    std::string outcome;
    double delta = 0.0;
    double tol = -1.0;
    double ceiling = 1.0;
    std::string out;
};

// Bundles and prices come from --alloc/--prices, else from a solve result.
// PDM-side checks read the "pdm_projection" block when it is present.
int run_check(const CheckArgs& a)
{
    const double tol = a.tol > 0.0 ? a.tol : default_tol();
    const Json inst = read_json_file(a.instance);
    Json solution;
    if (!a.solution.empty())
        solution = read_json_file(a.solution);
    const bool pdm_side = a.kind == "ime" || a.kind == "pme" || a.kind == "delta-pme" || a.kind == "lindahl";
    const Json* source = &solution;
    if (pdm_side && a.kind != "ime" && solution.is_object() && solution.contains("pdm_projection"))
        source = &solution.at("pdm_projection");

    auto load_alloc = [&] {
        if (!a.alloc.empty())
            return rows(read_json_file(a.alloc), "allocation");
        const char* key = source == &solution ? "allocation" : "bundles";
        return rows(field(*source, key, "solution"), "allocation");
    };
    auto load_prices = [&]() -> Json {
        if (!a.prices.empty())
            return read_json_file(a.prices);
        return field(*source, "prices", "solution");
    };

    EquilibriumReport rep;
    if (a.kind == "me" || a.kind == "delta-eq") {
        const FisherInstance fisher = load_market(inst);
        const Allocation x = load_alloc();
        const std::vector<double> p = vec(load_prices(), "prices");
        rep = a.kind == "me" ? check_me(fisher, x, p, tol, a.ceiling)
                             : check_delta_eq(fisher, x, p, a.delta, tol, a.ceiling);
    } else if (a.kind == "ime") {
        const PdmInstance pdm = pdm_from_json(inst);
        rep = check_ime(pdm, load_alloc(), vec(load_prices(), "prices"), tol, a.ceiling);
    } else if (a.kind == "pme" || a.kind == "delta-pme") {
        const PdmInstance pdm = pdm_from_json(inst);
        const Allocation y = load_alloc();
        const PersonalPrices p = rows(load_prices(), "personalized prices");
        rep = a.kind == "pme" ? check_pme(pdm, y, p, tol, a.ceiling)
                              : check_delta_pme(pdm, y, p, a.delta, tol, a.ceiling);
    } else if (a.kind == "lindahl") {
        const PdmInstance pdm = pdm_from_json(inst);
        Outcome z;
        if (!a.outcome.empty())
            z = outcome_from_json(read_json_file(a.outcome));
        else
            z = outcome_from_json(field(*source, "outcome", "solution"));
        const Json pj = load_prices();
        LindahlPrices lp;
        try {
            lp = pj.get<LindahlPrices>();
        } catch (const Json::exception&) {
            lp = lindahl_from_personal(pdm, rows(pj, "personalized prices"));
        }
        rep = check_lindahl(pdm, z, lp, tol, a.ceiling);
    } else {
        throw ParseError("unknown check kind " + a.kind);
    }
    emit(to_json(rep), a.out);
    return rep.pass ? kOk : kFailed;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Public decision markets: solve, reduce, check, tatonnement, experiments"};
    app.require_subcommand(1);

    // solve
    std::string solve_kind, solve_file, solve_out;
    double solve_tol = SolveOptions{}.tol;
    auto* solve = app.add_subcommand("solve", "Maximize Nash welfare of a pdm or fisher instance");
    solve->add_option("kind", solve_kind, "pdm or fisher")->required()->check(CLI::IsMember({"pdm", "fisher"}));
    solve->add_option("instance", solve_file, "Instance JSON, - for stdin")->required();
    solve->add_option("--tol", solve_tol, "Solver accuracy target");
    solve->add_option("-o,--out", solve_out, "Output path");

    // reduce
    std::string reduce_file, reduce_out;
    auto* reduce = app.add_subcommand("reduce", "Pairwise issue expansion of a pdm instance");
    reduce->add_option("instance", reduce_file, "pdm/1 JSON")->required();
    reduce->add_option("-o,--out", reduce_out, "Output path");

    // check
    CheckArgs ca;
    auto* check = app.add_subcommand("check", "Verify an equilibrium notion");
    check->add_option("kind", ca.kind, "me|ime|pme|delta-eq|delta-pme|lindahl")
        ->required()
        ->check(CLI::IsMember({"me", "ime", "pme", "delta-eq", "delta-pme", "lindahl"}));
    check->add_option("--instance", ca.instance, "Instance JSON")->required();
    check->add_option("--solution", ca.solution, "Solve result JSON");
    check->add_option("--alloc", ca.alloc, "Bundles JSON, overrides the solution");
    check->add_option("--prices", ca.prices, "Prices JSON, overrides the solution");
    check->add_option("--outcome", ca.outcome, "Outcome JSON for lindahl");
    check->add_option("--delta", ca.delta, "delta for the approximate checks");
    check->add_option("--tol", ca.tol, "Tolerance (default PDM_TOL or 1e-6)");
    check->add_option("--ceiling", ca.ceiling, "Per-good demand cap");
    check->add_option("-o,--out", ca.out, "Output path");

    // tat
    std::string tat_kind, tat_instance, tat_config, tat_trace, tat_summary;
    auto* tat = app.add_subcommand("tat", "Run tatonnement");
    tat->add_option("kind", tat_kind, "fisher or lifted")->required()->check(CLI::IsMember({"fisher", "lifted"}));
    tat->add_option("--instance", tat_instance, "Instance JSON")->required();
    tat->add_option("--config", tat_config, "Config JSON; omitted keys keep defaults");
    tat->add_option("--trace", tat_trace, "CSV trace path");
    tat->add_option("-o,--summary", tat_summary, "Summary JSON path");

    // gen
    auto* gen = app.add_subcommand("gen", "Generate instances");
    gen->require_subcommand(1);
    std::size_t phi_n = 0;
    double phi_w = 1.0;
    std::string phi_class = "linear", gen_out;
    std::optional<double> phi_rho;
    auto* phi = gen->add_subcommand("phi", "The Phi(n, w) family");
    phi->add_option("--n", phi_n, "Agents (= issues)")->required()->check(CLI::Range(2, 100000));
    phi->add_option("--w", phi_w, "Weight on the agent's own issue");
    phi->add_option("--class", phi_class, "Utility class");
    phi->add_option("--rho", phi_rho, "CES parameter");
    phi->add_option("-o,--out", gen_out, "Output path");
    std::uint64_t rnd_seed = 0;
    RandomInstanceOptions rnd;
    std::vector<std::string> rnd_classes;
    bool rnd_unequal = false;
    auto* random = gen->add_subcommand("random", "Seeded random instance");
    random->add_option("--seed", rnd_seed, "Seed");
    random->add_option("--n-min", rnd.n_min);
    random->add_option("--n-max", rnd.n_max);
    random->add_option("--m-min", rnd.m_min);
    random->add_option("--m-max", rnd.m_max);
    random->add_option("--classes", rnd_classes, "Allowed classes");
    random->add_flag("--unequal-budgets", rnd_unequal, "Draw budgets instead of using 1");
    random->add_option("-o,--out", gen_out, "Output path");

    // experiment
    std::string exp_id, exp_out;
    std::vector<std::size_t> exp_n;
    double exp_eps = 0.01;
    std::vector<double> exp_rho;
    std::size_t exp_count = 0;
    std::uint64_t exp_seed = 1;
    auto* exp = app.add_subcommand("experiment", "Reproduce an inefficiency or correspondence claim");
    exp->add_option("id", exp_id, "thm-3-2|thm-3-4|thm-3-5|prop-2-1|reduction-roundtrip")
        ->required()
        ->check(CLI::IsMember({"thm-3-2", "thm-3-4", "thm-3-5", "prop-2-1", "reduction-roundtrip"}));
    exp->add_option("--n", exp_n, "Agent counts, repeatable");
    exp->add_option("--eps", exp_eps, "epsilon for thm-3-2");
    exp->add_option("--rho", exp_rho, "CES parameters for thm-3-5, repeatable");
    exp->add_option("--count", exp_count, "Random instances for prop-2-1 / reduction-roundtrip");
    exp->add_option("--seed", exp_seed, "First seed");
    exp->add_option("-o,--out", exp_out, "Output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kMalformed;
    }

    try {
        if (*solve) {
            SolveOptions opts;
            opts.tol = solve_tol;
            const Json doc = read_json_file(solve_file);
            if (solve_kind == "pdm") {
                const SolveResult r = solve_pdm_nash(pdm_from_json(doc), opts);
                emit(to_json(r), solve_out);
                return r.converged ? kOk : kFailed;
            }
            const FisherInstance f = load_market(doc);
            const SolveResult r = solve_fisher_eg(f, opts);
            emit(to_json(r, &f), solve_out);
            return r.converged ? kOk : kFailed;
        }
        if (*reduce) {
            emit(to_json(reduce_instance(pdm_from_json(read_json_file(reduce_file)))), reduce_out);
            return kOk;
        }
        if (*check)
            return run_check(ca);
        if (*tat) {
            const Json doc = read_json_file(tat_instance);
            const TatonnementConfig cfg =
                tat_config.empty() ? TatonnementConfig{} : tatonnement_config_from_json(read_json_file(tat_config));
            auto write_trace = [&](const TatonnementTrace& t) {
                if (tat_trace.empty())
                    return;
                std::ofstream out(tat_trace);
                if (!out)
                    throw ParseError("cannot write " + tat_trace);
                write_trace_csv(out, t);
            };
            if (tat_kind == "fisher") {
                const TatonnementTrace t = run_fisher_tatonnement(load_market(doc), cfg);
                write_trace(t);
                emit(summary_json(t), tat_summary);
                return t.converged ? kOk : kFailed;
            }
            const LiftedResult r = run_lifted_tatonnement(pdm_from_json(doc), cfg);
            write_trace(r.hidden);
            emit(summary_json(r), tat_summary);
            return r.report.pass ? kOk : kFailed;
        }
        if (*phi) {
            emit(to_json(build_phi(phi_n, phi_w, utility_class_from_string(phi_class), phi_rho)), gen_out);
            return kOk;
        }
        if (*random) {
            for (const auto& c : rnd_classes)
                rnd.classes.push_back(utility_class_from_string(c));
            rnd.unit_budgets = !rnd_unequal;
            emit(to_json(random_pdm(rnd_seed, rnd)), gen_out);
            return kOk;
        }
        if (*exp) {
            std::vector<ExperimentReport> reports;
            if (exp_id == "thm-3-2" || exp_id == "thm-3-4" || exp_id == "thm-3-5") {
                if (exp_n.empty())
                    throw ParseError(exp_id + " needs at least one --n");
                for (std::size_t n : exp_n) {
                    if (n < 2)
                        throw ParseError("--n must be at least 2");
                    if (exp_id == "thm-3-2")
                        reports.push_back(experiment_thm_3_2(n, exp_eps));
                    else if (exp_id == "thm-3-4")
                        reports.push_back(experiment_thm_3_4(n));
                    else {
                        if (exp_rho.empty())
                            throw ParseError("thm-3-5 needs at least one --rho");
                        for (double rho : exp_rho)
                            reports.push_back(experiment_thm_3_5(n, rho));
                    }
                }
            } else if (exp_id == "prop-2-1") {
                reports.push_back(experiment_prop_2_1(exp_count ? exp_count : 100, exp_seed));
            } else {
                reports.push_back(experiment_reduction_roundtrip(exp_count ? exp_count : 50, exp_seed));
            }
            Json out = Json::array();
            bool all = true;
            for (const auto& r : reports) {
                out.push_back(to_json(r));
                all = all && r.pass;
            }
            emit(reports.size() == 1 ? out[0] : out, exp_out);
            return all ? kOk : kFailed;
        }
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kMalformed;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kMalformed;
    }
    return kMalformed;
}
