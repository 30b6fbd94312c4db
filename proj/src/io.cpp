#include "pdm/io.hpp"

#include "pdm/errors.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <iterator>
#include <limits>

namespace pdm {

namespace {

template <typename F>
auto parsing(const char* what, F&& f) -> decltype(f())
{
    try {
        return f();
    } catch (const Json::exception& e) {
        throw ParseError(std::string(what) + ": " + e.what());
    }
}

void expect_schema(const Json& j, const char* schema)
{
    if (!j.is_object() || !j.contains("schema") || j.at("schema") != schema)
        throw ParseError(std::string("expected a document with schema \"") + schema + "\"");
}

// JSON has no infinities; non-finite residuals are written as null.
Json number(double v)
{
    return std::isfinite(v) ? Json(v) : Json(nullptr);
}

double number_from(const Json& j)
{
    return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

Json rows_json(const std::vector<std::vector<double>>& rows)
{
    Json out = Json::array();
    for (const auto& r : rows)
        out.push_back(r);
    return out;
}

} // namespace

Json to_json(const UtilitySpec& spec)
{
    Json j{{"class", to_string(spec.cls)}};
    if (spec.is_nested()) {
        j["outer"] = to_json(*spec.outer);
        j["groups"] = spec.groups;
        j["goods"] = spec.goods;
        return j;
    }
    j["weights"] = spec.weights;
    if (spec.cls == UtilityClass::Ces)
        j["rho"] = spec.rho;
    return j;
}

UtilitySpec utility_from_json(const Json& j)
{
    return parsing("utility", [&] {
        UtilityClass cls;
        try {
            cls = utility_class_from_string(j.at("class").get<std::string>());
        } catch (const InvalidSpec& e) {
            throw ParseError(e.what());
        }
        UtilitySpec s;
        switch (cls) {
        case UtilityClass::Linear:
            s = UtilitySpec::linear(j.at("weights").get<std::vector<double>>());
            break;
        case UtilityClass::Leontief:
            s = UtilitySpec::leontief(j.at("weights").get<std::vector<double>>());
            break;
        case UtilityClass::CobbDouglas:
            s = UtilitySpec::cobb_douglas(j.at("weights").get<std::vector<double>>());
            break;
        case UtilityClass::Ces:
            if (!j.contains("rho"))
                throw ParseError("ces utility needs rho");
            s = UtilitySpec::ces(j.at("weights").get<std::vector<double>>(), j.at("rho").get<double>());
            break;
        case UtilityClass::NestedLeontief:
            s = UtilitySpec::nested(utility_from_json(j.at("outer")),
                                    j.at("groups").get<std::vector<std::vector<std::size_t>>>(),
                                    j.at("goods").get<std::size_t>());
            break;
        }
        return s;
    });
}

Json to_json(const PdmInstance& pdm)
{
    Json utils = Json::array();
    for (const auto& u : pdm.utilities)
        utils.push_back(to_json(u));
    return Json{{"schema", kPdmSchema}, {"n", pdm.n},         {"m", pdm.m},
                {"preferred", pdm.preferred}, {"budgets", pdm.budgets}, {"utilities", utils}};
}

PdmInstance pdm_from_json(const Json& j)
{
    expect_schema(j, kPdmSchema);
    PdmInstance pdm = parsing("pdm instance", [&] {
        PdmInstance p;
        p.n = j.at("n").get<std::size_t>();
        p.m = j.at("m").get<std::size_t>();
        p.preferred = j.at("preferred").get<std::vector<std::vector<int>>>();
        p.budgets = j.at("budgets").get<std::vector<double>>();
        for (const auto& u : j.at("utilities"))
            p.utilities.push_back(utility_from_json(u));
        return p;
    });
    pdm.validate();
    return pdm;
}

Json to_json(const GoodId& g)
{
    switch (g.kind) {
    case GoodId::Kind::Plain:
        return Json{{"kind", "plain"}, {"index", g.index}};
    case GoodId::Kind::Pairwise:
        return Json{{"kind", "pairwise"}, {"i", g.i}, {"k", g.k}, {"j", g.j}};
    case GoodId::Kind::Solo:
        return Json{{"kind", "solo"}, {"i", g.i}, {"j", g.j}};
    }
    return Json();
}

GoodId good_from_json(const Json& j)
{
    return parsing("good", [&] {
        const std::string kind = j.at("kind").get<std::string>();
        if (kind == "plain")
            return GoodId::plain(j.at("index").get<std::size_t>());
        if (kind == "pairwise")
            return GoodId::pairwise(j.at("i").get<std::size_t>(), j.at("k").get<std::size_t>(),
                                    j.at("j").get<std::size_t>());
        if (kind == "solo")
            return GoodId::solo(j.at("i").get<std::size_t>(), j.at("j").get<std::size_t>());
        throw ParseError("unknown good kind \"" + kind + "\"");
    });
}

Json to_json(const FisherInstance& fisher)
{
    Json goods = Json::array();
    for (const auto& g : fisher.goods)
        goods.push_back(to_json(g));
    Json utils = Json::array();
    for (const auto& u : fisher.utilities)
        utils.push_back(to_json(u));
    Json j{{"schema", kFisherSchema}, {"n", fisher.n}, {"goods", goods}, {"budgets", fisher.budgets},
           {"utilities", utils}};
    if (fisher.has_provenance())
        j["source"] = to_json(*fisher.source);
    return j;
}

FisherInstance fisher_from_json(const Json& j)
{
    expect_schema(j, kFisherSchema);
    FisherInstance f = parsing("fisher instance", [&] {
        FisherInstance out;
        out.n = j.at("n").get<std::size_t>();
        for (const auto& g : j.at("goods"))
            out.goods.push_back(good_from_json(g));
        out.budgets = j.at("budgets").get<std::vector<double>>();
        for (const auto& u : j.at("utilities"))
            out.utilities.push_back(utility_from_json(u));
        return out;
    });
    if (j.contains("source")) {
        FisherInstance derived = reduce_instance(pdm_from_json(j.at("source")));
        if (!(derived.goods == f.goods) || !(derived.utilities == f.utilities) || derived.budgets != f.budgets ||
            derived.n != f.n)
            throw ParseError("fisher instance does not match the reduction of its source");
        return derived;
    }
    f.validate();
    return f;
}

Json to_json(const Outcome& z)
{
    Json out = Json::array();
    for (const auto& p : z.z)
        out.push_back({p[0], p[1]});
    return out;
}

Outcome outcome_from_json(const Json& j)
{
    return parsing("outcome", [&] {
        Outcome z;
        for (const auto& p : j)
            z.z.push_back(p.get<std::array<double, 2>>());
        return z;
    });
}

Json to_json(const SolveResult& r, const FisherInstance* reduced)
{
    Json j{{"converged", r.converged},
           {"price_kind", to_string(r.price_kind)},
           {"prices", r.prices},
           {"objective", r.objective},
           {"iterations", r.iterations},
           {"stationarity", number(r.stationarity)},
           {"feasibility", number(r.feasibility)},
           {"gap", number(r.gap)},
           {"allocation", rows_json(r.allocation)}};
    if (r.outcome)
        j["outcome"] = to_json(*r.outcome);
    if (reduced && reduced->has_provenance()) {
        Allocation bundles;
        for (std::size_t i = 0; i < reduced->n; ++i)
            bundles.push_back(project_bundle(*reduced, i, r.allocation[i]));
        j["pdm_projection"] = Json{{"bundles", rows_json(bundles)},
                                   {"prices", rows_json(project_prices(*reduced, r.prices))},
                                   {"outcome", to_json(outcome_from_reduced_equilibrium(*reduced, r.allocation))}};
    }
    return j;
}

SolveResult solve_result_from_json(const Json& j)
{
    return parsing("solve result", [&] {
        SolveResult r;
        r.converged = j.at("converged").get<bool>();
        const std::string kind = j.at("price_kind").get<std::string>();
        if (kind == "per_good")
            r.price_kind = PriceKind::PerGood;
        else if (kind == "per_issue")
            r.price_kind = PriceKind::PerIssue;
        else if (kind == "personalized")
            r.price_kind = PriceKind::Personalized;
        else
            throw ParseError("unknown price kind \"" + kind + "\"");
        r.prices = j.at("prices").get<std::vector<double>>();
        r.objective = j.at("objective").get<double>();
        r.iterations = j.at("iterations").get<int>();
        r.stationarity = number_from(j.at("stationarity"));
        r.feasibility = number_from(j.at("feasibility"));
        r.gap = number_from(j.at("gap"));
        r.allocation = j.at("allocation").get<Allocation>();
        if (j.contains("outcome"))
            r.outcome = outcome_from_json(j.at("outcome"));
        return r;
    });
}

Json to_json(const EquilibriumReport& r)
{
    Json conds = Json::array();
    for (const auto& c : r.conditions)
        conds.push_back(Json{{"name", c.name},
                             {"residual", number(c.residual)},
                             {"threshold", number(c.threshold)},
                             {"pass", c.pass}});
    Json j{{"pass", r.pass}, {"conditions", conds}};
    if (r.witness)
        j["witness"] = to_json(*r.witness);
    return j;
}

EquilibriumReport report_from_json(const Json& j)
{
    return parsing("report", [&] {
        EquilibriumReport r;
        r.pass = j.at("pass").get<bool>();
        for (const auto& c : j.at("conditions"))
            r.conditions.push_back({c.at("name").get<std::string>(), number_from(c.at("residual")),
                                    number_from(c.at("threshold")), c.at("pass").get<bool>()});
        if (j.contains("witness"))
            r.witness = outcome_from_json(j.at("witness"));
        return r;
    });
}

Json to_json(const TatonnementConfig& c)
{
    return Json{{"max_iters", c.max_iters},
                {"step_scale", c.step_scale},
                {"p_min", c.p_min},
                {"p_max", c.p_max},
                {"initial_prices", c.initial_prices},
                {"initial_price", c.initial_price},
                {"noise_variance", c.noise_variance},
                {"bias", c.bias},
                {"seed", c.seed},
                {"delta", c.delta},
                {"membership_tol", c.membership_tol},
                {"check_every", c.check_every},
                {"average_blocks", c.average_blocks},
                {"trace_every", c.trace_every},
                {"adaptive_box", c.adaptive_box},
                {"ceiling", c.ceiling}};
}

TatonnementConfig tatonnement_config_from_json(const Json& j)
{
    TatonnementConfig c = parsing("tatonnement config", [&] {
        if (!j.is_object())
            throw ParseError("tatonnement config must be an object");
        static const char* known[] = {"max_iters",     "step_scale",  "p_min",         "p_max",
                                      "initial_prices", "initial_price", "noise_variance", "bias",
                                      "seed",           "delta",         "membership_tol", "check_every",
                                      "average_blocks", "trace_every",   "adaptive_box",   "ceiling"};
        for (const auto& item : j.items()) {
            bool ok = false;
            for (const char* k : known)
                ok = ok || item.key() == k;
            if (!ok)
                throw ParseError("unknown tatonnement config key \"" + item.key() + "\"");
        }
        TatonnementConfig out;
        out.max_iters = j.value("max_iters", out.max_iters);
        out.step_scale = j.value("step_scale", out.step_scale);
        out.p_min = j.value("p_min", out.p_min);
        out.p_max = j.value("p_max", out.p_max);
        out.initial_prices = j.value("initial_prices", out.initial_prices);
        out.initial_price = j.value("initial_price", out.initial_price);
        out.noise_variance = j.value("noise_variance", out.noise_variance);
        out.bias = j.value("bias", out.bias);
        out.seed = j.value("seed", out.seed);
        out.delta = j.value("delta", out.delta);
        out.membership_tol = j.value("membership_tol", out.membership_tol);
        out.check_every = j.value("check_every", out.check_every);
        out.average_blocks = j.value("average_blocks", out.average_blocks);
        out.trace_every = j.value("trace_every", out.trace_every);
        out.adaptive_box = j.value("adaptive_box", out.adaptive_box);
        out.ceiling = j.value("ceiling", out.ceiling);
        return out;
    });
    c.validate();
    return c;
}

Json summary_json(const TatonnementTrace& t)
{
    return Json{{"iterations", t.iterations},   {"converged", t.converged},
                {"stop_reason", t.stop_reason}, {"prices", t.prices},
                {"floors", t.floors},           {"averaged", t.averaged},
                {"allocation", rows_json(t.allocation)}, {"report", to_json(t.report)},
                {"records", t.records.size()}};
}

Json summary_json(const LiftedResult& r)
{
    return Json{{"hidden", summary_json(r.hidden)},
                {"prices", rows_json(r.prices)},
                {"bundles", rows_json(r.bundles)},
                {"pme_delta", r.pme_delta},
                {"report", to_json(r.report)}};
}

Json read_json_file(const std::string& path)
{
    std::string text;
    if (path == "-") {
        text.assign(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
    } else {
        std::ifstream in(path);
        if (!in)
            throw ParseError("cannot open " + path);
        text.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    }
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
}

} // namespace pdm
