#pragma once
/// Command-line surface: run configuration, its canonical text form, and the
/// commands. Requires CLI11 and nlohmann/json on the include path.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ineqforge/report.hpp"

namespace ineqforge {

inline const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names = {"verify", "estimate", "profile", "criteria", "tighten", "transport", "report"};
    return names;
}

struct RunConfig {
    std::string command;
    std::string measure = "gaussian";
    std::string target;                  // transport destination measure
    std::vector<std::string> functions;  // test-function specs
    std::vector<std::string> families;
    std::string ineq;
    std::string cost = "quad";
    std::string F = "log";
    std::optional<double> tau;
    std::optional<double> alpha;
    std::optional<double> constant;
    std::optional<double> tol;
    std::string checker;
    std::string rule;
    std::vector<std::string> params;  // key=value
    int resolution = 2048;
    int budget = 60;
    std::uint64_t seed = 1;
    std::string out;
    std::string format = "json";
    bool no_timestamp = false;

    bool operator==(const RunConfig&) const = default;
};

/// Registers every flag of RunConfig on the app.
inline void bind_flags(CLI::App& app, RunConfig& c) {
    app.add_option("command", c.command, "Command to run")->required()->check(CLI::IsMember(command_names()));
    app.add_option("--measure", c.measure, "Measure spec");
    app.add_option("--target", c.target, "Destination measure for transport");
    app.add_option("--function", c.functions, "Test function spec (repeatable)")
        ->expected(1)
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    app.add_option("--family", c.families, "Function family (repeatable or comma separated)")
        ->expected(1)
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll)
        ->delimiter(',');
    app.add_option("--ineq", c.ineq, "Inequality name");
    app.add_option("--cost", c.cost, "Cost spec");
    app.add_option("--F", c.F, "Entropy generator spec");
    app.add_option("--tau", c.tau, "Exponent tau");
    app.add_option("--alpha", c.alpha, "Exponent alpha");
    app.add_option("--constant", c.constant, "Constant to verify");
    app.add_option("--tol", c.tol, "Tolerance");
    app.add_option("--checker", c.checker, "Criterion checker name");
    app.add_option("--rule", c.rule, "Tightening rule");
    app.add_option("--param", c.params, "key=value parameter (repeatable)")
        ->expected(1)
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    app.add_option("--resolution", c.resolution, "Grid resolution")->check(CLI::Range(16, 1 << 20));
    app.add_option("--budget", c.budget, "Evaluations per search restart")->check(CLI::Range(1, 100000));
    app.add_option("--seed", c.seed, "Random seed");
    app.add_option("--out", c.out, "Output path (stdout when empty)");
    app.add_option("--format", c.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    app.add_flag("--no-timestamp", c.no_timestamp, "Omit the timestamp from JSON reports");
}

namespace detail {

inline std::string shortest(double v) {
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

inline bool needs_quotes(const std::string& s) {
    if (s.empty()) return true;
    for (char ch : s)
        if (std::isspace(static_cast<unsigned char>(ch)) || ch == '"' || ch == '\'' || ch == '\\') return true;
    return false;
}

inline std::string quote(const std::string& s) {
    if (!needs_quotes(s)) return s;
    if (s.find('\'') == std::string::npos) return "'" + s + "'";
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"' || ch == '\\') out += '\\';
        out += ch;
    }
    return out + "\"";
}

}  // namespace detail

inline RunConfig parse_run_config(const std::string& text) {
    RunConfig c;
    CLI::App app{"ineqforge"};
    bind_flags(app, c);
    try {
        app.parse(text, false);
    } catch (const CLI::ParseError& e) {
        fail(ErrorKind::ConfigError, e.what());
    }
    return c;
}

/// Canonical text: command first, then non-default flags in a fixed order.
inline std::string to_canonical(const RunConfig& c) {
    const RunConfig d;
    std::string out = c.command;
    auto add = [&](const char* flag, const std::string& v) { out += std::string(" --") + flag + " " + detail::quote(v); };
    auto add_num = [&](const char* flag, const std::optional<double>& v) {
        if (v) add(flag, detail::shortest(*v));
    };
    if (c.measure != d.measure) add("measure", c.measure);
    if (!c.target.empty()) add("target", c.target);
    for (const auto& f : c.functions) add("function", f);
    for (const auto& f : c.families) add("family", f);
    if (!c.ineq.empty()) add("ineq", c.ineq);
    if (c.cost != d.cost) add("cost", c.cost);
    if (c.F != d.F) add("F", c.F);
    add_num("tau", c.tau);
    add_num("alpha", c.alpha);
    add_num("constant", c.constant);
    add_num("tol", c.tol);
    if (!c.checker.empty()) add("checker", c.checker);
    if (!c.rule.empty()) add("rule", c.rule);
    for (const auto& p : c.params) add("param", p);
    if (c.resolution != d.resolution) add("resolution", std::to_string(c.resolution));
    if (c.budget != d.budget) add("budget", std::to_string(c.budget));
    if (c.seed != d.seed) add("seed", std::to_string(c.seed));
    if (!c.out.empty()) add("out", c.out);
    if (c.format != d.format) add("format", c.format);
    if (c.no_timestamp) out += " --no-timestamp";
    return out;
}

inline Json to_json(const RunConfig& c) {
    auto opt = [](const std::optional<double>& v) { return v ? number(*v) : Json(nullptr); };
    Json j;
    j["canonical"] = to_canonical(c);
    j["measure"] = c.measure;
    j["target"] = c.target;
    j["functions"] = c.functions;
    j["families"] = c.families;
    j["ineq"] = c.ineq;
    j["cost"] = c.cost;
    j["F"] = c.F;
    j["tau"] = opt(c.tau);
    j["alpha"] = opt(c.alpha);
    j["constant"] = opt(c.constant);
    j["tol"] = opt(c.tol);
    j["checker"] = c.checker;
    j["rule"] = c.rule;
    j["params"] = c.params;
    j["resolution"] = c.resolution;
    j["budget"] = c.budget;
    j["seed"] = c.seed;
    j["format"] = c.format;
    return j;
}

// ---------------------------------------------------------------------------
// Commands

struct CommandOutput {
    int exit_code = 0;
    std::string text;  // JSON or CSV
};

namespace detail {

class Params {
public:
    explicit Params(const std::vector<std::string>& kv) {
        for (const auto& s : kv) {
            auto eq = s.find('=');
            if (eq == std::string::npos || eq == 0) fail(ErrorKind::ConfigError, "parameter '" + s + "' is not key=value");
            map_[s.substr(0, eq)] = s.substr(eq + 1);
        }
    }
    std::optional<std::string> text(const std::string& k) const {
        auto it = map_.find(k);
        if (it == map_.end()) return std::nullopt;
        return it->second;
    }
    std::optional<double> opt(const std::string& k) const {
        auto t = text(k);
        if (!t) return std::nullopt;
        return parse_number(*t, k.c_str());
    }
    double num(const std::string& k) const {
        auto v = opt(k);
        if (!v) fail(ErrorKind::ConfigError, "missing parameter '" + k + "'");
        return *v;
    }
    double num(const std::string& k, double fallback) const { return opt(k).value_or(fallback); }
    std::string str(const std::string& k, const std::string& fallback) const { return text(k).value_or(fallback); }

private:
    std::map<std::string, std::string> map_;
};

inline Measure1D config_measure(const RunConfig& c, const std::string& spec) {
    MeasureOptions o;
    o.resolution = c.resolution;
    return measure_from_spec(spec, o);
}

inline void require_json(const RunConfig& c) {
    if (c.format != "json") fail(ErrorKind::ConfigError, "command '" + c.command + "' only writes JSON");
}

inline InequalitySpec config_inequality(const RunConfig& c) {
    if (c.ineq.empty()) fail(ErrorKind::ConfigError, "--ineq is required");
    std::string name = c.ineq;
    if (name == "itau" && c.tau) name += ":" + shortest(*c.tau);
    return inequality_from_name(name);
}

inline std::vector<std::string> default_families(const InequalitySpec& ineq) {
    switch (ineq.kind) {
        case InequalityKind::PoincareZero: return {"tilts"};
        case InequalityKind::Talagrand: return {"bumps"};
        default: return {"tilts", "bumps", "halflines", "hermite"};
    }
}

inline std::vector<FunctionFamily> config_families(const RunConfig& c, const Measure1D& mu, const InequalitySpec& ineq) {
    std::vector<FunctionFamily> out;
    for (const auto& n : c.families.empty() ? default_families(ineq) : c.families) out.push_back(family_from_name(n, mu, ineq));
    return out;
}

/// Known sharp constants in the lhs <= C * energy convention.
inline std::optional<double> reference_constant(const std::string& measure, InequalityKind k) {
    if (measure == "gaussian") {
        if (k == InequalityKind::LSI || k == InequalityKind::Talagrand) return 2.0;
        if (k == InequalityKind::Poincare) return 1.0;
    }
    if (measure == "exponential" && (k == InequalityKind::Poincare || k == InequalityKind::PoincareZero)) return 4.0;
    if (measure == "laplace" && k == InequalityKind::Poincare) return 4.0;
    return std::nullopt;
}

inline Json finish(Json env, const std::string& status, Json result) {
    env["status"] = status;
    env["result"] = std::move(result);
    return env;
}

}  // namespace detail

inline CommandOutput cmd_verify(const RunConfig& c) {
    detail::require_json(c);
    auto mu = detail::config_measure(c, c.measure);
    auto ineq = detail::config_inequality(c);
    double K;
    std::string source = "flag";
    if (c.constant) {
        K = *c.constant;
    } else if (auto r = detail::reference_constant(c.measure, ineq.kind)) {
        K = *r;
        source = "reference";
    } else {
        fail(ErrorKind::ConfigError, "no reference constant for this measure and inequality; pass --constant");
    }
    double tol = c.tol.value_or(1e-8);
    auto fams = detail::config_families(c, mu, ineq);
    auto est = estimate_best_constant(mu, ineq, fams, c.budget, c.seed, 4);
    std::vector<TestFunction> tests = {est.report.witness};
    for (auto& t : random_test_functions(mu, ineq, fams, 32, c.seed)) tests.push_back(t);
    Role role = ineq.kind == InequalityKind::Talagrand ? Role::Density : Role::Generic;
    for (const auto& s : c.functions) tests.push_back(test_function_from_spec(s, role));

    Json checks = Json::array();
    int violations = 0;
    double worst_rel = kInf;
    Json witness = nullptr;
    for (const auto& t : tests) {
        RatioSides s = inequality_sides(mu, ineq, t, c.resolution);
        double rhs = K * s.energy, margin = rhs - s.lhs;
        double scale = std::max(1.0, std::abs(rhs));
        bool ok = margin >= -tol * scale;
        Json e;
        e["function"] = t.label;
        e["lhs"] = number(s.lhs);
        e["rhs"] = number(rhs);
        e["margin"] = number(margin);
        e["holds"] = ok;
        checks.push_back(e);
        if (!ok) ++violations;
        if (margin / scale < worst_rel) {
            worst_rel = margin / scale;
            if (!ok) witness = e;
        }
    }
    Json r;
    r["measure"] = c.measure;
    r["inequality"] = ineq.name;
    r["constant"] = K;
    r["constant_source"] = source;
    r["tolerance"] = tol;
    r["estimate"] = to_json(est);
    r["checks"] = checks;
    r["violations"] = violations;
    r["worst_relative_margin"] = number(worst_rel);
    r["witness"] = witness;
    auto env = make_envelope("verify", to_json(c), !c.no_timestamp);
    return {violations ? 1 : 0, detail::finish(env, violations ? "fail" : "pass", r).dump(2)};
}

inline CommandOutput cmd_estimate(const RunConfig& c) {
    detail::require_json(c);
    auto mu = detail::config_measure(c, c.measure);
    auto ineq = detail::config_inequality(c);
    auto est = estimate_best_constant(mu, ineq, detail::config_families(c, mu, ineq), c.budget, c.seed);
    Json r = to_json(est);
    r["measure"] = c.measure;
    r["inequality"] = ineq.name;
    r["kind"] = "certified lower bound on the best constant";
    auto env = make_envelope("estimate", to_json(c), !c.no_timestamp);
    return {0, detail::finish(env, "ok", r).dump(2)};
}

inline CommandOutput cmd_profile(const RunConfig& c) {
    auto mu = detail::config_measure(c, c.measure);
    double alpha = c.alpha.value_or(2.0);
    auto p = halfline_profile(mu);
    if (c.format == "csv") return {0, p.csv(alpha)};
    auto k = profile_ratio_kappa(p, alpha);
    Json r;
    r["measure"] = c.measure;
    r["alpha"] = alpha;
    r["upper_bound_only"] = p.upper_bound_only;
    r["cheeger"] = number(cheeger_constant(p));
    r["kappa"] = {{"value", number(k.kappa)}, {"argmin", number(k.argmin)}, {"endpoint_attained", k.endpoint_attained},
                  {"decreasing_to_edge", k.decreasing_to_edge}};
    Json t = Json::array(), I = Json::array();
    for (std::size_t i = 0; i < p.t.size(); ++i) {
        t.push_back(number(p.t[i]));
        I.push_back(number(p.I[i]));
    }
    r["t"] = t;
    r["I"] = I;
    auto env = make_envelope("profile", to_json(c), !c.no_timestamp);
    return {0, detail::finish(env, p.upper_bound_only ? "upper-bound-only" : "ok", r).dump(2)};
}

inline CommandOutput cmd_criteria(const RunConfig& c) {
    detail::require_json(c);
    detail::Params p(c.params);
    auto expr = [&](const std::string& k, const std::string& fallback) { return ScalarFunction::parse(p.str(k, fallback)); };
    const std::string& n = c.checker;
    if (n.empty()) fail(ErrorKind::ConfigError, "--checker is required");
    CriterionVerdict v;
    if (n == "wang") {
        v = wang_checker(detail::config_measure(c, c.measure), p.num("lambda"), p.num("eps"));
    } else if (n == "weak_convexity") {
        v = weak_convexity_iso_checker(detail::config_measure(c, c.measure), cost_from_spec(c.cost), p.num("eps"));
    } else if (n == "perturbation") {
        v = perturbation_checker(detail::config_measure(c, c.measure), expr("V0", "x^2/2"), expr("V1", "0"), expr("p", "x^2/2"),
                                 p.num("eps"));
    } else if (n == "pcp") {
        auto mu = detail::config_measure(c, c.measure);
        auto V = p.text("V") ? expr("V", "") : mu.potential();
        v = pcp_checker(V, c.alpha.value_or(p.num("alpha", 2.0)), p.num("N", 1.0));
    } else if (n == "lyapunov") {
        std::string variant = p.str("variant", "drift");
        LyapunovVariant lv = variant == "drift"     ? LyapunovVariant::Drift
                             : variant == "growth"  ? LyapunovVariant::Growth
                             : variant == "hessian" ? LyapunovVariant::Hessian
                                                    : (fail(ErrorKind::ConfigError, "unknown variant '" + variant + "'"), LyapunovVariant::Drift);
        auto V = p.text("V") ? expr("V", "") : detail::config_measure(c, c.measure).potential();
        v = lyapunov_checker(V, expr("w", "x"), p.num("s"), p.num("t", 0.0), c.tau.value_or(p.num("tau", 1.0)), lv);
    } else if (n == "defect") {
        auto V = p.text("V") ? expr("V", "") : detail::config_measure(c, c.measure).potential();
        v = defect_dominated_by(V, cost_from_spec(c.cost), p.num("lambda"));
    } else if (n == "hessian_growth") {
        v = hessian_lower_with_growth(detail::config_measure(c, c.measure), p.num("p"), p.num("eps"), p.opt("K"), p.opt("L"));
    } else {
        fail(ErrorKind::ConfigError, "unknown checker '" + n + "'");
    }
    Json r = to_json(v);
    auto env = make_envelope("criteria", to_json(c), !c.no_timestamp);
    std::string status = v.holds == Holds::Yes ? "pass" : v.holds == Holds::No ? "fail" : "numeric-only";
    return {v.holds == Holds::No ? 1 : 0, detail::finish(env, status, r).dump(2)};
}

inline CommandOutput cmd_tighten(const RunConfig& c) {
    detail::require_json(c);
    detail::Params p(c.params);
    Json r;
    r["rule"] = c.rule;
    if (c.rule == "rothaus") {
        r["constant"] = number(rothaus_tight_constant(p.num("C"), p.num("D"), p.num("E")));
    } else if (c.rule == "lpdls") {
        auto F = generator_from_spec(c.F);
        auto res = lp_dls_poincare_constant(p.num("q", 2.0), p.num("C"), p.num("D"), p.num("M"), p.num("K"), &F);
        r["constant"] = number(res.constant);
        r["r_local"] = number(res.r_local);
        r["r_defect"] = number(res.r_defect);
        r["r"] = number(res.r);
    } else if (c.rule == "modified") {
        TighteningInput in;
        in.D = p.num("D");
        in.m = p.num("m");
        in.d = p.opt("d");
        in.A = p.opt("A");
        in.c_lower = p.num("c", 1.0);
        in.C_P = p.num("C_P");
        in.q = p.num("q", 2.0);
        in.phi2_max = p.opt("phi2_max");
        auto res = modified_tight_constant(in);
        r["multiplier"] = number(res.multiplier);
        r["A"] = number(res.A);
        r["gamma"] = number(res.gamma);
        r["hypothesis"] = res.hypothesis;
        r["trace"] = res.trace;
    } else {
        fail(ErrorKind::ConfigError, "--rule must be rothaus, lpdls or modified");
    }
    auto env = make_envelope("tighten", to_json(c), !c.no_timestamp);
    return {0, detail::finish(env, "ok", r).dump(2)};
}

inline CommandOutput cmd_transport(const RunConfig& c) {
    auto mu = detail::config_measure(c, c.measure);
    TransportPlan1D plan = [&] {
        if (!c.target.empty()) return quantile_coupling(mu, detail::config_measure(c, c.target), c.resolution);
        if (c.functions.size() != 2) fail(ErrorKind::ConfigError, "transport needs --target or two --function densities");
        // densities are normalized to unit mass
        auto f = test_function_from_spec(c.functions[0], Role::Density).f;
        auto g = test_function_from_spec(c.functions[1], Role::Density).f;
        return quantile_coupling(mu, f / expectation(mu, f), g / expectation(mu, g), c.resolution);
    }();
    if (c.format == "csv") return {0, plan.csv()};
    auto cost = cost_from_spec(c.cost);
    double lo = kInf, hi = -kInf;
    for (double d : plan.dT) {
        lo = std::min(lo, d);
        hi = std::max(hi, d);
    }
    Json r;
    r["source"] = c.measure;
    r["target"] = c.target.empty() ? Json(c.functions) : Json(c.target);
    r["cost"] = cost.name;
    r["transport_cost"] = number(transport_cost(plan, cost));
    r["points"] = plan.size();
    r["monotone"] = plan.monotone();
    r["min_dT"] = number(lo);
    r["max_dT"] = number(hi);
    auto env = make_envelope("transport", to_json(c), !c.no_timestamp);
    return {0, detail::finish(env, "ok", r).dump(2)};
}

inline CommandOutput cmd_report(const RunConfig& c) {
    detail::require_json(c);
    auto results = run_acceptance_suite(c.seed, true);
    int passed = 0;
    for (const auto& r : results) passed += r.pass;
    Json r;
    r["seed"] = c.seed;
    r["criteria"] = criteria_json(results, !c.no_timestamp);
    r["passed"] = passed;
    r["failed"] = static_cast<int>(results.size()) - passed;
    bool all = passed == static_cast<int>(results.size());
    auto env = make_envelope("report", to_json(c), !c.no_timestamp);
    return {all ? 0 : 1, detail::finish(env, all ? "pass" : "fail", r).dump(2)};
}

inline CommandOutput run_command(const RunConfig& c) {
    if (c.command == "verify") return cmd_verify(c);
    if (c.command == "estimate") return cmd_estimate(c);
    if (c.command == "profile") return cmd_profile(c);
    if (c.command == "criteria") return cmd_criteria(c);
    if (c.command == "tighten") return cmd_tighten(c);
    if (c.command == "transport") return cmd_transport(c);
    if (c.command == "report") return cmd_report(c);
    fail(ErrorKind::ConfigError, "unknown command '" + c.command + "'");
}

/// Full CLI entry: parse, run, write. Exit 0 pass, 1 violation, 2 configuration error.
inline int cli_main(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    RunConfig c;
    CLI::App app{"Numerical checks of functional inequalities for one-dimensional measures", "ineqforge"};
    bind_flags(app, c);
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    try {
        auto res = run_command(c);
        if (c.out.empty()) {
            out << res.text;
            if (!res.text.empty() && res.text.back() != '\n') out << "\n";
        } else {
            std::ofstream f(c.out, std::ios::binary);
            if (!f) fail(ErrorKind::ConfigError, "cannot open '" + c.out + "' for writing");
            f << res.text;
            if (!res.text.empty() && res.text.back() != '\n') f << "\n";
        }
        return res.exit_code;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace ineqforge
