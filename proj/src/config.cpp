#include "parlab/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "parlab/analytic.hpp"
#include "parlab/expr.hpp"
#include "parlab/io.hpp"
#include "parlab/kernels.hpp"
#include "parlab/probe.hpp"
#include "parlab/solver.hpp"

namespace parlab {

namespace {

using nlohmann::json;

void require_keys(const json& obj, const std::set<std::string>& allowed,
                  const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + " must be an object");
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError("unknown key '" + it.key() + "' in " + where);
}

double num(const json& j, const std::string& key, double dflt) {
    if (!j.contains(key)) return dflt;
    if (!j.at(key).is_number()) throw ConfigError("'" + key + "' must be a number");
    return j.at(key).get<double>();
}

double num_req(const json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key) || !j.at(key).is_number())
        throw ConfigError(where + " needs numeric '" + key + "'");
    return j.at(key).get<double>();
}

Vec2 vec2(const json& j, const std::string& key, Vec2 dflt = {0.0, 0.0}) {
    if (!j.contains(key)) return dflt;
    const json& v = j.at(key);
    if (!v.is_array() || v.empty() || v.size() > 2)
        throw ConfigError("'" + key + "' must be an array of 1 or 2 numbers");
    Vec2 out{0.0, 0.0};
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i].get<double>();
    return out;
}

struct BuiltProblem {
    ProblemSpec spec;
    std::function<double(Vec2, double)> exact; // null unless manufactured
    std::string source_text;
    std::string kind;
};

ManufacturedKind parse_kind(const std::string& s) {
    if (s == "plane") return ManufacturedKind::Plane;
    if (s == "quadratic-stationary") return ManufacturedKind::QuadraticStationary;
    if (s == "linear-in-time") return ManufacturedKind::LinearInTime;
    if (s == "heat-reference") return ManufacturedKind::HeatReference;
    throw ConfigError("unknown manufactured kind '" + s + "'");
}

BuiltProblem build_problem(const json& jp, double h_override = 0.0) {
    require_keys(jp, {"gamma", "p", "n", "eps", "grid", "manufactured", "q", "K", "initial",
                      "boundary", "source", "source_bound", "deviation_q", "cfl_safety",
                      "store_every"},
                 "problem");
    if (!jp.contains("grid")) throw ConfigError("problem needs a grid");
    const json& jg = jp.at("grid");
    require_keys(jg, {"h", "t_depth"}, "problem.grid");

    BuiltProblem bp;
    double h = h_override > 0.0 ? h_override : num_req(jg, "h", "grid");
    GridSpec grid = GridSpec::make(static_cast<int>(num(jp, "n", 1)), h,
                                   num_req(jg, "t_depth", "grid"));

    EquationParams eq;
    eq.gamma = num(jp, "gamma", 0.0);
    eq.p = num(jp, "p", 2.0);
    eq.n = grid.n;
    if (jp.contains("eps")) {
        if (jp.at("eps").is_string()) {
            if (jp.at("eps").get<std::string>() != "h")
                throw ConfigError("eps must be a number or \"h\"");
            eq.eps = grid.h;
        } else {
            eq.eps = jp.at("eps").get<double>();
        }
    } else {
        eq.eps = grid.h;
    }

    ProblemSpec& spec = bp.spec;
    spec.grid = grid;
    spec.cfl_safety = num(jp, "cfl_safety", 0.5);
    spec.store_every = static_cast<int>(num(jp, "store_every", 1));
    spec.q = vec2(jp, "deviation_q");

    if (jp.contains("manufactured")) {
        if (jp.contains("initial") || jp.contains("boundary") || jp.contains("source"))
            throw ConfigError("manufactured problems take no inline data");
        bp.kind = jp.at("manufactured").get<std::string>();
        ManufacturedKind kind = parse_kind(bp.kind);
        Vec2 q = vec2(jp, "q");
        double K = num(jp, "K", 0.0);
        ManufacturedPair pair = manufactured(kind, eq, q, K);
        eq.source = pair.f;
        eq.source_bound = pair.f_bound;
        eq.source_static = pair.f_static;
        bp.exact = pair.u;
        spec.initial = [u = pair.u, t0 = -grid.t_depth](Vec2 x) { return u(x, t0); };
        spec.boundary = pair.u;
    } else {
        if (!jp.contains("initial") || !jp.contains("boundary"))
            throw ConfigError("custom problems need 'initial' and 'boundary' expressions");
        Expr init = Expr::parse(jp.at("initial").get<std::string>());
        Expr bc = Expr::parse(jp.at("boundary").get<std::string>());
        spec.initial = [init, t0 = -grid.t_depth](Vec2 x) { return init.eval(x, t0); };
        spec.boundary = [bc](Vec2 x, double t) { return bc.eval(x, t); };
        bp.kind = "custom";
        if (jp.contains("source")) {
            Expr src = Expr::parse(jp.at("source").get<std::string>());
            bp.source_text = src.text();
            eq.source_static = !src.depends_on_t();
            eq.source = [src](Vec2 x, double t) { return src.eval(x, t); };
            if (jp.contains("source_bound")) {
                eq.source_bound = num_req(jp, "source_bound", "problem");
            } else {
                // estimated sup over the lattice at a few times
                double b = 0.0;
                for (int s = 0; s <= 8; ++s) {
                    double t = -grid.t_depth + s * grid.t_depth / 8.0;
                    for (int i = 0; i < grid.node_count(); ++i)
                        b = std::max(b, std::abs(src.eval(grid.coords(i), t)));
                }
                eq.source_bound = 1.05 * b;
            }
        }
    }
    spec.params = eq;
    return bp;
}

json fit_json(const FitResult& f) {
    return {{"slope", f.slope}, {"r2", f.r2}, {"samples", f.samples}, {"valid", f.valid}};
}

json report_json(const RegularityReport& r) {
    json h = json::object();
    for (auto [a, v] : r.holder) h[format_double(a)] = v;
    json osc = json::array();
    for (auto [w, o] : r.time_osc) osc.push_back({w, o});
    return {{"space_lip", r.space_lip},
            {"holder", h},
            {"time_osc", osc},
            {"time_exponent", fit_json(r.time_exponent)},
            {"alpha_est", fit_json(r.alpha_est)},
            {"subsampled", r.subsampled},
            {"pairs_evaluated", r.pairs_evaluated}};
}

const char* verdict_name(FlatnessVerdict v) {
    switch (v) {
        case FlatnessVerdict::Degenerate: return "Degenerate";
        case FlatnessVerdict::Smooth: return "Smooth";
        default: return "Unresolved";
    }
}

json report_json(const FlatnessReport& r) {
    json levels = json::array();
    for (const auto& l : r.levels)
        levels.push_back({{"k", l.k},
                          {"r", l.r},
                          {"lambda", l.lambda},
                          {"l", {l.l[0], l.l[1]}},
                          {"osc", l.osc},
                          {"osc_ok", l.osc_ok},
                          {"slope_ok", l.slope_ok},
                          {"increment", l.increment},
                          {"increment_ok", l.increment_ok}});
    return {{"verdict", verdict_name(r.verdict)},
            {"verdict_k", r.verdict_k},
            {"tau", r.tau},
            {"levels", levels},
            {"pass", r.pass}};
}

json report_json(const CertificateReport& r) {
    return {{"mode", r.spec.mode == CertificateMode::Holder ? "holder" : "lipschitz"},
            {"L1", r.spec.L1},
            {"L2", r.spec.L2},
            {"max_phi", r.max_phi},
            {"argmax_x", {r.argmax_x[0], r.argmax_x[1]}},
            {"argmax_y", {r.argmax_y[0], r.argmax_y[1]}},
            {"argmax_t", r.argmax_t},
            {"tolerance", r.tolerance},
            {"pass", r.pass}};
}

json report_json(const QSweepReport& r) {
    json rows = json::array();
    for (const auto& row : r.rows)
        rows.push_back({{"qnorm", row.qnorm},
                        {"q", {row.q[0], row.q[1]}},
                        {"lip_w", row.lip_w},
                        {"lip_u", row.lip_u},
                        {"wnorm", row.wnorm},
                        {"gamma0", row.gamma0},
                        {"above_gamma0", row.above_gamma0},
                        {"ok", row.ok},
                        {"error", row.error}});
    return {{"rows", rows}, {"ratio", r.ratio}, {"pass", r.pass}};
}

void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p);
    if (!out) throw ComputeError("cannot write " + p.string());
    out << text;
}

} // namespace

void validate_config(const json& config) {
    require_keys(config, {"problem", "probes", "output_dir", "seed", "dump_field"}, "config");
    if (!config.contains("problem")) throw ConfigError("config needs a problem");
    build_problem(config.at("problem")); // full problem validation
    if (config.contains("probes")) {
        if (!config.at("probes").is_array()) throw ConfigError("probes must be an array");
        int i = 0;
        for (const json& jp : config.at("probes")) {
            std::string where = "probes[" + std::to_string(i++) + "]";
            if (!jp.is_object() || !jp.contains("kind"))
                throw ConfigError(where + " needs a kind");
            std::string kind = jp.at("kind").get<std::string>();
            if (kind == "flatness")
                require_keys(jp, {"kind", "rho", "delta", "c2", "c3", "eps0", "kmax"}, where);
            else if (kind == "seminorms")
                require_keys(jp, {"kind", "r", "lambda", "alphas"}, where);
            else if (kind == "oscillation")
                require_keys(jp, {"kind", "r", "lambda"}, where);
            else if (kind == "certificate")
                require_keys(jp, {"kind", "mode", "beta", "nu", "kappa0", "s1", "L1", "L2",
                                  "x0", "y0", "t0", "slack"},
                             where);
            else if (kind == "sweep-q")
                require_keys(jp, {"kind", "q", "ratio_cap"}, where);
            else if (kind == "convergence")
                require_keys(jp, {"kind", "h", "min_order"}, where);
            else
                throw ConfigError(where + ": unknown probe kind '" + kind + "'");
        }
    }
}

int run_config(const json& config) {
    try {
        validate_config(config);
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(e.what()); // problem construction failures are config errors
    }

    BuiltProblem bp = build_problem(config.at("problem"));
    std::uint64_t seed = config.contains("seed") ? config.at("seed").get<std::uint64_t>() : 1;
    std::filesystem::path out_dir =
        config.contains("output_dir") ? config.at("output_dir").get<std::string>() : "parlab-out";
    bool dump = config.contains("dump_field") ? config.at("dump_field").get<bool>() : true;

    std::filesystem::create_directories(out_dir);

    SolveStats stats;
    ScalarField field;
    try {
        field = bp.spec.q[0] != 0.0 || bp.spec.q[1] != 0.0 ? solve_deviation(bp.spec, &stats)
                                                           : solve(bp.spec, &stats);
        if (dump)
            dump_field_csv(field, (out_dir / "field.csv").string(), bp.spec.params,
                           bp.source_text);
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ComputeError(std::string("stage solve: ") + e.what());
    }

    bool all_pass = true;
    json probe_summaries = json::array();
    int idx = 0;
    if (config.contains("probes")) {
        for (const json& jp : config.at("probes")) {
            std::string kind = jp.at("kind").get<std::string>();
            std::string stem = "probe_" + std::to_string(idx) + "_" + kind;
            json rj;
            bool pass = true;
            try {
            if (kind == "flatness") {
                FlatnessConfig cfg;
                cfg.rho = num(jp, "rho", cfg.rho);
                cfg.delta = num(jp, "delta", cfg.delta);
                cfg.c2 = num(jp, "c2", cfg.c2);
                cfg.c3 = num(jp, "c3", cfg.c3);
                cfg.eps0 = num(jp, "eps0", cfg.eps0);
                cfg.kmax = static_cast<int>(num(jp, "kmax", cfg.kmax));
                FlatnessReport rep = flatness_iteration(field, cfg, bp.spec.params.gamma);
                rj = report_json(rep);
                pass = rep.pass;
                std::string csv = "k,r,lambda,l1,l2,osc,osc_ok,slope_ok,increment,increment_ok\n";
                for (const auto& l : rep.levels)
                    csv += std::to_string(l.k) + ',' + format_double(l.r) + ',' +
                           format_double(l.lambda) + ',' + format_double(l.l[0]) + ',' +
                           format_double(l.l[1]) + ',' + format_double(l.osc) + ',' +
                           (l.osc_ok ? "1," : "0,") + (l.slope_ok ? "1," : "0,") +
                           format_double(l.increment) + ',' + (l.increment_ok ? "1" : "0") +
                           '\n';
                write_text(out_dir / (stem + ".csv"), csv);
            } else if (kind == "seminorms") {
                IntrinsicCylinder region{{0.0, 0.0}, field.t_final(), num(jp, "r", 0.75),
                                         num(jp, "lambda", 1.0), bp.spec.params.gamma};
                std::vector<double> alphas{0.5, 1.0};
                if (jp.contains("alphas")) {
                    alphas.clear();
                    for (const json& a : jp.at("alphas")) alphas.push_back(a.get<double>());
                }
                RegularityReport rep = seminorms(field, region, alphas, seed);
                rj = report_json(rep);
            } else if (kind == "oscillation") {
                IntrinsicCylinder cyl{{0.0, 0.0}, field.t_final(), num(jp, "r", 0.5),
                                      num(jp, "lambda", 1.0), bp.spec.params.gamma};
                rj = {{"osc", oscillation(field, cyl)}, {"pass", true}};
            } else if (kind == "certificate") {
                CertificateSpec cs;
                std::string mode = jp.contains("mode") ? jp.at("mode").get<std::string>()
                                                       : "holder";
                if (mode != "holder" && mode != "lipschitz")
                    throw ConfigError("certificate mode must be holder or lipschitz");
                cs.mode = mode == "holder" ? CertificateMode::Holder : CertificateMode::Lipschitz;
                cs.beta = num(jp, "beta", cs.beta);
                cs.nu = num(jp, "nu", cs.nu);
                cs.kappa0 = num(jp, "kappa0", cs.kappa0);
                cs.s1 = num(jp, "s1", cs.s1);
                cs.L1 = num(jp, "L1", cs.L1);
                cs.L2 = num(jp, "L2", cs.L2);
                cs.x0 = vec2(jp, "x0");
                cs.y0 = vec2(jp, "y0");
                cs.t0 = num(jp, "t0", 0.0);
                cs.slack = num(jp, "slack", 0.0);
                CertificateReport rep = doubling_certificate(field, cs);
                rj = report_json(rep);
                pass = rep.pass;
            } else if (kind == "sweep-q") {
                if (!jp.contains("q")) throw ConfigError("sweep-q needs a q list");
                std::vector<Vec2> qs;
                for (const json& jq : jp.at("q")) {
                    if (jq.is_number())
                        qs.push_back({jq.get<double>(), 0.0});
                    else
                        qs.push_back({jq[0].get<double>(),
                                      jq.size() > 1 ? jq[1].get<double>() : 0.0});
                }
                QSweepReport rep = q_sweep(bp.spec, qs, num(jp, "ratio_cap", 2.0));
                rj = report_json(rep);
                pass = rep.pass;
                std::string csv = "qnorm,q1,q2,lip_w,lip_u,wnorm,gamma0,above_gamma0,ok\n";
                for (const auto& row : rep.rows)
                    csv += format_double(row.qnorm) + ',' + format_double(row.q[0]) + ',' +
                           format_double(row.q[1]) + ',' + format_double(row.lip_w) + ',' +
                           format_double(row.lip_u) + ',' + format_double(row.wnorm) + ',' +
                           format_double(row.gamma0) + ',' + (row.above_gamma0 ? "1," : "0,") +
                           (row.ok ? "1" : "0") + '\n';
                write_text(out_dir / (stem + ".csv"), csv);
            } else if (kind == "convergence") {
                if (!bp.exact)
                    throw ConfigError("convergence probe needs a manufactured problem");
                std::vector<double> hs{0.04, 0.02, 0.01};
                if (jp.contains("h")) {
                    hs.clear();
                    for (const json& jh : jp.at("h")) hs.push_back(jh.get<double>());
                }
                double min_order = num(jp, "min_order", 1.5);
                std::vector<std::pair<double, double>> errs;
                for (double h : hs) {
                    BuiltProblem bph = build_problem(config.at("problem"), h);
                    bph.spec.store_every = 1 << 30; // final slice only
                    ScalarField fh = bph.spec.q[0] != 0.0 || bph.spec.q[1] != 0.0
                                         ? solve_deviation(bph.spec)
                                         : solve(bph.spec);
                    double err = 0.0;
                    const auto& top = fh.slices.back();
                    for (int i = 0; i < fh.spec.node_count(); ++i)
                        err = std::max(err,
                                       std::abs(top[i] - bph.exact(fh.spec.coords(i), 0.0)));
                    errs.emplace_back(h, err);
                }
                FitResult fit = loglog_fit(errs);
                pass = fit.valid && fit.slope >= min_order;
                json table = json::array();
                for (auto [h, e] : errs) table.push_back({h, e});
                rj = {{"errors", table}, {"order", fit.slope}, {"min_order", min_order},
                      {"pass", pass}};
                std::string csv = "h,sup_error\n";
                for (auto [h, e] : errs)
                    csv += format_double(h) + ',' + format_double(e) + '\n';
                write_text(out_dir / (stem + ".csv"), csv);
            }
            } catch (const ConfigError&) {
                throw;
            } catch (const Error& e) {
                throw ComputeError("stage " + stem + ": " + e.what());
            }
            if (rj.contains("pass")) pass = rj.at("pass").get<bool>();
            all_pass = all_pass && pass;
            write_text(out_dir / (stem + ".json"), rj.dump(2) + "\n");
            probe_summaries.push_back({{"kind", kind}, {"pass", pass}, {"report", stem + ".json"}});
            ++idx;
        }
    }

    json manifest;
    manifest["config"] = config;
    manifest["kernel_lane"] = kernels::active().name;
    manifest["problem_kind"] = bp.kind;
    manifest["steps"] = stats.steps;
    manifest["min_margin"] = stats.min_margin;
    auto history_json = [](const std::vector<double>& v) {
        if (v.size() <= 10'000) return json(v);
        double mn = v[0], mx = v[0], sum = 0;
        for (double d : v) {
            mn = std::min(mn, d);
            mx = std::max(mx, d);
            sum += d;
        }
        json sampled = json::array();
        std::size_t stride = v.size() / 1000 + 1;
        for (std::size_t i = 0; i < v.size(); i += stride) sampled.push_back(v[i]);
        return json{{"count", v.size()}, {"first", v.front()}, {"last", v.back()},
                    {"min", mn},         {"max", mx},          {"sum", sum},
                    {"sampled", sampled}};
    };
    manifest["dt_history"] = history_json(stats.dt_history);
    manifest["stability_margins"] = history_json(stats.margin_history);
    manifest["probes"] = probe_summaries;
    write_text(out_dir / "manifest.json", manifest.dump(2) + "\n");

    return all_pass ? 0 : 1;
}

int run_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config " + path);
    json config;
    try {
        config = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return run_config(config);
}

} // namespace parlab
