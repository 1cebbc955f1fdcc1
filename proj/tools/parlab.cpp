#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "parlab/config.hpp"
#include "parlab/errors.hpp"

using nlohmann::json;

namespace {

struct ProblemFlags {
    double gamma = 0.0, p = 2.0;
    int n = 1;
    double h = 0.02, t_depth = 1.0;
    std::string eps = "h";
    std::string manufactured;
    std::string initial, boundary, source;
    double source_bound = -1.0;
    std::vector<double> q;
    std::vector<double> deviation_q;
    double K = 0.0;
    double cfl = 0.5;
    int store_every = 1;
    std::string out = "parlab-out";
    long long seed = 1;
};

void add_problem_flags(CLI::App* cmd, ProblemFlags& f) {
    cmd->add_option("--gamma", f.gamma, "degeneracy exponent");
    cmd->add_option("--p", f.p, "p of the normalized p-Laplacian");
    cmd->add_option("--n", f.n, "spatial dimension (1 or 2)");
    cmd->add_option("--grid-h", f.h, "grid spacing");
    cmd->add_option("--t-depth", f.t_depth, "backward time extent");
    cmd->add_option("--eps", f.eps, "gradient regularization (number or 'h')");
    cmd->add_option("--manufactured", f.manufactured,
                    "plane|quadratic-stationary|linear-in-time|heat-reference");
    cmd->add_option("--initial", f.initial, "initial data expression");
    cmd->add_option("--boundary", f.boundary, "boundary data expression");
    cmd->add_option("--source", f.source, "source expression");
    cmd->add_option("--source-bound", f.source_bound, "sup |f| (estimated when omitted)");
    cmd->add_option("--slope", f.q, "manufactured plane slope")->expected(1, 2);
    cmd->add_option("--deviation-q", f.deviation_q, "deviation plane slope")->expected(1, 2);
    cmd->add_option("--K", f.K, "linear-in-time rate");
    cmd->add_option("--cfl", f.cfl, "CFL safety factor in (0,1]");
    cmd->add_option("--store-every", f.store_every, "keep every k-th slice");
    cmd->add_option("--out", f.out, "output directory");
    cmd->add_option("--seed", f.seed, "seed for deterministic subsampling");
}

json problem_json(const ProblemFlags& f) {
    json jp;
    jp["gamma"] = f.gamma;
    jp["p"] = f.p;
    jp["n"] = f.n;
    jp["grid"] = {{"h", f.h}, {"t_depth", f.t_depth}};
    if (f.eps == "h")
        jp["eps"] = "h";
    else
        jp["eps"] = std::stod(f.eps);
    jp["cfl_safety"] = f.cfl;
    jp["store_every"] = f.store_every;
    if (!f.manufactured.empty()) {
        jp["manufactured"] = f.manufactured;
        if (!f.q.empty()) jp["q"] = f.q;
        if (f.K != 0.0) jp["K"] = f.K;
    } else {
        jp["initial"] = f.initial;
        jp["boundary"] = f.boundary;
        if (!f.source.empty()) jp["source"] = f.source;
        if (f.source_bound >= 0.0) jp["source_bound"] = f.source_bound;
    }
    if (!f.deviation_q.empty()) jp["deviation_q"] = f.deviation_q;
    return jp;
}

json base_config(const ProblemFlags& f) {
    json cfg;
    cfg["problem"] = problem_json(f);
    cfg["output_dir"] = f.out;
    cfg["seed"] = f.seed;
    cfg["probes"] = json::array();
    return cfg;
}

int dispatch(const json& cfg) {
    int status = parlab::run_config(cfg);
    if (status == 0)
        std::printf("ok: all probes passed (artifacts in %s)\n",
                    cfg.at("output_dir").get<std::string>().c_str());
    else
        std::printf("probe failure (artifacts in %s)\n",
                    cfg.at("output_dir").get<std::string>().c_str());
    return status;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"parlab: a numerical laboratory for degenerate parabolic regularity probes"};
    app.require_subcommand(1);

    // run
    std::string config_path;
    CLI::App* run = app.add_subcommand("run", "execute a JSON run config");
    run->add_option("config", config_path, "path to config.json")->required();

    // solve
    ProblemFlags sf;
    sf.manufactured = "heat-reference";
    CLI::App* solve = app.add_subcommand("solve", "solve a problem and dump the field");
    add_problem_flags(solve, sf);

    // probe (seminorms)
    ProblemFlags pf;
    pf.manufactured = "quadratic-stationary";
    pf.gamma = 1.0;
    pf.p = 3.0;
    double probe_r = 0.75, probe_lambda = 1.0;
    std::vector<double> alphas{0.5, 1.0};
    CLI::App* probe = app.add_subcommand("probe", "solve and measure seminorms");
    add_problem_flags(probe, pf);
    probe->add_option("--r", probe_r, "probe cylinder radius");
    probe->add_option("--lambda", probe_lambda, "probe cylinder scale");
    probe->add_option("--alphas", alphas, "Holder exponents")->expected(1, 8);

    // flatness
    ProblemFlags ff;
    ff.manufactured = "quadratic-stationary";
    ff.gamma = 1.0;
    ff.p = 3.0;
    ff.store_every = 10;
    // rho = 0.1 resolves only one level on desk-scale grids; the preset
    // defaults keep five levels resolvable at grid-h 0.02
    double rho = 0.5, delta = 0.05, c2 = 1.0, c3 = 2.0, eps0 = 0.05;
    int kmax = 4;
    CLI::App* flat = app.add_subcommand("flatness", "solve and run the flatness iteration");
    add_problem_flags(flat, ff);
    flat->add_option("--rho", rho, "spatial shrink factor");
    flat->add_option("--delta", delta, "scale shrink factor");
    flat->add_option("--c2", c2, "slope cap constant");
    flat->add_option("--c3", c3, "slope increment constant");
    flat->add_option("--eps0", eps0, "source smallness threshold");
    flat->add_option("--kmax", kmax, "iteration cap");

    // certify
    ProblemFlags cf;
    cf.gamma = 1.0;
    cf.p = 3.0;
    cf.n = 2;
    cf.h = 0.1;
    cf.initial = "0.4*x1";
    cf.boundary = "0.4*x1";
    cf.store_every = 50;
    std::string mode = "holder";
    double beta = 0.5, nu = 1.5, kappa0 = 0.05, s1 = 0.0, L1 = 0.5, L2 = 1.0, t0 = 0.0,
           slack = 0.0;
    std::vector<double> x0{0.0, 0.0}, y0{0.0, 0.0};
    CLI::App* cert = app.add_subcommand("certify", "solve and run a doubling certificate");
    add_problem_flags(cert, cf);
    cert->add_option("--mode", mode, "holder|lipschitz");
    cert->add_option("--beta", beta, "Holder exponent");
    cert->add_option("--nu", nu, "Lipschitz phi exponent (1,2)");
    cert->add_option("--kappa0", kappa0, "Lipschitz phi coefficient");
    cert->add_option("--s1", s1, "phi clip point (0 = derived)");
    cert->add_option("--L1", L1, "localization constant");
    cert->add_option("--L2", L2, "modulus constant");
    cert->add_option("--x0", x0, "x pinning point")->expected(1, 2);
    cert->add_option("--y0", y0, "y pinning point")->expected(1, 2);
    cert->add_option("--t0", t0, "time pinning point");
    cert->add_option("--slack", slack, "extra tolerance");

    // sweep-q
    ProblemFlags qf;
    qf.gamma = 1.0;
    qf.p = 3.0;
    qf.n = 2;
    qf.h = 0.0625;
    qf.initial = "0.25*sin(pi*(x1+x2)/2)";
    qf.boundary = "0.25*sin(pi*(x1+x2)/2)";
    qf.source = "0.1*cos(pi*x1)";
    qf.store_every = 100;
    std::vector<double> qlist{4, 8, 16, 32};
    double ratio_cap = 2.0;
    CLI::App* sweep = app.add_subcommand("sweep-q", "uniform-in-slope Lipschitz sweep");
    add_problem_flags(sweep, qf);
    sweep->add_option("--q", qlist, "slope magnitudes (along x1)")->expected(1, 16)
        ->delimiter(',');
    sweep->add_option("--ratio-cap", ratio_cap, "pass threshold for max/min Lipschitz ratio");

    // convergence
    ProblemFlags vf;
    vf.manufactured = "quadratic-stationary";
    vf.gamma = 1.0;
    vf.p = 3.0;
    vf.n = 2;
    vf.t_depth = 0.1;
    std::vector<double> hs{0.04, 0.02, 0.01};
    double min_order = 1.5;
    CLI::App* conv = app.add_subcommand("convergence", "manufactured-solution order study");
    add_problem_flags(conv, vf);
    conv->add_option("--h-list", hs, "grid spacings")->expected(1, 8)->delimiter(',');
    conv->add_option("--min-order", min_order, "pass threshold for the fitted order");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            int status = parlab::run_config_file(config_path);
            if (status != 0) std::fprintf(stderr, "probe failure (exit %d)\n", status);
            return status;
        }
        if (solve->parsed()) return dispatch(base_config(sf));
        if (probe->parsed()) {
            json cfg = base_config(pf);
            json jp = {{"kind", "seminorms"}, {"r", probe_r}, {"lambda", probe_lambda},
                       {"alphas", alphas}};
            cfg["probes"].push_back(jp);
            return dispatch(cfg);
        }
        if (flat->parsed()) {
            json cfg = base_config(ff);
            cfg["probes"].push_back({{"kind", "flatness"},
                                     {"rho", rho},
                                     {"delta", delta},
                                     {"c2", c2},
                                     {"c3", c3},
                                     {"eps0", eps0},
                                     {"kmax", kmax}});
            return dispatch(cfg);
        }
        if (cert->parsed()) {
            json cfg = base_config(cf);
            cfg["probes"].push_back({{"kind", "certificate"},
                                     {"mode", mode},
                                     {"beta", beta},
                                     {"nu", nu},
                                     {"kappa0", kappa0},
                                     {"s1", s1},
                                     {"L1", L1},
                                     {"L2", L2},
                                     {"x0", x0},
                                     {"y0", y0},
                                     {"t0", t0},
                                     {"slack", slack}});
            return dispatch(cfg);
        }
        if (sweep->parsed()) {
            json cfg = base_config(qf);
            json qs = json::array();
            for (double q : qlist) qs.push_back(q);
            cfg["probes"].push_back({{"kind", "sweep-q"}, {"q", qs}, {"ratio_cap", ratio_cap}});
            return dispatch(cfg);
        }
        if (conv->parsed()) {
            json cfg = base_config(vf);
            cfg["probes"].push_back({{"kind", "convergence"}, {"h", hs},
                                     {"min_order", min_order}});
            return dispatch(cfg);
        }
    } catch (const parlab::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "compute error: %s\n", e.what());
        return 3;
    }
    return 0;
}
