// Acceptance suite: one pass/fail line per criterion. Exit status is the
// number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "parlab/analytic.hpp"
#include "parlab/operators.hpp"
#include "parlab/probe.hpp"
#include "parlab/solver.hpp"

using namespace parlab;

namespace {

struct Rng {
    std::uint64_t s;
    std::uint64_t next() {
        std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    double uniform(double lo, double hi) { return lo + (hi - lo) * (next() >> 11) * 0x1.0p-53; }
};

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

ProblemSpec make_problem(double gamma, double p, int n, double h, double t_depth,
                         std::function<double(Vec2, double)> data,
                         std::function<double(Vec2, double)> source = {},
                         double source_bound = 0.0) {
    ProblemSpec spec;
    spec.grid = GridSpec::make(n, h, t_depth);
    spec.params.gamma = gamma;
    spec.params.p = p;
    spec.params.n = n;
    spec.params.eps = h;
    spec.params.source = std::move(source);
    spec.params.source_bound = source_bound;
    spec.initial = [data, t0 = -t_depth](Vec2 x) { return data(x, t0); };
    spec.boundary = data;
    return spec;
}

double fit_order(const std::vector<std::pair<double, double>>& herr) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto [h, e] : herr) {
        double lx = std::log(h), ly = std::log(e);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    double m = static_cast<double>(herr.size());
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

// ---------------------------------------------------------------------------

bool criterion1(std::string& detail) {
    // 20 random slopes, f = 0, 101-node 1D grid, unit time, tolerance 1e-10
    Rng rng{101};
    double gammas[] = {0.0, 1.0, 2.0};
    double ps[] = {1.5, 2.0, 3.0};
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        double q = rng.uniform(-2.0, 2.0);
        auto plane = [q](Vec2 x, double) { return q * x[0]; };
        ProblemSpec spec = make_problem(gammas[trial % 3], ps[(trial / 3) % 3], 1, 0.02, 1.0,
                                        plane);
        spec.store_every = 2000;
        ScalarField f = solve(spec);
        for (int s = 0; s < f.slice_count(); ++s)
            for (int i = 0; i < f.spec.node_count(); ++i)
                worst = std::max(worst,
                                 std::abs(f.slices[s][i] - plane(f.spec.coords(i), 0.0)));
    }
    detail = fmt("max drift %.2e (tol 1e-10), 20 slopes", worst);
    return worst <= 1e-10;
}

bool criterion2(std::string& detail) {
    // quadratic-stationary pair, n = 2, sup error at t = 0, order >= 1.5 over
    // h = 0.04, 0.02, 0.01. gamma = 0 runs unregularized (no degeneracy
    // factor to floor); gamma > 0 runs with eps = h.
    detail.clear();
    bool all = true;
    for (double gamma : {0.0, 1.0, 2.0})
        for (double p : {1.5, 3.0}) {
            std::vector<std::pair<double, double>> herr;
            for (double h : {0.04, 0.02, 0.01}) {
                EquationParams eq;
                eq.gamma = gamma;
                eq.p = p;
                eq.n = 2;
                eq.eps = gamma == 0.0 ? 0.0 : h;
                ManufacturedPair mp = manufactured(ManufacturedKind::QuadraticStationary, eq);
                ProblemSpec spec = make_problem(gamma, p, 2, h, 0.1, mp.u, mp.f, mp.f_bound);
                spec.params.eps = eq.eps;
                spec.store_every = 1 << 30;
                ScalarField f = solve(spec);
                double err = 0.0;
                for (int i = 0; i < f.spec.node_count(); ++i)
                    err = std::max(err,
                                   std::abs(f.slices.back()[i] - mp.u(f.spec.coords(i), 0.0)));
                herr.emplace_back(h, err);
            }
            double order = fit_order(herr);
            bool ok = order >= 1.5;
            all = all && ok;
            detail += fmt("g%.0fp%.1f:%.2f%s ", gamma, p, order, ok ? "" : "!");
        }
    detail = "fitted orders " + detail + "(req >= 1.5)";
    return all;
}

bool criterion3(std::string& detail) {
    EquationParams eq;
    eq.gamma = 0.0;
    eq.p = 2.0;
    eq.n = 2;
    eq.eps = 0.0;
    ManufacturedPair mp = manufactured(ManufacturedKind::HeatReference, eq);
    ProblemSpec spec = make_problem(0.0, 2.0, 2, 0.02, 0.1, mp.u);
    spec.params.eps = 0.0;
    spec.cfl_safety = 0.25;
    spec.store_every = 1 << 30;
    ScalarField f = solve(spec);
    double worst = 0.0;
    for (int i = 0; i < f.spec.node_count(); ++i)
        worst = std::max(worst, std::abs(f.slices.back()[i] - mp.u(f.spec.coords(i), 0.0)));
    detail = fmt("sup error %.2e vs closed form (tol 1e-3)", worst);
    return worst < 1e-3;
}

bool criterion4(std::string& detail) {
    // supersolution residual over the parameter grid, then domination of a
    // solved field whose measured norms feed M2
    double worst_resid = 1e18;
    int combos = 0;
    for (double gamma : {0.0, 0.5, 1.0, 2.0})
        for (double p : {1.5, 2.0, 3.0})
            for (int n : {1, 2})
                for (double eta : {0.1, 0.5, 1.0}) {
                    ++combos;
                    BarrierSpec bs;
                    bs.gamma = gamma;
                    bs.p = p;
                    bs.n = n;
                    bs.eta = eta;
                    bs.clip = 1.0;
                    bs.unorm = 0.5;
                    bs.fnorm = 0.05;
                    bs.t0 = -0.25;
                    GridSpec g = GridSpec::make(n, n == 1 ? 0.02 : 0.05, 0.25, 0.0125);
                    ScalarField f = ScalarField::from_function(
                        g, [&](Vec2 x, double t) { return barrier_upper(x, t, bs); }, 0.0);
                    EquationParams eq;
                    eq.gamma = gamma;
                    eq.p = p;
                    eq.n = n;
                    eq.eps = 1e-8; // certified inequality is for the raw |Dv|^gamma
                    eq.source = [&](Vec2, double) { return bs.fnorm; };
                    eq.source_bound = bs.fnorm;
                    for (int s = 1; s < f.slice_count(); ++s)
                        for (int i = 0; i < g.node_count(); ++i) {
                            if (g.is_boundary(i) || norm(g.coords(i)) >= 11.0 / 16.0) continue;
                            worst_resid = std::min(worst_resid, residual(f, eq, i, s));
                        }
                }

    int crossings = 0;
    for (double gamma : {0.0, 1.0}) {
        auto data = [](Vec2 x, double) { return 0.35 * std::sin(2.2 * x[0]) + 0.1 * x[0]; };
        ProblemSpec spec = make_problem(gamma, 3.0, 1, 0.02, 1.0, data,
                                        [](Vec2 x, double) { return 0.04 * std::cos(2 * x[0]); },
                                        0.04);
        spec.store_every = 20;
        ScalarField u = solve(spec);
        IntrinsicCylinder reg{{0, 0}, 0.0, 0.9, 1.0, 0.0};
        RegularityReport sem = seminorms(u, reg, {}, 1);
        double unorm = 0.0;
        for (const auto& sl : u.slices)
            for (double v : sl) unorm = std::max(unorm, std::abs(v));
        double slack = 1e-8 + 2.0 * u.spec.h;
        for (double t0 : {-0.25, -0.0625})
            for (double eta : {0.1, 0.5, 1.0}) {
                BarrierSpec bs;
                bs.gamma = gamma;
                bs.p = 3.0;
                bs.n = 1;
                bs.eta = eta;
                bs.t0 = t0;
                bs.clip = sem.space_lip;
                bs.unorm = unorm;
                bs.fnorm = 0.04;
                bs.u0 = sample(u, {0, 0}, t0);
                for (int s = 0; s < u.slice_count(); ++s) {
                    if (u.times[s] < t0) continue;
                    for (int i = 0; i < u.spec.node_count(); ++i) {
                        Vec2 x = u.spec.coords(i);
                        if (std::abs(x[0]) >= 11.0 / 16.0) continue;
                        if (u.slices[s][i] - barrier_upper(x, u.times[s], bs) > slack)
                            ++crossings;
                    }
                }
            }
    }
    detail = fmt("%d combos, worst residual %.1e (>= -1e-8); %d interior crossings", combos,
                 worst_resid, crossings);
    return worst_resid >= -1e-8 && crossings == 0;
}

bool criterion5(std::string& detail) {
    detail.clear();
    bool all = true;
    for (double gamma : {0.0, 1.0, 2.0}) {
        auto data = [](Vec2 x, double) {
            return 0.4 * std::cos(std::numbers::pi / 2.0 * x[0]);
        };
        ProblemSpec spec = make_problem(gamma, 3.0, 1, 0.02, 1.0, data,
                                        [](Vec2 x, double) { return 0.02 * std::cos(3 * x[0]); },
                                        0.02);
        spec.store_every = 1;
        ScalarField f = solve(spec);
        IntrinsicCylinder region{{0, 0}, 0.0, 1.0, 1.0, 0.0}; // depth 1: windows from 1/4
        RegularityReport rep = seminorms(f, region, {}, 1);
        double req = std::min(0.5, 1.0 / (2.0 + gamma)) - 0.1;
        bool ok = rep.time_exponent.valid && rep.time_exponent.slope >= req &&
                  rep.time_exponent.r2 >= 0.95;
        all = all && ok;
        detail += fmt("g%.0f:nu=%.2f,R2=%.3f%s ", gamma, rep.time_exponent.slope,
                      rep.time_exponent.r2, ok ? "" : "!");
    }
    detail += "(req nu >= min(1/2,1/(2+g))-0.1, R2 >= 0.95)";
    return all;
}

bool criterion6(std::string& detail) {
    Rng rng{66};
    double worst = 0.0;
    int pairs = 0;
    for (double gamma : {0.0, 1.0, 2.0})
        for (double p : {1.5, 3.0})
            for (int trial = 0; trial < 10; ++trial) {
                ++pairs;
                GridSpec g = GridSpec::make(1, 0.05, 0.2);
                double a = rng.uniform(0.1, 0.35), b = rng.uniform(0.5, 3.0);
                double c = rng.uniform(-0.2, 0.2);
                double bump = rng.uniform(0.02, 0.2), w = rng.uniform(0.5, 2.5);
                double ph = rng.uniform(0.0, 6.28);
                auto hi_data = [=](Vec2 x, double) { return a * std::sin(b * x[0]) + c; };
                auto lo_data = [=](Vec2 x, double t) {
                    return hi_data(x, t) - bump * (1.0 + std::cos(w * x[0] + ph)) / 2.0;
                };
                EquationParams eq;
                eq.gamma = gamma;
                eq.p = p;
                eq.n = 1;
                eq.eps = 0.05;
                Stepper shi(eq, {0, 0}, g, hi_data, 0.5);
                Stepper slo(eq, {0, 0}, g, lo_data, 0.5);
                std::vector<double> uhi(g.node_count()), ulo(g.node_count());
                for (int i = 0; i < g.node_count(); ++i) {
                    uhi[i] = hi_data(g.coords(i), -0.2);
                    ulo[i] = lo_data(g.coords(i), -0.2);
                }
                double t = -0.2;
                while (t < -1e-14) {
                    double dt = std::min(shi.stable_dt(uhi), slo.stable_dt(ulo));
                    if (t + dt > -1e-14) dt = -t;
                    uhi = shi.step(uhi, t, dt);
                    ulo = slo.step(ulo, t, dt);
                    t += dt;
                    for (int i = 0; i < g.node_count(); ++i)
                        worst = std::max(worst, ulo[i] - uhi[i]);
                }
            }
    detail = fmt("%d ordered pairs, max interior violation %.2e (tol 1e-8)", pairs, worst);
    return worst <= 1e-8;
}

bool criterion7(std::string& detail) {
    FlatnessConfig cfg;
    cfg.rho = 0.5;
    cfg.delta = 0.05;
    cfg.c2 = 1.0;
    cfg.c3 = 1.0;
    cfg.kmax = 4;

    // steep plane: Smooth(0)
    GridSpec g = GridSpec::make(1, 0.02, 1.0, 0.01);
    ScalarField plane =
        ScalarField::from_function(g, [](Vec2 x, double) { return 2.0 * x[0]; });
    FlatnessReport rp = flatness_iteration(plane, cfg, 1.0);
    bool plane_ok = rp.verdict == FlatnessVerdict::Smooth && rp.verdict_k == 0;

    // u = 0: Degenerate through k = 4
    GridSpec gz = GridSpec::make(1, 0.02, 1.0, 0.002);
    ScalarField zero = ScalarField::from_function(gz, [](Vec2, double) { return 0.0; });
    FlatnessReport rz = flatness_iteration(zero, cfg, 1.0);
    bool zero_ok = rz.verdict == FlatnessVerdict::Degenerate && rz.levels.size() == 5;
    for (const auto& lev : rz.levels)
        zero_ok = zero_ok && lev.osc_ok && lev.slope_ok && lev.increment_ok;

    // solved field with a critical point at the origin
    EquationParams eq;
    eq.gamma = 1.0;
    eq.p = 3.0;
    eq.n = 1;
    eq.eps = 0.02;
    ManufacturedPair mp = manufactured(ManufacturedKind::QuadraticStationary, eq);
    ProblemSpec spec = make_problem(1.0, 3.0, 1, 0.02, 1.0, mp.u, mp.f, mp.f_bound);
    spec.store_every = 40;
    ScalarField u = solve(spec);
    FlatnessReport rs = flatness_iteration(u, cfg, eq.gamma);
    bool solved_ok = rs.verdict == FlatnessVerdict::Degenerate && rs.levels.size() == 5;
    for (const auto& lev : rs.levels)
        solved_ok = solved_ok && lev.osc_ok && lev.slope_ok && lev.increment_ok;

    detail = fmt("plane Smooth(0): %s; zero Degenerate k<=4: %s; solved Degenerate k<=4: %s",
                 plane_ok ? "yes" : "NO", zero_ok ? "yes" : "NO", solved_ok ? "yes" : "NO");
    return plane_ok && zero_ok && solved_ok;
}

bool criterion8(std::string& detail) {
    auto data = [](Vec2 x, double) {
        return 0.25 * std::sin(std::numbers::pi * (x[0] + x[1]) / 2.0);
    };
    ProblemSpec base = make_problem(1.0, 3.0, 2, 0.0625, 1.0, data,
                                    [](Vec2 x, double) {
                                        return 0.1 * std::cos(std::numbers::pi * x[0]);
                                    },
                                    0.1);
    base.store_every = 100;
    std::vector<Vec2> qs{{4, 0}, {8, 0}, {16, 0}, {32, 0}};
    QSweepReport rep = q_sweep(base, qs);
    bool solved = true;
    std::vector<std::pair<double, double>> wfit, ufit;
    for (const auto& row : rep.rows) {
        solved = solved && row.ok;
        if (row.ok) {
            wfit.emplace_back(row.qnorm, row.lip_w);
            ufit.emplace_back(row.qnorm, row.lip_u);
        }
    }
    double wslope = solved ? fit_order(wfit) : 1e9;
    double uslope = solved ? fit_order(ufit) : 0.0;
    bool ok = solved && rep.ratio < 2.0 && wslope < 0.05 && uslope > 0.9 && uslope < 1.1;
    detail = fmt("lip(w) ratio %.3f (< 2), trend slope %.3f (< 0.05); control lip(u) slope "
                 "%.2f (~1)",
                 rep.ratio, wslope, uslope);
    return ok;
}

bool criterion9(std::string& detail) {
    // 21-node / 10-slice probe grid, plane field u = 0.4 x1
    GridSpec g = GridSpec::make(2, 0.1, 1.0, 1.0 / 9.0);
    double a = 0.4;
    ScalarField f = ScalarField::from_function(g, [a](Vec2 x, double) { return a * x[0]; });
    double unorm = a; // sup |u| over the box
    double gamma = 1.0;
    double recipe = unorm + std::pow(unorm, 1.0 / (1.0 + gamma)); // f = 0 term drops

    auto sharp_threshold = [&](const CertificateSpec& cs) {
        // enumeration oracle: max over triples of (du - loc)/phi(|x-y|)
        double r = cs.domain_radius();
        double best = 0.0;
        for (int s = 0; s < f.slice_count(); ++s) {
            if (f.times[s] < f.t_final() - r * r - 1e-12) continue;
            double lt = 0.5 * cs.L1 * (f.times[s] - cs.t0) * (f.times[s] - cs.t0);
            for (int i = 0; i < g.node_count(); ++i)
                for (int j = 0; j < g.node_count(); ++j) {
                    Vec2 xi = g.coords(i), xj = g.coords(j);
                    if (norm(xi) > r + 1e-12 || norm(xj) > r + 1e-12 || i == j) continue;
                    double du = f.slices[s][i] - f.slices[s][j];
                    double loc = 0.5 * cs.L1 *
                                     (std::pow(xi[0] - cs.x0[0], 2) +
                                      std::pow(xi[1] - cs.x0[1], 2) +
                                      std::pow(xj[0] - cs.y0[0], 2) +
                                      std::pow(xj[1] - cs.y0[1], 2)) +
                                 lt;
                    double dist = std::hypot(xi[0] - xj[0], xi[1] - xj[1]);
                    best = std::max(best, (du - loc) / cs.phi(dist));
                }
        }
        return best;
    };

    CertificateSpec hold;
    hold.mode = CertificateMode::Holder;
    hold.beta = 0.5;
    hold.L1 = 0.5;
    hold.x0 = {0.9, 0.0};
    hold.y0 = {-0.9, 0.0};
    hold.t0 = 0.0;
    double sharp_h = sharp_threshold(hold);
    hold.L2 = 0.7 * recipe; // pinned recipe constant
    CertificateReport h_pass = doubling_certificate(f, hold);
    CertificateSpec hold_half = hold;
    hold_half.L2 = hold.L2 / 2.0;
    CertificateReport h_fail = doubling_certificate(f, hold_half);

    CertificateSpec lip;
    lip.mode = CertificateMode::Lipschitz;
    lip.nu = 1.0 + hold.beta / 2.0; // nu = 1 + beta/2
    lip.kappa0 = 0.05;
    lip.L1 = 0.5;
    lip.x0 = {0.9, 0.0};
    lip.y0 = {-0.9, 0.0};
    lip.t0 = 0.0;
    double sharp_l = sharp_threshold(lip);
    lip.L2 = 0.55 * recipe;
    CertificateReport l_pass = doubling_certificate(f, lip);
    CertificateSpec lip_half = lip;
    lip_half.L2 = lip.L2 / 2.0;
    CertificateReport l_fail = doubling_certificate(f, lip_half);

    bool brackets = hold.L2 >= sharp_h && hold.L2 / 2.0 < sharp_h && lip.L2 >= sharp_l &&
                    lip.L2 / 2.0 < sharp_l;
    bool ok = h_pass.pass && !h_fail.pass && h_fail.max_phi > 0.0 && l_pass.pass &&
              !l_fail.pass && l_fail.max_phi > 0.0 && brackets;
    detail = fmt("holder max %.1e (pass), halved max %.2f (fail); lipschitz max %.1e (pass), "
                 "halved max %.2f (fail)",
                 h_pass.max_phi, h_fail.max_phi, l_pass.max_phi, l_fail.max_phi);
    return ok;
}

bool criterion10(std::string& detail) {
    detail.clear();
    bool all = true;
    for (double gamma : {0.0, 1.0}) {
        auto data = [](Vec2 x, double) { return 0.3 * std::cos(1.2 * x[0]) + 0.1 * x[0]; };
        auto src = [](Vec2 x, double) { return 0.05 * std::cos(3.0 * x[0]); };
        ProblemSpec spec = make_problem(gamma, 3.0, 1, 0.04, 0.2, data, src, 0.05);
        ScalarField u = solve(spec);

        double theta = normalize_theta(0.4, 0.05, 0.05, gamma);
        double tg = std::pow(theta, gamma);
        ProblemSpec tspec = spec;
        tspec.grid.t_depth = spec.grid.t_depth / tg;
        tspec.params.eps = theta * spec.params.eps; // regularization scales with u
        tspec.params.source = [src, theta, tg, gamma](Vec2 x, double t) {
            return std::pow(theta, gamma + 1.0) * src(x, tg * t);
        };
        tspec.params.source_bound = std::pow(theta, gamma + 1.0) * 0.05;
        double td = tspec.grid.t_depth;
        tspec.initial = [data, theta, td](Vec2 x) { return theta * data(x, -td); };
        tspec.boundary = [data, theta, tg](Vec2 x, double t) { return theta * data(x, tg * t); };
        ScalarField v = solve(tspec);

        ProblemSpec fine = spec;
        fine.grid = GridSpec::make(1, 0.02, 0.2);
        fine.params.eps = 0.02;
        ScalarField uf = solve(fine);
        double est = 0.0, dev = 0.0;
        for (int i = 0; i < u.spec.node_count(); ++i) {
            est = std::max(est, std::abs(u.slices.back()[i] - uf.slices.back()[2 * i]));
            dev = std::max(dev, std::abs(v.slices.back()[i] - theta * u.slices.back()[i]));
        }
        bool ok = dev <= 2.0 * est;
        all = all && ok;
        detail += fmt("g%.0f:dev=%.1e,est=%.1e%s ", gamma, dev, est, ok ? "" : "!");
    }
    detail += "(req dev <= 2 est)";
    return all;
}

} // namespace

int main() {
    struct Entry {
        int id;
        const char* name;
        bool (*fn)(std::string&);
    };
    const Entry entries[] = {
        {1, "plane exactness", criterion1},
        {2, "manufactured convergence", criterion2},
        {3, "heat oracle", criterion3},
        {4, "barrier certificate", criterion4},
        {5, "time-Holder exponent", criterion5},
        {6, "comparison principle", criterion6},
        {7, "flatness verdicts", criterion7},
        {8, "uniform-in-q Lipschitz", criterion8},
        {9, "doubling certificates", criterion9},
        {10, "scaling covariance", criterion10},
    };
    int failed = 0;
    for (const Entry& e : entries) {
        auto start = std::chrono::steady_clock::now();
        std::string detail;
        bool pass = false;
        try {
            pass = e.fn(detail);
        } catch (const std::exception& ex) {
            detail = std::string("exception: ") + ex.what();
        }
        double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("[%s] criterion %2d (%s): %s [%.1f s]\n", pass ? "PASS" : "FAIL", e.id,
                    e.name, detail.c_str(), secs);
        std::fflush(stdout);
        if (!pass) ++failed;
    }
    if (failed) std::printf("%d of 10 criteria failed\n", failed);
    return failed;
}
