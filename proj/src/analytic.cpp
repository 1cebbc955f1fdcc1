#include "parlab/analytic.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace parlab {

void BarrierSpec::validate() const {
    if (!(eta > 0.0)) throw InvalidParams("barrier eta must be positive");
    if (!(clip >= 0.0)) throw InvalidParams("barrier Lipschitz constant must be nonnegative");
    if (!(gamma > -1.0)) throw InvalidParams("gamma must exceed -1");
}

double barrier_constant(double gamma, double p, int n) {
    double kappa = p >= 2.0 ? n + p - 2.0 : static_cast<double>(n);
    return std::pow(2.0, gamma + 1.0) * std::pow(11.0 / 16.0, gamma) * kappa;
}

double barrier_M2(const BarrierSpec& spec) {
    spec.validate();
    double c = 32.0 / 11.0;
    if (spec.gamma >= 0.0) return spec.clip * spec.clip + c * c * spec.unorm * spec.unorm;
    double e = (spec.gamma + 2.0) / (spec.gamma + 1.0);
    return std::pow(spec.clip + c * spec.unorm, e);
}

double barrier_M1(const BarrierSpec& spec) {
    double M2 = barrier_M2(spec);
    double C = barrier_constant(spec.gamma, spec.p, spec.n);
    double eta_exp = spec.gamma >= 0.0 ? spec.gamma + 1.0 : spec.gamma + 2.0;
    return std::pow(spec.eta, -eta_exp) * std::pow(M2, spec.gamma + 1.0) * C + spec.fnorm;
}

double barrier_upper(const Vec2& x, double t, const BarrierSpec& spec) {
    if (t < spec.t0 - 1e-12) throw InvalidParams("barrier evaluated before its anchor time");
    double M1 = barrier_M1(spec);
    double M2 = barrier_M2(spec);
    double xn = spec.n == 1 ? std::abs(x[0]) : norm(x);
    if (spec.gamma >= 0.0)
        return spec.u0 + M1 * (t - spec.t0) + (M2 / spec.eta) * xn * xn + spec.eta;
    double e = (spec.gamma + 2.0) / (spec.gamma + 1.0);
    return spec.u0 + M1 * (t - spec.t0) + M2 * std::pow(spec.eta, -e) * std::pow(xn, e) +
           std::pow(spec.eta, spec.gamma + 2.0);
}

void FlatnessConfig::validate(double gamma) const {
    if (!(rho > 0.0 && rho < 1.0)) throw InvalidParams("rho must lie in (0,1)");
    if (!(delta > 0.0 && delta < 1.0)) throw InvalidParams("delta must lie in (0,1)");
    if (!(rho < std::pow(1.0 - delta, gamma + 1.0)))
        throw InvalidParams("need rho < (1-delta)^(gamma+1)");
    if (!(c2 > 0.0 && c3 > 0.0 && eps0 > 0.0))
        throw InvalidParams("c2, c3, eps0 must be positive");
    if (kmax < 0) throw InvalidParams("kmax must be nonnegative");
}

ManufacturedPair manufactured(ManufacturedKind kind, const EquationParams& eq, Vec2 q,
                              double K) {
    eq.validate();
    ManufacturedPair out;
    switch (kind) {
        case ManufacturedKind::Plane:
            out.u = [q](Vec2 x, double) { return dot(q, x); };
            out.f = [](Vec2, double) { return 0.0; };
            out.f_bound = 0.0;
            return out;
        case ManufacturedKind::QuadraticStationary: {
            double eps2 = eq.eps * eq.eps;
            double coef = eq.n + eq.p - 2.0;
            double hg = 0.5 * eq.gamma;
            out.u = [](Vec2 x, double) { return 0.5 * (x[0] * x[0] + x[1] * x[1]); };
            out.f = [eps2, coef, hg](Vec2 x, double) {
                double s = x[0] * x[0] + x[1] * x[1] + eps2;
                return -std::pow(s, hg) * coef;
            };
            double smax = static_cast<double>(eq.n) + eps2; // |x|^2 <= n on the box
            out.f_bound = std::pow(smax, hg) * std::abs(coef);
            return out;
        }
        case ManufacturedKind::LinearInTime:
            out.u = [q, K](Vec2 x, double t) { return dot(q, x) + K * t; };
            out.f = [K](Vec2, double) { return K; };
            out.f_bound = std::abs(K);
            return out;
        case ManufacturedKind::HeatReference: {
            if (eq.gamma != 0.0 || eq.p != 2.0)
                throw UnsupportedKind("heat-reference needs gamma = 0, p = 2");
            double pi = std::numbers::pi;
            double mu = eq.n * pi * pi;
            int n = eq.n;
            out.u = [pi, mu, n](Vec2 x, double t) {
                double v = 0.1 * std::exp(-mu * t) * std::sin(pi * x[0]);
                if (n == 2) v *= std::sin(pi * x[1]);
                return v;
            };
            out.f = [](Vec2, double) { return 0.0; };
            out.f_bound = 0.0;
            out.f_static = true;
            return out;
        }
    }
    throw UnsupportedKind("unknown manufactured kind");
}

double normalize_theta(double unorm, double fnorm, double eps0, double gamma) {
    if (!(gamma >= 0.0)) throw InvalidParams("theta normalization needs gamma >= 0");
    if (!(eps0 > 0.0)) throw InvalidParams("eps0 must be positive");
    if (!(unorm >= 0.0 && fnorm >= 0.0)) throw InvalidParams("norms must be nonnegative");
    return 1.0 / (2.0 * unorm + std::pow(fnorm / eps0, 1.0 / (gamma + 1.0)) + 1.0);
}

ScalarField theta_transform(const ScalarField& u, double theta, double gamma) {
    if (!(theta > 0.0)) throw InvalidParams("theta must be positive");
    ScalarField out = u;
    double tscale = std::pow(theta, -gamma);
    for (auto& t : out.times) t *= tscale;
    for (auto& slice : out.slices)
        for (auto& v : slice) v *= theta;
    out.spec.t_depth = u.spec.t_depth * tscale;
    out.spec.dt = u.spec.dt * tscale;
    return out;
}

double blowup_source_factor(const FlatnessConfig& cfg, double gamma, int k) {
    cfg.validate(gamma);
    return std::pow(cfg.rho, k) * std::pow(1.0 - cfg.delta, -k * (gamma + 1.0));
}

ScalarField blowup_field(const ScalarField& u, int k, const Vec2& l, const FlatnessConfig& cfg,
                         double gamma) {
    cfg.validate(gamma);
    double rk = std::pow(cfg.rho, k);
    double lk = std::pow(1.0 - cfg.delta, k);
    IntrinsicCylinder cyl{{0.0, 0.0}, u.t_final(), rk, lk, gamma};
    CylinderNodes cn = nodes_in_cylinder(u, cyl); // resolution check, throws EmptyCylinder
    double depth = cyl.depth();

    // target lattice: roughly the source cylinder's resolution, unit extent
    int m = std::max(2, static_cast<int>(std::floor(rk / u.spec.h)));
    GridSpec tgt = GridSpec::make(u.spec.n, 1.0 / m, 1.0, 1.0 / cn.slice_ids.size());

    double scale = 1.0 / (rk * lk);
    ScalarField out;
    out.spec = tgt;
    out.times.reserve(cn.slice_ids.size());
    out.slices.reserve(cn.slice_ids.size());
    for (int s : cn.slice_ids) {
        double tsrc = u.times[s];
        double ttgt = (tsrc - u.t_final()) / depth; // in (-1, 0]
        std::vector<double> slice(tgt.node_count());
        for (int i = 0; i < tgt.node_count(); ++i) {
            Vec2 xt = tgt.coords(i);
            Vec2 xs{rk * xt[0], rk * xt[1]};
            double v = sample(u, xs, tsrc) - dot(l, xs);
            slice[i] = v * scale;
        }
        out.times.push_back(ttgt);
        out.slices.push_back(std::move(slice));
    }
    out.spec.t_depth = -out.times.front();
    return out;
}

} // namespace parlab
