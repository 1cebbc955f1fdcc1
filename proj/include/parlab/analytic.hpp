#pragma once

#include <functional>

#include "parlab/grid.hpp"
#include "parlab/operators.hpp"

namespace parlab {

// Explicit supersolution anchored at (0, t0):
//   gamma >= 0:  v(x,t) = u0 + M1 (t-t0) + (M2/eta)|x|^2 + eta
//   gamma <  0:  v(x,t) = u0 + M1 (t-t0) + M2 eta^-((g+2)/(g+1)) |x|^((g+2)/(g+1)) + eta^(g+2)
// with M2 built from the target's Lipschitz constant and sup norm and M1 from
// barrier_constant so the supersolution inequality holds on B_{11/16}.
struct BarrierSpec {
    double t0 = -0.25;
    double eta = 0.5;
    double u0 = 0.0;   // u(0, t0)
    double clip = 1.0; // spatial Lipschitz constant of the target
    double unorm = 0.5;
    double fnorm = 0.0;
    double gamma = 0.0;
    double p = 2.0;
    int n = 1;

    void validate() const; // eta > 0, clip >= 0
};

double barrier_M2(const BarrierSpec& spec);
double barrier_M1(const BarrierSpec& spec);
double barrier_upper(const Vec2& x, double t, const BarrierSpec& spec);

// Smallest constant C(n,p) with
//   eta^-(g+1) M2^(g+1) C >= |Dv|^g Delta_p^N v on B_{11/16}
// for the quadratic barrier: 2^(g+1) (11/16)^g (n+p-2 for p>=2, else n).
double barrier_constant(double gamma, double p, int n);

// Flatness iteration knobs. rho < (1-delta)^(gamma+1) is required so the
// rescaled source bound is non-increasing in the level.
struct FlatnessConfig {
    double rho = 0.1;
    double delta = 0.1;
    double c2 = 1.0;   // slope cap constant
    double c3 = 2.0;   // slope increment constant
    double eps0 = 0.05;
    int kmax = 4;

    void validate(double gamma) const;
};

enum class ManufacturedKind { Plane, QuadraticStationary, LinearInTime, HeatReference };

struct ManufacturedPair {
    std::function<double(Vec2, double)> u; // exact solution
    std::function<double(Vec2, double)> f;
    double f_bound = 0.0;
    bool f_static = true;
};

// Exact (u, f) pairs for solver oracles:
//   plane:                u = q.x,          f = 0
//   quadratic-stationary: u = |x|^2/2,      f = -(|x|^2+eps^2)^(g/2)(n+p-2)
//   linear-in-time:       u = q.x + K t,    f = K
//   heat-reference:       gamma = 0, p = 2 only; separable sine solution
// Throws UnsupportedKind otherwise.
ManufacturedPair manufactured(ManufacturedKind kind, const EquationParams& eq,
                              Vec2 q = {0.0, 0.0}, double K = 0.0);

// theta = (2|u| + (|f|/eps0)^(1/(gamma+1)) + 1)^-1; the transformed problem
// u_theta(x,t) = theta u(x, theta^gamma t) has |u_theta| <= 1/2 and
// |f_theta| <= eps0 with f_theta = theta^(gamma+1) f(x, theta^gamma t).
double normalize_theta(double unorm, double fnorm, double eps0, double gamma);

// Exact (no resampling) theta transform: values scale by theta, slice times
// by theta^-gamma.
ScalarField theta_transform(const ScalarField& u, double theta, double gamma);

// Bound multiplier of the rescaled source at level k: rho^k (1-delta)^-k(gamma+1).
// Strictly below 1 per level whenever rho < (1-delta)^(gamma+1).
double blowup_source_factor(const FlatnessConfig& cfg, double gamma, int k);

// w_k(x,t) = (u(r_k x, r_k^2 l_k^-gamma t) - l . r_k x) / (r_k l_k) with
// r_k = rho^k, l_k = (1-delta)^k, resampled onto a unit-cylinder grid whose
// resolution matches the source cylinder. Propagates EmptyCylinder.
ScalarField blowup_field(const ScalarField& u, int k, const Vec2& l, const FlatnessConfig& cfg,
                         double gamma);

} // namespace parlab
