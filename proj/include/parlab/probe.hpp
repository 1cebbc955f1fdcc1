#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "parlab/analytic.hpp"
#include "parlab/grid.hpp"
#include "parlab/solver.hpp"

namespace parlab {

struct FitResult {
    double slope = 0.0;
    double r2 = 0.0;
    int samples = 0;
    bool valid = false;
};

// Least-squares slope of log y against log x; nonpositive points are dropped.
FitResult loglog_fit(std::span<const std::pair<double, double>> pts);

struct RegularityReport {
    double space_lip = 0.0;                       // sup |u(x,t)-u(y,t)| / |x-y|
    std::map<double, double> holder;              // alpha -> [u]_{C^{alpha,alpha/2}}
    std::vector<std::pair<double, double>> time_osc; // (dt_window, osc of center trace)
    FitResult time_exponent;                      // nu-hat from log-log fit of time_osc
    FitResult alpha_est;                          // gradient increment exponent at t_final
    bool subsampled = false;
    std::uint64_t pairs_evaluated = 0;
};

struct FlatnessLevel {
    int k = 0;
    double r = 1.0;
    double lambda = 1.0;
    Vec2 l{0.0, 0.0};
    double osc = 0.0;
    bool slope_ok = true;
    bool osc_ok = true;
    double increment = 0.0; // |l_k - l_{k-1}|, 0 at k=0
    bool increment_ok = true;
};

enum class FlatnessVerdict { Degenerate, Smooth, Unresolved };

struct FlatnessReport {
    std::vector<FlatnessLevel> levels;
    FlatnessVerdict verdict = FlatnessVerdict::Degenerate;
    int verdict_k = -1;  // Smooth(k0) or Unresolved(k); -1 for Degenerate
    double tau = 0.0;    // log(1-delta)/log(rho)
    bool pass = true;    // resolved (not Unresolved)
};

enum class CertificateMode { Holder, Lipschitz };

struct CertificateSpec {
    CertificateMode mode = CertificateMode::Holder;
    double beta = 0.5;    // Holder: phi(s) = s^beta
    double nu = 1.5;      // Lipschitz: phi(s) = s - kappa0 s^nu, clipped at s1
    double kappa0 = 0.05;
    double s1 = 0.0;      // 0 = (1/(4 nu kappa0))^(1/(nu-1))
    double L1 = 1.0;
    double L2 = 1.0;
    Vec2 x0{0.0, 0.0};
    Vec2 y0{0.0, 0.0};
    double t0 = 0.0;
    double slack = 0.0;   // extra tolerance on top of 1e-8

    double phi(double s) const;
    double domain_radius() const { return mode == CertificateMode::Holder ? 15.0 / 16.0 : 7.0 / 8.0; }
    void validate() const; // Lipschitz: 1 < nu < 2, s1 > 2, nu kappa0 s1^(nu-1) <= 1/4
};

struct CertificateReport {
    CertificateSpec spec;
    double max_phi = 0.0;
    Vec2 argmax_x{0.0, 0.0};
    Vec2 argmax_y{0.0, 0.0};
    double argmax_t = 0.0;
    double tolerance = 1e-8;
    bool pass = false;
};

struct QSweepRow {
    double qnorm = 0.0;
    Vec2 q{0.0, 0.0};
    double lip_w = 0.0;  // space Lipschitz of w on Q_{1/2}
    double lip_u = 0.0;  // same for u = w + q.x (control)
    double wnorm = 0.0;  // sup |w| over the trajectory
    double gamma0 = 0.0; // slope threshold 2 + |w| + |fbar| for the uniform regime
    bool above_gamma0 = false;
    bool ok = false;
    std::string error;
};

struct QSweepReport {
    std::vector<QSweepRow> rows;
    double ratio = 0.0; // max/min of lip_w over successful rows
    bool pass = false;  // every row solved and ratio below the configured cap
};

// max - min over the cylinder's lattice points.
double oscillation(const ScalarField& field, const IntrinsicCylinder& cyl);

// argmin over slopes l of osc(u - l.x) on the cylinder: least-squares seed,
// then per-coordinate golden-section on the exact osc objective.
struct BestPlane {
    Vec2 l{0.0, 0.0};
    double osc = 0.0;
};
BestPlane best_plane(const ScalarField& field, const IntrinsicCylinder& cyl);

// Levels k = 0,1,... on Q_{rho^k}^{(1-delta)^k} centered at (0, t_final):
// records osc <= rho^k(1-delta)^k and |l_k| <= c2 (1-delta)^k per level,
// verdict Smooth(k0) at the first slope-cap failure, Degenerate when kmax
// levels all pass, Unresolved(k) when a cylinder is under-resolved.
FlatnessReport flatness_iteration(const ScalarField& field, const FlatnessConfig& cfg,
                                  double gamma);

// Seminorms over the cylinder region. Exact pair sup when the pair count is
// below pair_cap, else a seeded deterministic subsample.
RegularityReport seminorms(const ScalarField& field, const IntrinsicCylinder& region,
                           std::span<const double> alphas, std::uint64_t seed = 1,
                           std::uint64_t pair_cap = 10'000'000);

// Exhaustive max over grid triples (x, y, t) of
//   Phi = u(x,t) - u(y,t) - L2 phi(|x-y|) - L1/2 (|x-x0|^2 + |y-y0|^2 + (t-t0)^2)
// on B_r x [t_final - r^2, t_final], r from the mode. Throws DomainTooSmall.
CertificateReport doubling_certificate(const ScalarField& field, const CertificateSpec& spec);

// Per q: solve the deviation problem with the base data and measure the space
// Lipschitz constant of w (and of w + q.x) on Q_{1/2}. Solver failures are
// recorded per row and the sweep continues. Requires gamma >= 0.
QSweepReport q_sweep(const ProblemSpec& base, std::span<const Vec2> qs, double ratio_cap = 2.0);

} // namespace parlab
