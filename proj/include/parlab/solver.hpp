#pragma once

#include <functional>
#include <vector>

#include "parlab/grid.hpp"
#include "parlab/operators.hpp"

namespace parlab {

struct ProblemSpec {
    EquationParams params;
    Vec2 q{0.0, 0.0}; // deviation slope; {0,0} is the plain equation
    std::function<double(Vec2)> initial;
    std::function<double(Vec2, double)> boundary;
    GridSpec grid;
    double cfl_safety = 0.5;
    int store_every = 1; // keep every k-th accepted slice (first and last always)

    // initial/boundary agree on the frame at t = -t_depth within 1e-10,
    // cfl_safety in (0,1]
    void validate() const;
};

struct SolveStats {
    std::vector<double> dt_history;
    std::vector<double> margin_history; // per-step max-principle margin (bound - max|u|)
    double min_margin = 0.0;
    long long steps = 0;
};

// One explicit step of the (deviation) equation on a fixed grid. Exposes the
// per-step pieces so tests can advance two problems in lockstep.
class Stepper {
public:
    Stepper(const EquationParams& eq, Vec2 q, const GridSpec& grid,
            std::function<double(Vec2, double)> boundary, double cfl_safety);

    // cfl_safety * h^2 / (2 (n + |p-2|) max_deg), recomputed per slice and
    // capped at h^2 (flat-slice clamp). Throws DegenerateTimeStep below 1e-12.
    double stable_dt(const std::vector<double>& slice) const;

    // Forward-Euler update at interior nodes, boundary from data at t+dt.
    // Throws UnstableStep when the discrete maximum-principle bound
    // max(|slice|, |boundary|) + dt*|f| is exceeded by more than 1e-6.
    std::vector<double> step(const std::vector<double>& slice, double t, double dt,
                             double* margin_out = nullptr) const;

    const GridSpec& grid() const { return grid_; }

private:
    EquationParams eq_;
    Vec2 q_;
    GridSpec grid_;
    std::function<double(Vec2, double)> boundary_;
    double cfl_safety_;
    std::vector<int> boundary_nodes_;
    mutable std::vector<double> f_cache_;
    mutable bool f_cached_ = false;
    void fill_source(double t, std::vector<double>& f) const;
};

// Full trajectory from t = -t_depth to 0. Propagates step errors with the
// failing time in the message.
ScalarField solve(const ProblemSpec& spec, SolveStats* stats = nullptr);

// Same with the Dw + q stencil; spec.q is the plane slope, spec.params.source
// is the rescaled fbar.
ScalarField solve_deviation(const ProblemSpec& spec, SolveStats* stats = nullptr);

} // namespace parlab
