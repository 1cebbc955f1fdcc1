#include "parlab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "parlab/kernels.hpp"
#include "parlab/parallel.hpp"

namespace parlab {

void ProblemSpec::validate() const {
    params.validate();
    grid.validate();
    if (params.n != grid.n) throw InvalidProblem("params.n and grid.n disagree");
    if (!(cfl_safety > 0.0 && cfl_safety <= 1.0))
        throw InvalidProblem("cfl_safety must lie in (0, 1]");
    if (store_every < 1) throw InvalidProblem("store_every must be >= 1");
    if (!initial || !boundary) throw InvalidProblem("initial and boundary data required");
    double t0 = -grid.t_depth;
    for (int i = 0; i < grid.node_count(); ++i) {
        if (!grid.is_boundary(i)) continue;
        Vec2 x = grid.coords(i);
        if (std::abs(initial(x) - boundary(x, t0)) > 1e-10)
            throw InvalidProblem("initial and boundary data disagree on the frame at t = " +
                                 std::to_string(t0));
    }
}

Stepper::Stepper(const EquationParams& eq, Vec2 q, const GridSpec& grid,
                 std::function<double(Vec2, double)> boundary, double cfl_safety)
    : eq_(eq), q_(q), grid_(grid), boundary_(std::move(boundary)), cfl_safety_(cfl_safety) {
    eq_.validate();
    grid_.validate();
    for (int i = 0; i < grid_.node_count(); ++i)
        if (grid_.is_boundary(i)) boundary_nodes_.push_back(i);
}

double Stepper::stable_dt(const std::vector<double>& slice) const {
    const auto& K = kernels::active();
    int N = grid_.nodes_per_axis();
    double smin = 0.0, smax = 0.0;
    if (grid_.n == 1)
        K.grad_sq_range_1d(slice.data(), N, grid_.h, q_[0], smin, smax);
    else
        K.grad_sq_range_2d(slice.data(), N, N, grid_.h, q_[0], q_[1], smin, smax);
    double eps2 = eq_.eps * eq_.eps;
    // deg is monotone in |Du+q|^2, so the slice max sits at an endpoint
    double s_worst = eq_.gamma >= 0.0 ? smax : smin;
    double max_deg = kernels::pow_half_gamma(s_worst + eps2, kernels::pow_kind(eq_.gamma),
                                             0.5 * eq_.gamma);
    double h2 = grid_.h * grid_.h;
    double dt = h2; // flat-slice clamp
    double denom = 2.0 * (grid_.n + std::abs(eq_.p - 2.0)) * max_deg;
    if (denom > 0.0) dt = std::min(dt, cfl_safety_ * h2 / denom);
    if (!(dt >= 1e-12))
        throw DegenerateTimeStep("dt = " + std::to_string(dt) + " below 1e-12");
    return dt;
}

void Stepper::fill_source(double t, std::vector<double>& f) const {
    f.assign(grid_.node_count(), 0.0);
    if (!eq_.source) return;
    for (int i = 0; i < grid_.node_count(); ++i)
        if (!grid_.is_boundary(i)) f[i] = eq_.source(grid_.coords(i), t);
}

std::vector<double> Stepper::step(const std::vector<double>& slice, double t, double dt,
                                  double* margin_out) const {
    const auto& K = kernels::active();
    int N = grid_.nodes_per_axis();

    const std::vector<double>* f = nullptr;
    if (eq_.source_static) {
        if (!f_cached_) {
            fill_source(t, f_cache_);
            f_cached_ = true;
        }
        f = &f_cache_;
    } else {
        fill_source(t, f_cache_);
        f = &f_cache_;
    }

    kernels::StepParams sp;
    sp.h = grid_.h;
    sp.dt = dt;
    sp.pm2 = eq_.p - 2.0;
    sp.eps2 = eq_.eps * eq_.eps;
    sp.qx = q_[0];
    sp.qy = q_[1];
    sp.pk = kernels::pow_kind(eq_.gamma);
    sp.half_gamma = 0.5 * eq_.gamma;

    std::vector<double> out(slice.size());
    if (grid_.n == 1) {
        K.step_interior_1d(slice.data(), f->data(), out.data(), N, sp);
    } else {
        const double* fp = f->data();
        const double* up = slice.data();
        double* op = out.data();
        parallel_for(static_cast<std::size_t>(N - 2), [&](std::size_t b, std::size_t e) {
            K.step_interior_2d(up, fp, op, N, N, static_cast<int>(b) + 1,
                               static_cast<int>(e) + 1, sp);
        });
    }

    double t_new = t + dt;
    double bmax = 0.0;
    for (int i : boundary_nodes_) {
        double v = boundary_(grid_.coords(i), t_new);
        out[i] = v;
        bmax = std::max(bmax, std::abs(v));
    }

    double mn = 0.0, mx = 0.0;
    K.minmax(slice.data(), slice.size(), mn, mx);
    double unorm = std::max(std::abs(mn), std::abs(mx));
    double bound = std::max(unorm, bmax) + dt * eq_.source_bound + 1e-6;
    K.minmax(out.data(), out.size(), mn, mx);
    double onorm = std::max(std::abs(mn), std::abs(mx));
    if (onorm > bound)
        throw UnstableStep("maximum principle bound exceeded at t = " + std::to_string(t_new) +
                           " (|u| = " + std::to_string(onorm) + ", bound = " +
                           std::to_string(bound) + ")");
    if (margin_out) *margin_out = bound - onorm;
    return out;
}

namespace {

ScalarField run_solver(const ProblemSpec& spec, SolveStats* stats) {
    spec.validate();
    Stepper stepper(spec.params, spec.q, spec.grid, spec.boundary, spec.cfl_safety);

    ScalarField field;
    field.spec = spec.grid;
    double t = -spec.grid.t_depth;
    std::vector<double> cur(spec.grid.node_count());
    for (int i = 0; i < spec.grid.node_count(); ++i) cur[i] = spec.initial(spec.grid.coords(i));
    field.times.push_back(t);
    field.slices.push_back(cur);

    SolveStats local;
    SolveStats& st = stats ? *stats : local;
    st.min_margin = std::numeric_limits<double>::infinity();

    const long long max_steps = 50'000'000;
    long long k = 0;
    while (t < -1e-14) {
        double dt = stepper.stable_dt(cur);
        bool last = t + dt >= -1e-14;
        if (last) dt = -t;
        double margin = 0.0;
        std::vector<double> next = stepper.step(cur, t, dt, &margin);
        t = last ? 0.0 : t + dt;
        cur = std::move(next);
        ++k;
        st.dt_history.push_back(dt);
        st.margin_history.push_back(margin);
        st.min_margin = std::min(st.min_margin, margin);
        if (last || k % spec.store_every == 0) {
            field.times.push_back(t);
            field.slices.push_back(cur);
        }
        if (k > max_steps) throw ComputeError("step budget exhausted before reaching t = 0");
    }
    st.steps = k;
    if (field.times.back() != 0.0) {
        field.times.push_back(0.0);
        field.slices.push_back(cur);
    }
    return field;
}

} // namespace

ScalarField solve(const ProblemSpec& spec, SolveStats* stats) {
    if (spec.q[0] != 0.0 || spec.q[1] != 0.0)
        throw InvalidProblem("solve() is for q = 0; use solve_deviation");
    return run_solver(spec, stats);
}

ScalarField solve_deviation(const ProblemSpec& spec, SolveStats* stats) {
    return run_solver(spec, stats);
}

} // namespace parlab
