#pragma once

#include <functional>

#include "parlab/grid.hpp"

namespace parlab {

// Coefficients of  du/dt - (|Du|^2+eps^2)^(gamma/2) [ Du + (p-2)<D^2u ghat,ghat> ] = f,
// ghat = Du / sqrt(|Du|^2 + eps^2).
struct EquationParams {
    double gamma = 0.0;
    double p = 2.0;
    int n = 1;
    double eps = 0.0;
    std::function<double(Vec2, double)> source; // f(x, t); null means 0
    double source_bound = 0.0;                  // sup |f|
    bool source_static = true;                  // f independent of t

    void validate() const; // gamma > -1, p > 1, eps >= 0, gamma < 0 => eps > 0
    double source_at(const Vec2& x, double t) const { return source ? source(x, t) : 0.0; }
};

// Same equation written for the deviation w = u - q.x: every gradient
// occurrence becomes Dw + q, the source is the rescaled fbar.
struct DeviationParams {
    EquationParams base;
    Vec2 q{0.0, 0.0};
};

// Centered first differences per axis; exact on quadratics. Interior only.
Vec2 gradient(const ScalarField& field, int node, int slice);

// (|grad + q|^2 + eps^2)^(gamma/2)
double degeneracy(const Vec2& grad, const EquationParams& params, const Vec2& q = {0.0, 0.0});

// Axis Laplacian plus (p-2) times the Hessian contracted twice with the
// regularized gradient direction. Interior only.
double normalized_p_laplacian(const ScalarField& field, int node, int slice,
                              const EquationParams& params);

// Backward-in-time difference minus the same spatial stencil the stepper
// applies (evaluated on slice-1, f at the slice-1 time), so stepped fields
// have residual 0 to roundoff. slice >= 1, node interior.
double residual(const ScalarField& field, const EquationParams& params, int node, int slice);
double deviation_residual(const ScalarField& field, const DeviationParams& params, int node,
                          int slice);

} // namespace parlab
