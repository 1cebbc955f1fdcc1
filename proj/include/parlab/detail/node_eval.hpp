#pragma once

#include "parlab/kernels.hpp"

// Single source of truth for the per-node stencil arithmetic. The scalar step
// kernel, the residual operators and the stability bound all go through these
// helpers; the AVX2 kernel mirrors the operation order exactly.

namespace parlab::detail {

struct EvalConsts {
    double inv2h, invh2, inv4h2;
    double qx, qy;
    double pm2;
    double eps2;
    kernels::PowKind pk;
    double half_gamma;
};

struct NodeTerms {
    double grad_sq;  // |D_h u + q|^2
    double deg;      // (grad_sq + eps^2)^(gamma/2)
    double dpn;      // Delta_h u + (p-2) <D^2_h u ghat, ghat>
};

// 1D: u at i-1, i, i+1
inline NodeTerms eval_1d(double w, double c, double e, const EvalConsts& k) {
    double gx = (e - w) * k.inv2h;
    double ax = gx + k.qx;
    double s2 = ax * ax;
    double sr = s2 + k.eps2;
    double dxx = ((e - c) - (c - w)) * k.invh2;
    double dir = sr > 0.0 ? (ax * ax) * dxx / sr : 0.0;
    NodeTerms t;
    t.grad_sq = s2;
    t.deg = kernels::pow_half_gamma(sr, k.pk, k.half_gamma);
    t.dpn = dxx + k.pm2 * dir;
    return t;
}

// 2D: 9-point stencil, compass naming (N = +y row)
inline NodeTerms eval_2d(double sw, double s, double se, double w, double c, double e,
                         double nw, double n, double ne, const EvalConsts& k) {
    double gx = (e - w) * k.inv2h;
    double gy = (n - s) * k.inv2h;
    double ax = gx + k.qx;
    double ay = gy + k.qy;
    double s2 = ax * ax + ay * ay;
    double sr = s2 + k.eps2;
    double dxx = ((e - c) - (c - w)) * k.invh2;
    double dyy = ((n - c) - (c - s)) * k.invh2;
    double dxy = ((ne - nw) - (se - sw)) * k.inv4h2;
    double lap = dxx + dyy;
    double num = (ax * ax) * dxx + (2.0 * (ax * ay)) * dxy + (ay * ay) * dyy;
    double dir = sr > 0.0 ? num / sr : 0.0;
    NodeTerms t;
    t.grad_sq = s2;
    t.deg = kernels::pow_half_gamma(sr, k.pk, k.half_gamma);
    t.dpn = lap + k.pm2 * dir;
    return t;
}

inline EvalConsts make_consts(double h, double pm2, double eps, double qx, double qy,
                              double gamma) {
    EvalConsts k;
    k.inv2h = 1.0 / (2.0 * h);
    k.invh2 = 1.0 / (h * h);
    k.inv4h2 = 1.0 / (4.0 * h * h);
    k.qx = qx;
    k.qy = qy;
    k.pm2 = pm2;
    k.eps2 = eps * eps;
    k.pk = kernels::pow_kind(gamma);
    k.half_gamma = 0.5 * gamma;
    return k;
}

} // namespace parlab::detail
