#include <cmath>
#include <limits>

#include "parlab/detail/node_eval.hpp"
#include "parlab/kernels.hpp"

namespace parlab::kernels {

PowKind pow_kind(double gamma) {
    if (gamma == 0.0) return PowKind::One;
    if (gamma == 1.0) return PowKind::Sqrt;
    if (gamma == 2.0) return PowKind::Linear;
    if (gamma == 0.5) return PowKind::SqrtSqrt;
    if (gamma == 3.0) return PowKind::SqrtCube;
    if (gamma == 4.0) return PowKind::Square;
    return PowKind::Generic;
}

namespace {

detail::EvalConsts consts_from(const StepParams& sp) {
    detail::EvalConsts k;
    k.inv2h = 1.0 / (2.0 * sp.h);
    k.invh2 = 1.0 / (sp.h * sp.h);
    k.inv4h2 = 1.0 / (4.0 * sp.h * sp.h);
    k.qx = sp.qx;
    k.qy = sp.qy;
    k.pm2 = sp.pm2;
    k.eps2 = sp.eps2;
    k.pk = sp.pk;
    k.half_gamma = sp.half_gamma;
    return k;
}

void step_1d(const double* u, const double* f, double* out, int n, const StepParams& sp) {
    detail::EvalConsts k = consts_from(sp);
    for (int i = 1; i < n - 1; ++i) {
        detail::NodeTerms t = detail::eval_1d(u[i - 1], u[i], u[i + 1], k);
        out[i] = u[i] + sp.dt * (t.deg * t.dpn + f[i]);
    }
}

void step_2d(const double* u, const double* f, double* out, int nx, int /*ny*/, int y0, int y1,
             const StepParams& sp) {
    detail::EvalConsts k = consts_from(sp);
    for (int iy = y0; iy < y1; ++iy) {
        const double* rs = u + (iy - 1) * nx;
        const double* rc = u + iy * nx;
        const double* rn = u + (iy + 1) * nx;
        double* ro = out + iy * nx;
        const double* rf = f + iy * nx;
        for (int ix = 1; ix < nx - 1; ++ix) {
            detail::NodeTerms t =
                detail::eval_2d(rs[ix - 1], rs[ix], rs[ix + 1], rc[ix - 1], rc[ix], rc[ix + 1],
                                rn[ix - 1], rn[ix], rn[ix + 1], k);
            ro[ix] = rc[ix] + sp.dt * (t.deg * t.dpn + rf[ix]);
        }
    }
}

void minmax_impl(const double* v, std::size_t n, double& mn, double& mx) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        lo = v[i] < lo ? v[i] : lo;
        hi = v[i] > hi ? v[i] : hi;
    }
    mn = lo;
    mx = hi;
}

void grad_sq_1d(const double* u, int n, double h, double qx, double& mn, double& mx) {
    double inv2h = 1.0 / (2.0 * h);
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (int i = 1; i < n - 1; ++i) {
        double ax = (u[i + 1] - u[i - 1]) * inv2h + qx;
        double s2 = ax * ax;
        lo = s2 < lo ? s2 : lo;
        hi = s2 > hi ? s2 : hi;
    }
    mn = lo;
    mx = hi;
}

void grad_sq_2d(const double* u, int nx, int ny, double h, double qx, double qy, double& mn,
                double& mx) {
    double inv2h = 1.0 / (2.0 * h);
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (int iy = 1; iy < ny - 1; ++iy) {
        const double* rs = u + (iy - 1) * nx;
        const double* rc = u + iy * nx;
        const double* rn = u + (iy + 1) * nx;
        for (int ix = 1; ix < nx - 1; ++ix) {
            double ax = (rc[ix + 1] - rc[ix - 1]) * inv2h + qx;
            double ay = (rn[ix] - rs[ix]) * inv2h + qy;
            double s2 = ax * ax + ay * ay;
            lo = s2 < lo ? s2 : lo;
            hi = s2 > hi ? s2 : hi;
        }
    }
    mn = lo;
    mx = hi;
}

double lip_pairs_impl(const double* u, const double* x, const double* y, std::size_t i0,
                      std::size_t i1) {
    double best = 0.0;
    for (std::size_t i = i0; i < i1; ++i) {
        double ui = u[i], xi = x[i];
        double yi = y ? y[i] : 0.0;
        for (std::size_t j = 0; j < i; ++j) {
            double du = std::fabs(ui - u[j]);
            double dx = xi - x[j];
            double d2 = dx * dx;
            if (y) {
                double dy = yi - y[j];
                d2 = d2 + dy * dy;
            }
            double v = du / std::sqrt(d2);
            best = v > best ? v : best;
        }
    }
    return best;
}

} // namespace

const Kernels& scalar_kernels() {
    static const Kernels k = {
        "scalar", step_1d, step_2d, minmax_impl, grad_sq_1d, grad_sq_2d, lip_pairs_impl,
    };
    return k;
}

} // namespace parlab::kernels
