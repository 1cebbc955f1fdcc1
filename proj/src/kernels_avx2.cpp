// AVX2 variants of the scalar kernels. Operation order matches
// kernels_scalar.cpp expression by expression; the equivalence tests assert
// bit-identical results, so any change here must be mirrored there.

#include "parlab/kernels.hpp"

#if defined(__AVX2__)

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace parlab::kernels {
namespace {

struct Consts {
    __m256d inv2h, invh2, inv4h2, qx, qy, pm2, eps2, dt, zero, two;
    PowKind pk;
    double half_gamma;
};

Consts make_consts(const StepParams& sp) {
    Consts c;
    c.inv2h = _mm256_set1_pd(1.0 / (2.0 * sp.h));
    c.invh2 = _mm256_set1_pd(1.0 / (sp.h * sp.h));
    c.inv4h2 = _mm256_set1_pd(1.0 / (4.0 * sp.h * sp.h));
    c.qx = _mm256_set1_pd(sp.qx);
    c.qy = _mm256_set1_pd(sp.qy);
    c.pm2 = _mm256_set1_pd(sp.pm2);
    c.eps2 = _mm256_set1_pd(sp.eps2);
    c.dt = _mm256_set1_pd(sp.dt);
    c.zero = _mm256_setzero_pd();
    c.two = _mm256_set1_pd(2.0);
    c.pk = sp.pk;
    c.half_gamma = sp.half_gamma;
    return c;
}

inline __m256d pow_half_vec(__m256d s, PowKind pk, double hg) {
    switch (pk) {
        case PowKind::One: return _mm256_set1_pd(1.0);
        case PowKind::Sqrt: return _mm256_sqrt_pd(s);
        case PowKind::Linear: return s;
        case PowKind::SqrtSqrt: return _mm256_sqrt_pd(_mm256_sqrt_pd(s));
        case PowKind::SqrtCube: return _mm256_mul_pd(s, _mm256_sqrt_pd(s));
        case PowKind::Square: return _mm256_mul_pd(s, s);
        default: {
            alignas(32) double v[4];
            _mm256_store_pd(v, s);
            for (int l = 0; l < 4; ++l) v[l] = std::pow(v[l], hg);
            return _mm256_load_pd(v);
        }
    }
}

// dir = sr > 0 ? num / sr : 0
inline __m256d safe_div(__m256d num, __m256d sr, __m256d zero) {
    __m256d mask = _mm256_cmp_pd(sr, zero, _CMP_GT_OQ);
    return _mm256_and_pd(_mm256_div_pd(num, sr), mask);
}

void step_1d(const double* u, const double* f, double* out, int n, const StepParams& sp) {
    Consts c = make_consts(sp);
    int i = 1;
    for (; i + 4 <= n - 1; i += 4) {
        __m256d w = _mm256_loadu_pd(u + i - 1);
        __m256d cc = _mm256_loadu_pd(u + i);
        __m256d e = _mm256_loadu_pd(u + i + 1);
        __m256d gx = _mm256_mul_pd(_mm256_sub_pd(e, w), c.inv2h);
        __m256d ax = _mm256_add_pd(gx, c.qx);
        __m256d s2 = _mm256_mul_pd(ax, ax);
        __m256d sr = _mm256_add_pd(s2, c.eps2);
        __m256d dxx = _mm256_mul_pd(
            _mm256_sub_pd(_mm256_sub_pd(e, cc), _mm256_sub_pd(cc, w)), c.invh2);
        __m256d num = _mm256_mul_pd(_mm256_mul_pd(ax, ax), dxx);
        __m256d dir = safe_div(num, sr, c.zero);
        __m256d deg = pow_half_vec(sr, c.pk, c.half_gamma);
        __m256d dpn = _mm256_add_pd(dxx, _mm256_mul_pd(c.pm2, dir));
        __m256d fv = _mm256_loadu_pd(f + i);
        __m256d rhs = _mm256_add_pd(_mm256_mul_pd(deg, dpn), fv);
        _mm256_storeu_pd(out + i, _mm256_add_pd(cc, _mm256_mul_pd(c.dt, rhs)));
    }
    // remainder via the scalar reference (identical arithmetic)
    for (; i < n - 1; ++i) {
        double sub[8];
        scalar_kernels().step_interior_1d(u + i - 1, f + i - 1, sub, 3, sp);
        out[i] = sub[1];
    }
}

void step_2d(const double* u, const double* f, double* out, int nx, int /*ny*/, int y0, int y1,
             const StepParams& sp) {
    Consts c = make_consts(sp);
    for (int iy = y0; iy < y1; ++iy) {
        const double* rs = u + (iy - 1) * nx;
        const double* rc = u + iy * nx;
        const double* rn = u + (iy + 1) * nx;
        const double* rf = f + iy * nx;
        double* ro = out + iy * nx;
        int ix = 1;
        for (; ix + 4 <= nx - 1; ix += 4) {
            __m256d sw = _mm256_loadu_pd(rs + ix - 1);
            __m256d ss = _mm256_loadu_pd(rs + ix);
            __m256d se = _mm256_loadu_pd(rs + ix + 1);
            __m256d w = _mm256_loadu_pd(rc + ix - 1);
            __m256d cc = _mm256_loadu_pd(rc + ix);
            __m256d e = _mm256_loadu_pd(rc + ix + 1);
            __m256d nw = _mm256_loadu_pd(rn + ix - 1);
            __m256d nn = _mm256_loadu_pd(rn + ix);
            __m256d ne = _mm256_loadu_pd(rn + ix + 1);

            __m256d gx = _mm256_mul_pd(_mm256_sub_pd(e, w), c.inv2h);
            __m256d gy = _mm256_mul_pd(_mm256_sub_pd(nn, ss), c.inv2h);
            __m256d ax = _mm256_add_pd(gx, c.qx);
            __m256d ay = _mm256_add_pd(gy, c.qy);
            __m256d s2 = _mm256_add_pd(_mm256_mul_pd(ax, ax), _mm256_mul_pd(ay, ay));
            __m256d sr = _mm256_add_pd(s2, c.eps2);
            __m256d dxx = _mm256_mul_pd(
                _mm256_sub_pd(_mm256_sub_pd(e, cc), _mm256_sub_pd(cc, w)), c.invh2);
            __m256d dyy = _mm256_mul_pd(
                _mm256_sub_pd(_mm256_sub_pd(nn, cc), _mm256_sub_pd(cc, ss)), c.invh2);
            __m256d dxy = _mm256_mul_pd(
                _mm256_sub_pd(_mm256_sub_pd(ne, nw), _mm256_sub_pd(se, sw)), c.inv4h2);
            __m256d lap = _mm256_add_pd(dxx, dyy);
            __m256d num = _mm256_add_pd(
                _mm256_add_pd(_mm256_mul_pd(_mm256_mul_pd(ax, ax), dxx),
                              _mm256_mul_pd(_mm256_mul_pd(c.two, _mm256_mul_pd(ax, ay)), dxy)),
                _mm256_mul_pd(_mm256_mul_pd(ay, ay), dyy));
            __m256d dir = safe_div(num, sr, c.zero);
            __m256d deg = pow_half_vec(sr, c.pk, c.half_gamma);
            __m256d dpn = _mm256_add_pd(lap, _mm256_mul_pd(c.pm2, dir));
            __m256d fv = _mm256_loadu_pd(rf + ix);
            __m256d rhs = _mm256_add_pd(_mm256_mul_pd(deg, dpn), fv);
            _mm256_storeu_pd(ro + ix, _mm256_add_pd(cc, _mm256_mul_pd(c.dt, rhs)));
        }
        for (; ix < nx - 1; ++ix) {
            // 3x3 sub-block through the scalar reference
            double su[9] = {rs[ix - 1], rs[ix], rs[ix + 1], rc[ix - 1], rc[ix],
                            rc[ix + 1], rn[ix - 1], rn[ix], rn[ix + 1]};
            double sf[9] = {0, 0, 0, 0, rf[ix], 0, 0, 0, 0};
            double so[9];
            scalar_kernels().step_interior_2d(su, sf, so, 3, 3, 1, 2, sp);
            ro[ix] = so[4];
        }
    }
}

inline double hmin(__m256d v) {
    alignas(32) double a[4];
    _mm256_store_pd(a, v);
    double m = a[0];
    for (int i = 1; i < 4; ++i) m = a[i] < m ? a[i] : m;
    return m;
}

inline double hmax(__m256d v) {
    alignas(32) double a[4];
    _mm256_store_pd(a, v);
    double m = a[0];
    for (int i = 1; i < 4; ++i) m = a[i] > m ? a[i] : m;
    return m;
}

void minmax_impl(const double* v, std::size_t n, double& mn, double& mx) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    std::size_t i = 0;
    if (n >= 4) {
        __m256d vlo = _mm256_set1_pd(lo), vhi = _mm256_set1_pd(hi);
        for (; i + 4 <= n; i += 4) {
            __m256d x = _mm256_loadu_pd(v + i);
            vlo = _mm256_min_pd(vlo, x);
            vhi = _mm256_max_pd(vhi, x);
        }
        lo = hmin(vlo);
        hi = hmax(vhi);
    }
    for (; i < n; ++i) {
        lo = v[i] < lo ? v[i] : lo;
        hi = v[i] > hi ? v[i] : hi;
    }
    mn = lo;
    mx = hi;
}

void grad_sq_1d(const double* u, int n, double h, double qx, double& mn, double& mx) {
    __m256d inv2h = _mm256_set1_pd(1.0 / (2.0 * h));
    __m256d vqx = _mm256_set1_pd(qx);
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    __m256d vlo = _mm256_set1_pd(lo), vhi = _mm256_setzero_pd();
    int i = 1;
    for (; i + 4 <= n - 1; i += 4) {
        __m256d w = _mm256_loadu_pd(u + i - 1);
        __m256d e = _mm256_loadu_pd(u + i + 1);
        __m256d ax = _mm256_add_pd(_mm256_mul_pd(_mm256_sub_pd(e, w), inv2h), vqx);
        __m256d s2 = _mm256_mul_pd(ax, ax);
        vlo = _mm256_min_pd(vlo, s2);
        vhi = _mm256_max_pd(vhi, s2);
    }
    lo = hmin(vlo);
    hi = hmax(vhi);
    double inv2hs = 1.0 / (2.0 * h);
    for (; i < n - 1; ++i) {
        double ax = (u[i + 1] - u[i - 1]) * inv2hs + qx;
        double s2 = ax * ax;
        lo = s2 < lo ? s2 : lo;
        hi = s2 > hi ? s2 : hi;
    }
    mn = lo;
    mx = hi;
}

void grad_sq_2d(const double* u, int nx, int ny, double h, double qx, double qy, double& mn,
                double& mx) {
    __m256d inv2h = _mm256_set1_pd(1.0 / (2.0 * h));
    __m256d vqx = _mm256_set1_pd(qx), vqy = _mm256_set1_pd(qy);
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    __m256d vlo = _mm256_set1_pd(lo), vhi = _mm256_setzero_pd();
    double inv2hs = 1.0 / (2.0 * h);
    for (int iy = 1; iy < ny - 1; ++iy) {
        const double* rs = u + (iy - 1) * nx;
        const double* rc = u + iy * nx;
        const double* rn = u + (iy + 1) * nx;
        int ix = 1;
        for (; ix + 4 <= nx - 1; ix += 4) {
            __m256d w = _mm256_loadu_pd(rc + ix - 1);
            __m256d e = _mm256_loadu_pd(rc + ix + 1);
            __m256d ss = _mm256_loadu_pd(rs + ix);
            __m256d nn = _mm256_loadu_pd(rn + ix);
            __m256d ax = _mm256_add_pd(_mm256_mul_pd(_mm256_sub_pd(e, w), inv2h), vqx);
            __m256d ay = _mm256_add_pd(_mm256_mul_pd(_mm256_sub_pd(nn, ss), inv2h), vqy);
            __m256d s2 = _mm256_add_pd(_mm256_mul_pd(ax, ax), _mm256_mul_pd(ay, ay));
            vlo = _mm256_min_pd(vlo, s2);
            vhi = _mm256_max_pd(vhi, s2);
        }
        for (; ix < nx - 1; ++ix) {
            double ax = (rc[ix + 1] - rc[ix - 1]) * inv2hs + qx;
            double ay = (rn[ix] - rs[ix]) * inv2hs + qy;
            double s2 = ax * ax + ay * ay;
            lo = s2 < lo ? s2 : lo;
            hi = s2 > hi ? s2 : hi;
        }
    }
    lo = std::min(lo, hmin(vlo));
    hi = std::max(hi, hmax(vhi));
    mn = lo;
    mx = hi;
}

double lip_pairs_impl(const double* u, const double* x, const double* y, std::size_t i0,
                      std::size_t i1) {
    const __m256d signmask = _mm256_set1_pd(-0.0);
    double best = 0.0;
    for (std::size_t i = i0; i < i1; ++i) {
        __m256d vbest = _mm256_setzero_pd();
        __m256d vu = _mm256_set1_pd(u[i]);
        __m256d vx = _mm256_set1_pd(x[i]);
        __m256d vy = y ? _mm256_set1_pd(y[i]) : _mm256_setzero_pd();
        std::size_t j = 0;
        for (; j + 4 <= i; j += 4) {
            __m256d du = _mm256_andnot_pd(signmask, _mm256_sub_pd(vu, _mm256_loadu_pd(u + j)));
            __m256d dx = _mm256_sub_pd(vx, _mm256_loadu_pd(x + j));
            __m256d d2 = _mm256_mul_pd(dx, dx);
            if (y) {
                __m256d dy = _mm256_sub_pd(vy, _mm256_loadu_pd(y + j));
                d2 = _mm256_add_pd(d2, _mm256_mul_pd(dy, dy));
            }
            __m256d v = _mm256_div_pd(du, _mm256_sqrt_pd(d2));
            vbest = _mm256_max_pd(vbest, v);
        }
        double b = hmax(vbest);
        best = b > best ? b : best;
        for (; j < i; ++j) {
            double du = std::fabs(u[i] - u[j]);
            double dx = x[i] - x[j];
            double d2 = dx * dx;
            if (y) {
                double dy = y[i] - y[j];
                d2 = d2 + dy * dy;
            }
            double v = du / std::sqrt(d2);
            best = v > best ? v : best;
        }
    }
    return best;
}

} // namespace

const Kernels* avx2_kernels() {
    static const Kernels k = {
        "avx2", step_1d, step_2d, minmax_impl, grad_sq_1d, grad_sq_2d, lip_pairs_impl,
    };
    return &k;
}

} // namespace parlab::kernels

#else

namespace parlab::kernels {
const Kernels* avx2_kernels() { return nullptr; }
} // namespace parlab::kernels

#endif
