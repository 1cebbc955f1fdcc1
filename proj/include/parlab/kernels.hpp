#pragma once

#include <cmath>
#include <cstddef>

namespace parlab::kernels {

// (s)^(gamma/2) with the common exponents lowered to sqrt chains so the
// scalar and SIMD paths stay bit-identical and fast.
enum class PowKind { One, Sqrt, Linear, SqrtSqrt, SqrtCube, Square, Generic };

PowKind pow_kind(double gamma);

inline double pow_half_gamma(double s, PowKind k, double half_gamma) {
    switch (k) {
        case PowKind::One: return 1.0;
        case PowKind::Sqrt: return std::sqrt(s);
        case PowKind::Linear: return s;
        case PowKind::SqrtSqrt: return std::sqrt(std::sqrt(s));
        case PowKind::SqrtCube: return s * std::sqrt(s);
        case PowKind::Square: return s * s;
        default: return std::pow(s, half_gamma);
    }
}

// Per-node constants of the explicit update
//   out = u + dt * (deg * (lap + (p-2) * dir) + f),
// deg = (|Du+q|^2 + eps^2)^(gamma/2), dir = <D^2u ghat, ghat> with the
// regularized direction. Scalar and AVX2 variants must keep the exact same
// operation order (equivalence-tested to the bit).
struct StepParams {
    double h = 0.0;
    double dt = 0.0;
    double pm2 = 0.0;  // p - 2
    double eps2 = 0.0; // eps^2
    double qx = 0.0;
    double qy = 0.0;
    PowKind pk = PowKind::One;
    double half_gamma = 0.0;
};

struct Kernels {
    const char* name;

    // interior update, 1D: writes out[1..n-2]
    void (*step_interior_1d)(const double* u, const double* f, double* out, int n,
                             const StepParams& sp);
    // interior update, 2D row range [y0, y1) of rows 1..ny-2, row-major nx
    void (*step_interior_2d)(const double* u, const double* f, double* out, int nx, int ny,
                             int y0, int y1, const StepParams& sp);

    void (*minmax)(const double* v, std::size_t n, double& mn, double& mx);

    // min/max over interior nodes of |D_h u + q|^2
    void (*grad_sq_range_1d)(const double* u, int n, double h, double qx, double& mn,
                             double& mx);
    void (*grad_sq_range_2d)(const double* u, int nx, int ny, double h, double qx, double qy,
                             double& mn, double& mx);

    // max over pairs i in [i0,i1), j < i of |u_i-u_j| / dist(i,j); y may be
    // null (1D points). Points must be distinct.
    double (*lip_pairs)(const double* u, const double* x, const double* y, std::size_t i0,
                        std::size_t i1);
};

const Kernels& scalar_kernels();
const Kernels* avx2_kernels(); // nullptr when unavailable at build or run time

// Selected at first use: AVX2 when the CPU supports it, overridable with
// PARLAB_SIMD=scalar|avx2|auto.
const Kernels& active();

} // namespace parlab::kernels
