#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "parlab/errors.hpp"

namespace parlab {

using Vec2 = std::array<double, 2>;

inline double dot(const Vec2& a, const Vec2& b) { return a[0] * b[0] + a[1] * b[1]; }
inline double norm(const Vec2& a) { return std::sqrt(a[0] * a[0] + a[1] * a[1]); }

// Uniform lattice over the box [-1,1]^n around `origin`, n in {1,2}.
// The node count per axis is odd so the origin is a node; h is snapped to
// 1/m for integer m. dt is the nominal slice spacing used when building
// synthetic fields (solved fields carry their own per-slice times).
struct GridSpec {
    int n = 1;
    double h = 0.02;
    double dt = 0.01;
    double t_depth = 1.0;
    Vec2 origin{0.0, 0.0};

    static GridSpec make(int n, double h, double t_depth, double dt = 0.0,
                         Vec2 origin = {0.0, 0.0});

    int nodes_per_axis() const { return 2 * half_m_ + 1; }
    int node_count() const;
    // axis coordinate of index i in [0, nodes_per_axis())
    double axis_coord(int axis, int i) const { return origin[axis] + (i - half_m_) * h; }
    Vec2 coords(int node) const;
    int index(int ix, int iy = 0) const { return iy * nodes_per_axis() + ix; }
    bool is_boundary(int node) const;
    // node index of the point nearest to x; throws OutOfDomain if outside the box
    int nearest_node(const Vec2& x) const;

    void validate() const;

    int half_m_ = 50; // nodes per axis = 2*half_m_+1
};

// Sampled space-time field. Slices are node-major (ix fastest), times strictly
// increasing, the last time is t_final.
class ScalarField {
public:
    GridSpec spec;
    std::vector<double> times;
    std::vector<std::vector<double>> slices;

    double t_final() const { return times.back(); }
    double t_first() const { return times.front(); }
    double value(int node, int slice) const { return slices[slice][node]; }
    int slice_count() const { return static_cast<int>(times.size()); }

    // all slices same node count, all values finite, times increasing
    void validate() const;

    // synthetic field sampled from fn(x, t) on uniform slices spec.dt apart,
    // covering [t_final - spec.t_depth, t_final]
    static ScalarField from_function(const GridSpec& spec,
                                     const std::function<double(Vec2, double)>& fn,
                                     double t_final = 0.0);
};

// B_r(center) x (t0 - r^2 lambda^-gamma, t0]
struct IntrinsicCylinder {
    Vec2 center{0.0, 0.0};
    double t0 = 0.0;
    double r = 1.0;
    double lambda = 1.0;
    double gamma = 0.0;

    double depth() const; // r^2 * lambda^-gamma
};

// Lattice points of the field inside a cylinder. Spatial membership is
// time-independent, so the set is stored as (spatial nodes) x (slice indices).
struct CylinderNodes {
    std::vector<int> nodes;      // |x - center| < r, strict
    std::vector<int> slice_ids;  // t0 - depth < t <= t0, ascending
    std::size_t pair_count() const { return nodes.size() * slice_ids.size(); }
};

// Throws EmptyCylinder if fewer than 4 spatial nodes or 2 slices fall inside.
CylinderNodes nodes_in_cylinder(const ScalarField& field, const IntrinsicCylinder& cyl);

// Multilinear interpolation in space, linear in time; exact on functions
// affine in x and t. Throws OutOfDomain outside the field's extent.
double sample(const ScalarField& field, const Vec2& x, double t);

// Spatial-only interpolation within one slice.
double interp_slice(const GridSpec& spec, const std::vector<double>& slice, const Vec2& x);

} // namespace parlab
