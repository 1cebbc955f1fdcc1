#include "parlab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace parlab {

GridSpec GridSpec::make(int n, double h, double t_depth, double dt, Vec2 origin) {
    GridSpec g;
    g.n = n;
    if (!(h > 0.0)) throw InvalidGrid("h must be positive");
    int m = static_cast<int>(std::lround(1.0 / h));
    if (m < 1) throw InvalidGrid("h too coarse, fewer than 3 nodes per axis");
    double snapped = 1.0 / m;
    if (std::abs(snapped - h) > 0.01 * h)
        throw InvalidGrid("h = " + std::to_string(h) + " does not divide the unit box");
    g.h = snapped;
    g.half_m_ = m;
    g.t_depth = t_depth;
    g.dt = dt > 0.0 ? dt : snapped * snapped;
    g.origin = origin;
    g.validate();
    return g;
}

void GridSpec::validate() const {
    if (n != 1 && n != 2) throw InvalidGrid("spatial dimension must be 1 or 2");
    if (!(h > 0.0)) throw InvalidGrid("h must be positive");
    if (!(dt > 0.0)) throw InvalidGrid("dt must be positive");
    if (!(t_depth > 0.0)) throw InvalidGrid("t_depth must be positive");
    if (nodes_per_axis() % 2 != 1) throw InvalidGrid("node count per axis must be odd");
}

int GridSpec::node_count() const {
    int N = nodes_per_axis();
    return n == 1 ? N : N * N;
}

Vec2 GridSpec::coords(int node) const {
    int N = nodes_per_axis();
    if (n == 1) return {axis_coord(0, node), 0.0};
    return {axis_coord(0, node % N), axis_coord(1, node / N)};
}

bool GridSpec::is_boundary(int node) const {
    int N = nodes_per_axis();
    if (n == 1) return node == 0 || node == N - 1;
    int ix = node % N, iy = node / N;
    return ix == 0 || ix == N - 1 || iy == 0 || iy == N - 1;
}

int GridSpec::nearest_node(const Vec2& x) const {
    int N = nodes_per_axis();
    int idx[2] = {0, 0};
    for (int d = 0; d < n; ++d) {
        double rel = (x[d] - origin[d] + 1.0) / h;
        if (rel < -1e-9 || rel > N - 1 + 1e-9) throw OutOfDomain("point outside the lattice box");
        idx[d] = std::clamp(static_cast<int>(std::lround(rel)), 0, N - 1);
    }
    return index(idx[0], idx[1]);
}

void ScalarField::validate() const {
    spec.validate();
    if (times.empty() || slices.size() != times.size())
        throw InvalidGrid("field needs one time per slice");
    std::size_t nodes = static_cast<std::size_t>(spec.node_count());
    for (std::size_t s = 0; s < slices.size(); ++s) {
        if (slices[s].size() != nodes) throw InvalidGrid("slice node count mismatch");
        for (double v : slices[s])
            if (!std::isfinite(v)) throw InvalidGrid("non-finite field value");
        if (s > 0 && !(times[s] > times[s - 1])) throw InvalidGrid("times must increase");
    }
}

ScalarField ScalarField::from_function(const GridSpec& spec,
                                       const std::function<double(Vec2, double)>& fn,
                                       double t_final) {
    spec.validate();
    ScalarField f;
    f.spec = spec;
    int steps = std::max(1, static_cast<int>(std::lround(spec.t_depth / spec.dt)));
    int nodes = spec.node_count();
    f.times.reserve(steps + 1);
    f.slices.reserve(steps + 1);
    for (int s = 0; s <= steps; ++s) {
        double t = t_final - spec.t_depth + (spec.t_depth * s) / steps;
        if (s == steps) t = t_final;
        std::vector<double> slice(nodes);
        for (int i = 0; i < nodes; ++i) slice[i] = fn(spec.coords(i), t);
        f.times.push_back(t);
        f.slices.push_back(std::move(slice));
    }
    return f;
}

double IntrinsicCylinder::depth() const { return r * r * std::pow(lambda, -gamma); }

CylinderNodes nodes_in_cylinder(const ScalarField& field, const IntrinsicCylinder& cyl) {
    const GridSpec& g = field.spec;
    CylinderNodes out;
    int nodes = g.node_count();
    double r2 = cyl.r * cyl.r;
    for (int i = 0; i < nodes; ++i) {
        Vec2 x = g.coords(i);
        double dx = x[0] - cyl.center[0];
        double dy = g.n == 2 ? x[1] - cyl.center[1] : 0.0;
        if (dx * dx + dy * dy < r2) out.nodes.push_back(i);
    }
    double t_lo = cyl.t0 - cyl.depth();
    for (int s = 0; s < field.slice_count(); ++s) {
        double t = field.times[s];
        if (t > t_lo && t <= cyl.t0 + 1e-12) out.slice_ids.push_back(s);
    }
    if (out.nodes.size() < 4 || out.slice_ids.size() < 2)
        throw EmptyCylinder("cylinder r=" + std::to_string(cyl.r) +
                            " under-resolved: " + std::to_string(out.nodes.size()) +
                            " spatial nodes, " + std::to_string(out.slice_ids.size()) +
                            " slices");
    return out;
}

double interp_slice(const GridSpec& spec, const std::vector<double>& slice, const Vec2& x) {
    int N = spec.nodes_per_axis();
    int i0[2] = {0, 0};
    double fr[2] = {0.0, 0.0};
    for (int d = 0; d < spec.n; ++d) {
        double rel = (x[d] - spec.origin[d] + 1.0) / spec.h;
        if (rel < -1e-9 || rel > N - 1 + 1e-9) throw OutOfDomain("sample point outside the box");
        rel = std::clamp(rel, 0.0, static_cast<double>(N - 1));
        int i = std::min(static_cast<int>(rel), N - 2);
        i0[d] = i;
        fr[d] = rel - i;
    }
    if (spec.n == 1) {
        double a = slice[i0[0]], b = slice[i0[0] + 1];
        return a + fr[0] * (b - a);
    }
    int base = spec.index(i0[0], i0[1]);
    double a00 = slice[base], a10 = slice[base + 1];
    double a01 = slice[base + N], a11 = slice[base + N + 1];
    double lo = a00 + fr[0] * (a10 - a00);
    double hi = a01 + fr[0] * (a11 - a01);
    return lo + fr[1] * (hi - lo);
}

double sample(const ScalarField& field, const Vec2& x, double t) {
    const auto& times = field.times;
    if (t < times.front() - 1e-12 || t > times.back() + 1e-12)
        throw OutOfDomain("sample time outside the field extent");
    double tc = std::clamp(t, times.front(), times.back());
    auto it = std::lower_bound(times.begin(), times.end(), tc);
    std::size_t s1 = static_cast<std::size_t>(it - times.begin());
    if (s1 == 0) return interp_slice(field.spec, field.slices[0], x);
    if (times[s1] == tc) return interp_slice(field.spec, field.slices[s1], x);
    std::size_t s0 = s1 - 1;
    double w = (tc - times[s0]) / (times[s1] - times[s0]);
    double a = interp_slice(field.spec, field.slices[s0], x);
    double b = interp_slice(field.spec, field.slices[s1], x);
    return a + w * (b - a);
}

} // namespace parlab
