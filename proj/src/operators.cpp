#include "parlab/operators.hpp"

#include <cmath>
#include <string>

#include "parlab/detail/node_eval.hpp"

namespace parlab {

void EquationParams::validate() const {
    if (!(gamma > -1.0)) throw InvalidParams("gamma must exceed -1");
    if (!(p > 1.0)) throw InvalidParams("p must exceed 1");
    if (!(eps >= 0.0)) throw InvalidParams("eps must be nonnegative");
    if (gamma < 0.0 && !(eps > 0.0))
        throw InvalidParams("singular gamma < 0 needs a positive gradient regularization");
    if (n != 1 && n != 2) throw InvalidParams("n must be 1 or 2");
    if (!(source_bound >= 0.0)) throw InvalidParams("source bound must be nonnegative");
}

namespace {

struct Stencil {
    double sw, s, se, w, c, e, nw, n, ne;
};

Stencil gather(const ScalarField& field, int node, int slice) {
    const GridSpec& g = field.spec;
    if (g.is_boundary(node))
        throw BoundaryNode("operator needs an interior node, got " + std::to_string(node));
    const std::vector<double>& u = field.slices[slice];
    Stencil st{};
    if (g.n == 1) {
        st.w = u[node - 1];
        st.c = u[node];
        st.e = u[node + 1];
        return st;
    }
    int N = g.nodes_per_axis();
    st.sw = u[node - N - 1];
    st.s = u[node - N];
    st.se = u[node - N + 1];
    st.w = u[node - 1];
    st.c = u[node];
    st.e = u[node + 1];
    st.nw = u[node + N - 1];
    st.n = u[node + N];
    st.ne = u[node + N + 1];
    return st;
}

detail::NodeTerms eval(const ScalarField& field, int node, int slice,
                       const EquationParams& params, const Vec2& q) {
    Stencil st = gather(field, node, slice);
    detail::EvalConsts k =
        detail::make_consts(field.spec.h, params.p - 2.0, params.eps, q[0], q[1], params.gamma);
    if (field.spec.n == 1) return detail::eval_1d(st.w, st.c, st.e, k);
    return detail::eval_2d(st.sw, st.s, st.se, st.w, st.c, st.e, st.nw, st.n, st.ne, k);
}

} // namespace

Vec2 gradient(const ScalarField& field, int node, int slice) {
    const GridSpec& g = field.spec;
    if (g.is_boundary(node))
        throw BoundaryNode("gradient needs an interior node, got " + std::to_string(node));
    const std::vector<double>& u = field.slices[slice];
    double inv2h = 1.0 / (2.0 * g.h);
    if (g.n == 1) return {(u[node + 1] - u[node - 1]) * inv2h, 0.0};
    int N = g.nodes_per_axis();
    return {(u[node + 1] - u[node - 1]) * inv2h, (u[node + N] - u[node - N]) * inv2h};
}

double degeneracy(const Vec2& grad, const EquationParams& params, const Vec2& q) {
    double ax = grad[0] + q[0];
    double ay = grad[1] + q[1];
    double sr = ax * ax + ay * ay + params.eps * params.eps;
    return kernels::pow_half_gamma(sr, kernels::pow_kind(params.gamma), 0.5 * params.gamma);
}

double normalized_p_laplacian(const ScalarField& field, int node, int slice,
                              const EquationParams& params) {
    return eval(field, node, slice, params, {0.0, 0.0}).dpn;
}

double deviation_residual(const ScalarField& field, const DeviationParams& params, int node,
                          int slice) {
    if (slice < 1) throw FirstSlice("residual needs a previous slice");
    double dt = field.times[slice] - field.times[slice - 1];
    double dudt = (field.slices[slice][node] - field.slices[slice - 1][node]) / dt;
    detail::NodeTerms t = eval(field, node, slice - 1, params.base, params.q);
    double f = params.base.source_at(field.spec.coords(node), field.times[slice - 1]);
    return dudt - t.deg * t.dpn - f;
}

double residual(const ScalarField& field, const EquationParams& params, int node, int slice) {
    return deviation_residual(field, DeviationParams{params, {0.0, 0.0}}, node, slice);
}

} // namespace parlab
