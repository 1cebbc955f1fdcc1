#include "parlab/probe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "parlab/kernels.hpp"
#include "parlab/operators.hpp"
#include "parlab/parallel.hpp"

namespace parlab {

namespace {

struct SplitMix {
    std::uint64_t s;
    std::uint64_t next() {
        std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    std::size_t below(std::size_t n) { return static_cast<std::size_t>(next() % n); }
};

// first m of a seeded Fisher-Yates shuffle
template <typename T>
std::vector<T> subsample(std::vector<T> v, std::size_t m, SplitMix& rng) {
    if (v.size() <= m) return v;
    for (std::size_t i = 0; i < m; ++i) std::swap(v[i], v[i + rng.below(v.size() - i)]);
    v.resize(m);
    std::sort(v.begin(), v.end());
    return v;
}

// Per spatial node, min and max over the cylinder's slices. osc(u - l.x) then
// only needs one pass over nodes for any l.
struct CylData {
    std::vector<int> nodes;
    std::vector<double> xs, ys;
    std::vector<double> umin, umax, umean;
    std::vector<int> slice_ids;
    int n = 1;
};

CylData collect(const ScalarField& field, const IntrinsicCylinder& cyl) {
    CylinderNodes cn = nodes_in_cylinder(field, cyl);
    CylData d;
    d.nodes = std::move(cn.nodes);
    d.slice_ids = std::move(cn.slice_ids);
    d.n = field.spec.n;
    std::size_t m = d.nodes.size();
    d.xs.resize(m);
    d.ys.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        Vec2 x = field.spec.coords(d.nodes[i]);
        d.xs[i] = x[0];
        d.ys[i] = x[1];
    }
    d.umin.assign(m, std::numeric_limits<double>::infinity());
    d.umax.assign(m, -std::numeric_limits<double>::infinity());
    d.umean.assign(m, 0.0);
    for (int s : d.slice_ids) {
        const auto& sl = field.slices[s];
        for (std::size_t i = 0; i < m; ++i) {
            double v = sl[d.nodes[i]];
            d.umin[i] = std::min(d.umin[i], v);
            d.umax[i] = std::max(d.umax[i], v);
            d.umean[i] += v;
        }
    }
    for (auto& v : d.umean) v /= static_cast<double>(d.slice_ids.size());
    return d;
}

double osc_of_plane(const CylData& d, const Vec2& l) {
    double hi = -std::numeric_limits<double>::infinity();
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < d.nodes.size(); ++i) {
        double px = l[0] * d.xs[i] + l[1] * d.ys[i];
        hi = std::max(hi, d.umax[i] - px);
        lo = std::min(lo, d.umin[i] - px);
    }
    return hi - lo;
}

// least-squares plane u ~ c + l.x over the cylinder (normal equations)
Vec2 lsq_plane(const CylData& d) {
    std::size_t m = d.nodes.size();
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0, su = 0, sux = 0, suy = 0;
    for (std::size_t i = 0; i < m; ++i) {
        sx += d.xs[i];
        sy += d.ys[i];
        sxx += d.xs[i] * d.xs[i];
        syy += d.ys[i] * d.ys[i];
        sxy += d.xs[i] * d.ys[i];
        su += d.umean[i];
        sux += d.umean[i] * d.xs[i];
        suy += d.umean[i] * d.ys[i];
    }
    double N = static_cast<double>(m);
    if (d.n == 1) {
        double det = N * sxx - sx * sx;
        if (std::abs(det) < 1e-30) return {0.0, 0.0};
        return {(N * sux - sx * su) / det, 0.0};
    }
    // 3x3 system for (c, lx, ly), Cramer
    double A[3][3] = {{N, sx, sy}, {sx, sxx, sxy}, {sy, sxy, syy}};
    double b[3] = {su, sux, suy};
    auto det3 = [](double M[3][3]) {
        return M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1]) -
               M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0]) +
               M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0]);
    };
    double det = det3(A);
    if (std::abs(det) < 1e-30) return {0.0, 0.0};
    Vec2 l{0.0, 0.0};
    for (int col = 1; col < 3; ++col) {
        double M[3][3];
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) M[r][c] = c == col ? b[r] : A[r][c];
        l[col - 1] = det3(M) / det;
    }
    return l;
}

double golden_axis(const CylData& d, Vec2& l, int axis, double radius) {
    const double invphi = 0.6180339887498949;
    double a = l[axis] - radius, b = l[axis] + radius;
    double x1 = b - invphi * (b - a), x2 = a + invphi * (b - a);
    auto feval = [&](double v) {
        Vec2 t = l;
        t[axis] = v;
        return osc_of_plane(d, t);
    };
    double f1 = feval(x1), f2 = feval(x2);
    for (int it = 0; it < 60; ++it) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = feval(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = feval(x2);
        }
    }
    double best = 0.5 * (a + b);
    l[axis] = best;
    return osc_of_plane(d, l);
}

} // namespace

FitResult loglog_fit(std::span<const std::pair<double, double>> pts) {
    FitResult fit;
    std::vector<std::pair<double, double>> logs;
    for (auto [x, y] : pts)
        if (x > 0.0 && y > 0.0) logs.emplace_back(std::log(x), std::log(y));
    fit.samples = static_cast<int>(logs.size());
    if (logs.size() < 2) return fit;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto [x, y] : logs) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double N = static_cast<double>(logs.size());
    double det = N * sxx - sx * sx;
    if (std::abs(det) < 1e-30) return fit;
    fit.slope = (N * sxy - sx * sy) / det;
    double icpt = (sy - fit.slope * sx) / N;
    double ss_res = 0, ss_tot = 0, ymean = sy / N;
    for (auto [x, y] : logs) {
        double e = y - (icpt + fit.slope * x);
        ss_res += e * e;
        ss_tot += (y - ymean) * (y - ymean);
    }
    fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    fit.valid = true;
    return fit;
}

namespace {

// max over same-slice pairs of |du|/|dx| for a node subset, kernel inner loop
double lip_over(const ScalarField& field, const std::vector<int>& nodes,
                const std::vector<int>& slice_ids, const std::vector<double>& xs,
                const std::vector<double>& ys, std::uint64_t* pairs = nullptr) {
    const auto& K = kernels::active();
    std::size_t m = nodes.size();
    std::vector<double> u(m);
    double best = 0.0;
    for (int s : slice_ids) {
        const auto& sl = field.slices[s];
        for (std::size_t i = 0; i < m; ++i) u[i] = sl[nodes[i]];
        const double* yp = field.spec.n == 2 ? ys.data() : nullptr;
        std::vector<double> partial(worker_count(), 0.0);
        parallel_for(m, [&](std::size_t b, std::size_t e) {
            double v = K.lip_pairs(u.data(), xs.data(), yp, b, e);
            std::size_t w = (b * worker_count()) / std::max<std::size_t>(m, 1);
            w = std::min(w, partial.size() - 1);
            partial[w] = std::max(partial[w], v);
        });
        for (double v : partial) best = std::max(best, v);
        if (pairs) *pairs += m * (m - 1) / 2;
    }
    return best;
}

} // namespace

double oscillation(const ScalarField& field, const IntrinsicCylinder& cyl) {
    CylData d = collect(field, cyl);
    return osc_of_plane(d, {0.0, 0.0});
}

BestPlane best_plane(const ScalarField& field, const IntrinsicCylinder& cyl) {
    CylData d = collect(field, cyl);
    Vec2 l = lsq_plane(d);
    double osc = osc_of_plane(d, l);
    // the osc objective is convex in l; per-axis golden section from the
    // least-squares seed, re-bracketing tighter each round
    double radius = std::max(2.0 * osc / cyl.r, 1e-6);
    for (int round = 0; round < 4; ++round) {
        for (int axis = 0; axis < d.n; ++axis) osc = golden_axis(d, l, axis, radius);
        radius *= 0.2;
    }
    // compass polish guards against coordinate-descent stalls at kinks
    double step = std::max(8.0 * radius, 1e-9);
    while (step > 1e-10) {
        bool improved = false;
        for (int axis = 0; axis < d.n; ++axis) {
            for (double dir : {1.0, -1.0}) {
                Vec2 trial = l;
                trial[axis] += dir * step;
                double o = osc_of_plane(d, trial);
                if (o < osc) {
                    osc = o;
                    l = trial;
                    improved = true;
                }
            }
        }
        if (d.n == 2) {
            for (double dx : {1.0, -1.0})
                for (double dy : {1.0, -1.0}) {
                    Vec2 trial{l[0] + dx * step, l[1] + dy * step};
                    double o = osc_of_plane(d, trial);
                    if (o < osc) {
                        osc = o;
                        l = trial;
                        improved = true;
                    }
                }
        }
        if (!improved) step *= 0.5;
    }
    return {l, osc};
}

FlatnessReport flatness_iteration(const ScalarField& field, const FlatnessConfig& cfg,
                                  double gamma) {
    cfg.validate(gamma);
    FlatnessReport rep;
    rep.tau = std::log(1.0 - cfg.delta) / std::log(cfg.rho);
    Vec2 prev_l{0.0, 0.0};
    for (int k = 0; k <= cfg.kmax; ++k) {
        double rk = std::pow(cfg.rho, k);
        double lk = std::pow(1.0 - cfg.delta, k);
        IntrinsicCylinder cyl{{0.0, 0.0}, field.t_final(), rk, lk, gamma};
        BestPlane bp;
        try {
            bp = best_plane(field, cyl);
        } catch (const EmptyCylinder&) {
            rep.verdict = FlatnessVerdict::Unresolved;
            rep.verdict_k = k;
            rep.pass = false;
            return rep;
        }
        FlatnessLevel lev;
        lev.k = k;
        lev.r = rk;
        lev.lambda = lk;
        lev.l = bp.l;
        lev.osc = bp.osc;
        lev.osc_ok = bp.osc <= rk * lk + 1e-12;
        lev.slope_ok = norm(bp.l) <= cfg.c2 * lk + 1e-12;
        if (k > 0) {
            lev.increment = norm(Vec2{bp.l[0] - prev_l[0], bp.l[1] - prev_l[1]});
            double lk_prev = std::pow(1.0 - cfg.delta, k - 1);
            lev.increment_ok = lev.increment <= cfg.c3 * lk_prev + 1e-12;
        }
        rep.levels.push_back(lev);
        if (!lev.slope_ok) {
            rep.verdict = FlatnessVerdict::Smooth;
            rep.verdict_k = k;
            return rep;
        }
        prev_l = bp.l;
    }
    rep.verdict = FlatnessVerdict::Degenerate;
    return rep;
}

RegularityReport seminorms(const ScalarField& field, const IntrinsicCylinder& region,
                           std::span<const double> alphas, std::uint64_t seed,
                           std::uint64_t pair_cap) {
    CylinderNodes cn = nodes_in_cylinder(field, region);
    RegularityReport rep;
    SplitMix rng{seed * 0x9e3779b97f4a7c15ULL + 1};

    // --- spatial Lipschitz constant, same-time pairs
    std::vector<int> nodes = cn.nodes;
    std::vector<int> slice_ids = cn.slice_ids;
    std::uint64_t per_slice = static_cast<std::uint64_t>(nodes.size()) * (nodes.size() - 1) / 2;
    if (per_slice > pair_cap) {
        std::size_t m = static_cast<std::size_t>(std::sqrt(2.0 * static_cast<double>(pair_cap)));
        nodes = subsample(nodes, std::max<std::size_t>(m, 2), rng);
        per_slice = static_cast<std::uint64_t>(nodes.size()) * (nodes.size() - 1) / 2;
        rep.subsampled = true;
    }
    if (per_slice * slice_ids.size() > pair_cap) {
        std::size_t keep = std::max<std::size_t>(1, pair_cap / std::max<std::uint64_t>(per_slice, 1));
        std::size_t stride = (slice_ids.size() + keep - 1) / keep;
        std::vector<int> thin;
        for (std::size_t i = slice_ids.size(); i-- > 0;)
            if ((slice_ids.size() - 1 - i) % stride == 0) thin.push_back(slice_ids[i]);
        std::reverse(thin.begin(), thin.end());
        slice_ids = thin; // always keeps the top slice
        rep.subsampled = true;
    }
    std::vector<double> xs(nodes.size()), ys(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        Vec2 x = field.spec.coords(nodes[i]);
        xs[i] = x[0];
        ys[i] = x[1];
    }
    rep.space_lip = lip_over(field, nodes, slice_ids, xs, ys, &rep.pairs_evaluated);

    // --- parabolic Holder seminorms over space-time pairs
    if (!alphas.empty()) {
        struct Pt {
            double x, y, t, u;
        };
        std::vector<Pt> pts;
        pts.reserve(nodes.size() * slice_ids.size());
        for (int s : slice_ids)
            for (std::size_t i = 0; i < nodes.size(); ++i)
                pts.push_back({xs[i], ys[i], field.times[s], field.slices[s][nodes[i]]});
        std::size_t pmax = static_cast<std::size_t>(std::sqrt(2.0 * static_cast<double>(pair_cap)));
        if (pts.size() > pmax) {
            for (std::size_t i = 0; i < pmax; ++i)
                std::swap(pts[i], pts[i + rng.below(pts.size() - i)]);
            pts.resize(pmax);
            rep.subsampled = true;
        }
        std::vector<double> amax(alphas.size(), 0.0);
        std::vector<std::vector<double>> partial(worker_count(),
                                                 std::vector<double>(alphas.size(), 0.0));
        parallel_for(pts.size(), [&](std::size_t b, std::size_t e) {
            std::vector<double> local(alphas.size(), 0.0);
            for (std::size_t i = b; i < e; ++i)
                for (std::size_t j = 0; j < i; ++j) {
                    double dx = pts[i].x - pts[j].x, dy = pts[i].y - pts[j].y;
                    double ds = std::sqrt(dx * dx + dy * dy);
                    double dt = std::abs(pts[i].t - pts[j].t);
                    if (ds == 0.0 && dt == 0.0) continue;
                    double du = std::abs(pts[i].u - pts[j].u);
                    for (std::size_t a = 0; a < alphas.size(); ++a) {
                        double den = std::pow(ds, alphas[a]) + std::pow(dt, 0.5 * alphas[a]);
                        double v = du / den;
                        local[a] = std::max(local[a], v);
                    }
                }
            std::size_t w = (b * worker_count()) / std::max<std::size_t>(pts.size(), 1);
            w = std::min(w, partial.size() - 1);
            for (std::size_t a = 0; a < alphas.size(); ++a)
                partial[w][a] = std::max(partial[w][a], local[a]);
        });
        for (const auto& loc : partial)
            for (std::size_t a = 0; a < alphas.size(); ++a) amax[a] = std::max(amax[a], loc[a]);
        for (std::size_t a = 0; a < alphas.size(); ++a) rep.holder[alphas[a]] = amax[a];
        rep.pairs_evaluated += pts.size() * (pts.size() - 1) / 2;
    }

    // --- time exponent from the center trace over dyadic windows
    int center = field.spec.nearest_node(region.center);
    double depth = region.depth();
    // median spacing; the final solver step is truncated to land on t = 0 and
    // must not drag the window floor down to roundoff scale
    std::vector<double> spacings;
    for (std::size_t s = 1; s < cn.slice_ids.size(); ++s)
        spacings.push_back(field.times[cn.slice_ids[s]] - field.times[cn.slice_ids[s - 1]]);
    std::sort(spacings.begin(), spacings.end());
    double med_sp = spacings[spacings.size() / 2];
    double window = depth / 4.0;
    while (window >= 4.0 * med_sp) {
        double lo = region.t0 - window;
        double mn = std::numeric_limits<double>::infinity(), mx = -mn;
        int count = 0;
        for (int s : cn.slice_ids) {
            double t = field.times[s];
            if (t >= lo - 1e-15 && t <= region.t0 + 1e-15) {
                double v = field.slices[s][center];
                mn = std::min(mn, v);
                mx = std::max(mx, v);
                ++count;
            }
        }
        if (count >= 2) rep.time_osc.emplace_back(window, mx - mn);
        window *= 0.5;
    }
    rep.time_exponent = loglog_fit(rep.time_osc);

    // --- gradient increment exponent on the top slice
    {
        int top = cn.slice_ids.back();
        std::vector<int> inodes;
        for (int i : nodes)
            if (!field.spec.is_boundary(i)) inodes.push_back(i);
        inodes = subsample(inodes, 2000, rng);
        std::vector<Vec2> grads(inodes.size());
        std::vector<Vec2> pos(inodes.size());
        for (std::size_t i = 0; i < inodes.size(); ++i) {
            grads[i] = gradient(field, inodes[i], top);
            pos[i] = field.spec.coords(inodes[i]);
        }
        std::vector<std::pair<double, double>> incr;
        for (double d = 2.0 * field.spec.h; d <= region.r; d *= 2.0) {
            double g = 0.0;
            for (std::size_t i = 0; i < inodes.size(); ++i)
                for (std::size_t j = 0; j < i; ++j) {
                    double dx = pos[i][0] - pos[j][0], dy = pos[i][1] - pos[j][1];
                    double dist = std::sqrt(dx * dx + dy * dy);
                    if (dist > d) continue;
                    double gx = grads[i][0] - grads[j][0], gy = grads[i][1] - grads[j][1];
                    g = std::max(g, std::sqrt(gx * gx + gy * gy));
                }
            incr.emplace_back(d, g);
        }
        rep.alpha_est = loglog_fit(incr);
    }
    return rep;
}

double CertificateSpec::phi(double s) const {
    if (mode == CertificateMode::Holder) return std::pow(s, beta);
    double cap = s1 > 0.0 ? s1 : std::pow(1.0 / (4.0 * nu * kappa0), 1.0 / (nu - 1.0));
    double sc = std::min(s, cap);
    return sc - kappa0 * std::pow(sc, nu);
}

void CertificateSpec::validate() const {
    if (!(L1 >= 0.0 && L2 >= 0.0)) throw InvalidParams("L1, L2 must be nonnegative");
    if (mode == CertificateMode::Holder) {
        if (!(beta > 0.0 && beta < 1.0)) throw InvalidParams("beta must lie in (0,1)");
        return;
    }
    if (!(nu > 1.0 && nu < 2.0)) throw InvalidParams("nu must lie in (1,2)");
    if (!(kappa0 > 0.0)) throw InvalidParams("kappa0 must be positive");
    double cap = s1 > 0.0 ? s1 : std::pow(1.0 / (4.0 * nu * kappa0), 1.0 / (nu - 1.0));
    if (!(cap > 2.0)) throw InvalidParams("phi cap s1 must exceed 2");
    if (!(nu * kappa0 * std::pow(cap, nu - 1.0) <= 0.25 + 1e-12))
        throw InvalidParams("need nu kappa0 s1^(nu-1) <= 1/4");
}

CertificateReport doubling_certificate(const ScalarField& field, const CertificateSpec& spec) {
    spec.validate();
    double r = spec.domain_radius();
    const GridSpec& g = field.spec;
    double span = field.t_final() - field.t_first();
    if (span < r * r - 1e-9)
        throw DomainTooSmall("field time span " + std::to_string(span) + " below required " +
                             std::to_string(r * r));

    std::vector<int> ball;
    for (int i = 0; i < g.node_count(); ++i) {
        Vec2 x = g.coords(i);
        if (norm(x) <= r + 1e-12) ball.push_back(i);
    }
    if (ball.size() < 2) throw DomainTooSmall("probe ball has fewer than 2 nodes");

    std::size_t m = ball.size();
    std::vector<double> lx(m), ly(m);
    std::vector<Vec2> pos(m);
    for (std::size_t i = 0; i < m; ++i) {
        Vec2 x = g.coords(ball[i]);
        pos[i] = x;
        double dx0 = x[0] - spec.x0[0], dy0 = x[1] - spec.x0[1];
        double dx1 = x[0] - spec.y0[0], dy1 = x[1] - spec.y0[1];
        lx[i] = 0.5 * spec.L1 * (dx0 * dx0 + dy0 * dy0);
        ly[i] = 0.5 * spec.L1 * (dx1 * dx1 + dy1 * dy1);
    }

    std::vector<double> phi_tab;
    bool tabulate = m * m <= 4'000'000;
    if (tabulate) {
        phi_tab.resize(m * m);
        parallel_for(m, [&](std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i)
                for (std::size_t j = 0; j < m; ++j) {
                    double dx = pos[i][0] - pos[j][0], dy = pos[i][1] - pos[j][1];
                    phi_tab[i * m + j] = spec.L2 * spec.phi(std::sqrt(dx * dx + dy * dy));
                }
        });
    }

    CertificateReport rep;
    rep.spec = spec;
    rep.tolerance = 1e-8 + spec.slack;
    double best = -std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 0;
    int bs = -1;

    std::vector<double> a(m), bvals(m);
    for (int s = 0; s < field.slice_count(); ++s) {
        double t = field.times[s];
        if (t < field.t_final() - r * r - 1e-12) continue;
        const auto& sl = field.slices[s];
        double lt = 0.5 * spec.L1 * (t - spec.t0) * (t - spec.t0);
        for (std::size_t i = 0; i < m; ++i) {
            a[i] = sl[ball[i]] - lx[i];
            bvals[i] = sl[ball[i]] + ly[i];
        }
        struct Best {
            double v = -std::numeric_limits<double>::infinity();
            std::size_t i = 0, j = 0;
        };
        std::vector<Best> partial(worker_count());
        parallel_for(m, [&](std::size_t wb, std::size_t we) {
            Best loc;
            for (std::size_t i = wb; i < we; ++i) {
                const double ai = a[i];
                if (tabulate) {
                    const double* pt = phi_tab.data() + i * m;
                    for (std::size_t j = 0; j < m; ++j) {
                        double v = ai - bvals[j] - pt[j];
                        if (v > loc.v) {
                            loc.v = v;
                            loc.i = i;
                            loc.j = j;
                        }
                    }
                } else {
                    for (std::size_t j = 0; j < m; ++j) {
                        double dx = pos[i][0] - pos[j][0], dy = pos[i][1] - pos[j][1];
                        double v = ai - bvals[j] -
                                   spec.L2 * spec.phi(std::sqrt(dx * dx + dy * dy));
                        if (v > loc.v) {
                            loc.v = v;
                            loc.i = i;
                            loc.j = j;
                        }
                    }
                }
            }
            std::size_t w = (wb * worker_count()) / std::max<std::size_t>(m, 1);
            w = std::min(w, partial.size() - 1);
            if (loc.v > partial[w].v ||
                (loc.v == partial[w].v && loc.i < partial[w].i)) partial[w] = loc;
        });
        Best merged;
        for (const auto& pb : partial)
            if (pb.v > merged.v) merged = pb;
        double v = merged.v - lt;
        if (v > best) {
            best = v;
            bi = merged.i;
            bj = merged.j;
            bs = s;
        }
    }
    if (bs < 0) throw DomainTooSmall("no slices inside the probe time window");
    rep.max_phi = best;
    rep.argmax_x = pos[bi];
    rep.argmax_y = pos[bj];
    rep.argmax_t = field.times[bs];
    rep.pass = best <= rep.tolerance;
    return rep;
}

QSweepReport q_sweep(const ProblemSpec& base, std::span<const Vec2> qs, double ratio_cap) {
    if (base.params.gamma < 0.0)
        throw InvalidParams("the q sweep requires gamma >= 0");
    QSweepReport rep;
    IntrinsicCylinder half{{0.0, 0.0}, 0.0, 0.5, 1.0, 0.0}; // Q_{1/2}, standard scaling
    for (const Vec2& q : qs) {
        QSweepRow row;
        row.q = q;
        row.qnorm = norm(q);
        try {
            ProblemSpec ps = base;
            ps.q = q;
            ScalarField w = solve_deviation(ps);
            half.t0 = w.t_final();
            CylinderNodes cn = nodes_in_cylinder(w, half);
            std::vector<double> xs(cn.nodes.size()), ys(cn.nodes.size());
            for (std::size_t i = 0; i < cn.nodes.size(); ++i) {
                Vec2 x = w.spec.coords(cn.nodes[i]);
                xs[i] = x[0];
                ys[i] = x[1];
            }
            row.lip_w = lip_over(w, cn.nodes, cn.slice_ids, xs, ys);
            const auto& K = kernels::active();
            double wmin = 0.0, wmax = 0.0;
            for (const auto& sl : w.slices) {
                double mn, mx;
                K.minmax(sl.data(), sl.size(), mn, mx);
                wmin = std::min(wmin, mn);
                wmax = std::max(wmax, mx);
            }
            row.wnorm = std::max(std::abs(wmin), std::abs(wmax));
            row.gamma0 = 2.0 + row.wnorm + base.params.source_bound;
            row.above_gamma0 = row.qnorm > row.gamma0;
            ScalarField u = w;
            for (auto& sl : u.slices)
                for (std::size_t i = 0; i < sl.size(); ++i) {
                    Vec2 x = u.spec.coords(static_cast<int>(i));
                    sl[i] += dot(q, x);
                }
            row.lip_u = lip_over(u, cn.nodes, cn.slice_ids, xs, ys);
            row.ok = true;
        } catch (const Error& err) {
            row.error = err.what();
        }
        rep.rows.push_back(row);
    }
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    bool all_ok = true;
    for (const auto& r : rep.rows) {
        if (!r.ok) {
            all_ok = false;
            continue;
        }
        lo = std::min(lo, r.lip_w);
        hi = std::max(hi, r.lip_w);
    }
    if (hi == 0.0)
        rep.ratio = 1.0; // all rows flat
    else if (lo > 0.0 && std::isfinite(lo))
        rep.ratio = hi / lo;
    else
        rep.ratio = std::numeric_limits<double>::infinity();
    rep.pass = all_ok && rep.ratio <= ratio_cap;
    return rep;
}

} // namespace parlab
