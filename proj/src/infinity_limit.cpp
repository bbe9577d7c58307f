#include "pxeig/infinity_limit.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pxeig/errors.hpp"
#include "pxeig/luxemburg_norms.hpp"

namespace pxeig {

namespace {

double sup_gradient(const std::vector<Vec2>& g, const GriddedDomain& dom) {
    double m = 0.0;
    for (std::size_t k : dom.active_nodes()) m = std::max(m, g[k].norm());
    return m;
}

struct Stencil {
    double c, e, w, n, s, ne, nw, se, sw;
};

std::optional<Stencil> stencil_at(const ScalarField& v, std::size_t node) {
    const GriddedDomain& dom = v.domain();
    if (dom.kind(node) != NodeKind::Interior) return std::nullopt;
    auto at = [&](int dx, int dy) -> std::optional<double> {
        const auto q = dom.neighbor(node, dx, dy);
        if (!q || !dom.inside(*q)) return std::nullopt;
        return v[*q];
    };
    Stencil st{};
    st.c = v[node];
    const auto e = at(1, 0), w = at(-1, 0);
    if (!e || !w) return std::nullopt;
    st.e = *e;
    st.w = *w;
    if (dom.dim() == 1) return st;
    const auto n = at(0, 1), s = at(0, -1), ne = at(1, 1), nw = at(-1, 1), se = at(1, -1), sw = at(-1, -1);
    if (!n || !s || !ne || !nw || !se || !sw) return std::nullopt;
    st.n = *n;
    st.s = *s;
    st.ne = *ne;
    st.nw = *nw;
    st.se = *se;
    st.sw = *sw;
    return st;
}

double infinity_x_at(const Stencil& st, const GriddedDomain& dom, const VariableExponent& p, std::size_t node,
                     double cutoff) {
    const double h = dom.h();
    const double vx = (st.e - st.w) / (2.0 * h);
    const double vxx = (st.e - 2.0 * st.c + st.w) / (h * h);
    double value = vx * vx * vxx;
    Vec2 grad{vx, 0.0};
    if (dom.dim() == 2) {
        const double vy = (st.n - st.s) / (2.0 * h);
        const double vyy = (st.n - 2.0 * st.c + st.s) / (h * h);
        const double vxy = (st.ne - st.nw - st.se + st.sw) / (4.0 * h * h);
        value += 2.0 * vx * vy * vxy + vy * vy * vyy;
        grad.y = vy;
    }
    const double mag = grad.norm();
    if (mag >= cutoff && mag > 0.0) {
        value += mag * mag * std::log(mag) * grad.dot(p.grad_ln_p(dom.coord(node)));
    }
    return value;
}

}  // namespace

SweepResult sweep_to_infinity(const DomainPtr& dom, const VariableExponent& p, const std::vector<std::int64_t>& j_list,
                              const SolverOptions& opts, SweepStart start) {
    if (j_list.empty()) throw ArgumentError("sweep_to_infinity: empty j list");
    for (std::size_t i = 0; i < j_list.size(); ++i) {
        if (j_list[i] < 1) throw ArgumentError("sweep_to_infinity: j must be a positive integer");
        if (i > 0 && j_list[i] <= j_list[i - 1]) throw ArgumentError("sweep_to_infinity: j list must be strictly ascending");
    }
    if (j_list.back() * p.p_plus() > kMaxSweepExponent) {
        std::ostringstream os;
        os << "sweep_to_infinity: j * p+ = " << j_list.back() * p.p_plus() << " exceeds the supported range "
           << kMaxSweepExponent;
        throw ArgumentError(os.str());
    }

    SweepResult out;
    out.lambda_infinity_geometric = inradius_and_lambda_infinity(dom).lambda_infinity;
    SolverOptions row_opts = opts;
    for (std::int64_t j : j_list) {
        if (start == SweepStart::Warm && !out.rows.empty()) {
            row_opts.initialization = Initialization::Provided;
            row_opts.initial = out.rows.back().u;
        }
        EigenSolution sol = minimize_rayleigh(dom, scale_exponent(p, j), row_opts);
        SweepRow row;
        row.j = j;
        row.lambda = sol.lambda;
        row.S = sol.S;
        row.gap = std::abs(sol.lambda - out.lambda_infinity_geometric);
        row.iterations = sol.iterations;
        row.converged = sol.converged;
        row.u = std::move(sol.u);
        out.rows.push_back(std::move(row));
    }
    out.limit_field = out.rows.back().u;
    out.convergence_gap = out.rows.back().gap;
    return out;
}

ScalarField gradient_normalized(const ScalarField& u) {
    const double K = sup_gradient(gradient(u), u.domain());
    if (!(K > 0.0)) throw ArgumentError("gradient_normalized: field has zero gradient");
    ScalarField v = u;
    v *= 1.0 / K;
    return v;
}

double infinity_x_laplacian(const ScalarField& v, const VariableExponent& p, std::size_t node) {
    const double scale = sup_gradient(gradient(v), v.domain());
    return infinity_x_laplacian(v, p, node, kGradCutoff * scale);
}

double infinity_x_laplacian(const ScalarField& v, const VariableExponent& p, std::size_t node, double grad_cutoff) {
    const auto st = stencil_at(v, node);
    if (!st) {
        std::ostringstream os;
        os << "infinity_x_laplacian: stencil at node " << node << " crosses the boundary";
        throw StencilError(os.str());
    }
    return infinity_x_at(*st, v.domain(), p, node, grad_cutoff);
}

LimitResidual limit_equation_residual(const ScalarField& u, const VariableExponent& p, double lambda_inf) {
    const GriddedDomain& dom = u.domain();
    for (std::size_t k : dom.active_nodes()) {
        if (u[k] < 0.0) throw ArgumentError("limit_equation_residual: u has negative nodes");
    }
    if (u.is_zero()) throw ArgumentError("limit_equation_residual: u is identically zero");

    LimitResidual out;
    const std::vector<Vec2> grad = gradient(u);
    out.K = sup_gradient(grad, dom);
    // A constant field has no derivatives at all; any positive K gives the same second member.
    const double K = out.K > 0.0 ? out.K : 1.0;
    ScalarField v = u;
    v *= 1.0 / K;
    const double cutoff = kGradCutoff * (out.K > 0.0 ? 1.0 : 0.0);

    const ScalarField delta = distance_function(u.domain_ptr());
    const std::vector<std::uint8_t> excluded = near_set(dom, distance_ridge(delta), 2.0 * dom.h());

    out.residual = ScalarField(u.domain_ptr());
    out.evaluated.assign(dom.node_count(), 0);
    out.counted.assign(dom.node_count(), 0);
    for (std::size_t k : dom.interior_nodes()) {
        const auto st = stencil_at(v, k);
        if (!st) continue;
        const double g = grad[k].norm();
        const double first = u[k] > 0.0 ? lambda_inf - g / u[k] : lambda_inf * u[k] - g;
        const double second = infinity_x_at(*st, dom, p, k, cutoff);
        const double r = std::max(first, second);
        out.residual[k] = r;
        out.evaluated[k] = 1;
        if (!excluded[k]) {
            out.counted[k] = 1;
            out.max_abs = std::max(out.max_abs, std::abs(r));
        }
    }
    return out;
}

}  // namespace pxeig
