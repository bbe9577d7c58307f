#include "pxeig/uniqueness_diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pxeig/errors.hpp"

namespace pxeig {

void GTransform::validate() const {
    if (!(A > 1.0) || !std::isfinite(A)) throw ArgumentError("g-transform: A must exceed 1");
    if (!(alpha >= 1.0) || !std::isfinite(alpha)) throw ArgumentError("g-transform: alpha must be at least 1");
}

GValues g_eval(const GTransform& gt, double t) {
    gt.validate();
    if (!(t >= 0.0)) throw ArgumentError("g_eval: t must be nonnegative");
    const double a = gt.A, al = gt.alpha;
    const double E = std::exp(-al * t);
    const double one_minus_E = -std::expm1(-al * t);
    const double denom = 1.0 + (a - 1.0) * one_minus_E;  // = A - (A - 1) e^{-alpha t}
    GValues v;
    v.g_minus_t = std::log1p((a - 1.0) * one_minus_E) / al;
    v.g = t + v.g_minus_t;
    v.g_prime = a / denom;
    v.g_prime_minus_one = (a - 1.0) * E / denom;
    v.g_double_prime = -al * v.g_prime_minus_one * v.g_prime;
    return v;
}

QPropertyReport g_inequalities_check(const GTransform& gt, std::span<const double> t_samples, double slack) {
    gt.validate();
    QPropertyReport rep;
    std::vector<std::string> failed;
    auto record = [&](const char* name, bool ok) {
        if (ok) return;
        ++rep.violations;
        if (std::find(failed.begin(), failed.end(), name) == failed.end()) failed.emplace_back(name);
    };
    // lhs < rhs up to relative slack on the operand scale
    auto less = [&](double lhs, double rhs, double scale) { return lhs < rhs + slack * scale; };
    auto equal = [&](double lhs, double rhs, double scale) { return std::abs(lhs - rhs) <= slack * scale; };

    const double a = gt.A, al = gt.alpha;
    for (double t : t_samples) {
        if (!(t > 0.0)) throw ArgumentError("g_inequalities_check: samples must be positive");
        const GValues v = g_eval(gt, t);
        const double E = std::exp(-al * t);
        const double gm = v.g_minus_t, gp1 = v.g_prime_minus_one;

        record("0 < g - t", less(0.0, gm, 0.0));
        const double b1 = (a - 1.0) / al;
        record("g - t < (A - 1)/alpha", less(gm, b1, std::max(gm, b1)));

        const double lo2 = (a - 1.0) * E / a, hi2 = (a - 1.0) * E;
        record("A^-1 (A - 1) e^{-alpha t} < g' - 1", less(lo2, gp1, std::max(lo2, gp1)));
        record("g' - 1 < (A - 1) e^{-alpha t}", less(gp1, hi2, std::max(gp1, hi2)));

        const double rhs3 = (a / al) * std::expm1(al * t) * gp1;
        record("g - t < (A/alpha)(e^{alpha t} - 1)(g' - 1)", less(gm, rhs3, std::max(gm, rhs3)));

        // g'' from differentiating g' = A / (A - (A - 1) e^{-alpha t}) directly
        const double denom = a / v.g_prime;
        const double gpp_direct = -a * (a - 1.0) * al * E / (denom * denom);
        const double gpp_identity = -al * gp1 * v.g_prime;
        record("g'' = -alpha (g' - 1) g'", equal(gpp_direct, gpp_identity, std::max(std::abs(gpp_direct), std::abs(gpp_identity))));

        const double ln_gp = std::log1p(gp1);
        record("0 < ln g'", less(0.0, ln_gp, 0.0));
        record("ln g' < g' - 1", less(ln_gp, gp1, std::max(ln_gp, gp1)));

        const double ln_a = std::log(a);
        record("ln g' = ln A - alpha (g - t)", equal(ln_gp, ln_a - al * gm, std::max(ln_a, al * gm)));
        ++rep.samples;
    }
    rep.failed = std::move(failed);
    rep.pass = rep.violations == 0;
    return rep;
}

double g_derivative_check(const GTransform& gt, std::span<const double> t_samples, double step) {
    double worst = 0.0;
    for (double t : t_samples) {
        if (!(t > step)) throw ArgumentError("g_derivative_check: samples must exceed the step");
        const GValues c = g_eval(gt, t), p = g_eval(gt, t + step), m = g_eval(gt, t - step);
        // differences of the cancellation-free parts: g = t + (g - t), g' = 1 + (g' - 1)
        const double fd_gp = 1.0 + (p.g_minus_t - m.g_minus_t) / (2.0 * step);
        const double fd_gpp = (p.g_prime_minus_one - m.g_prime_minus_one) / (2.0 * step);
        worst = std::max(worst, std::abs(fd_gp - c.g_prime) / std::abs(c.g_prime));
        worst = std::max(worst, std::abs(fd_gpp - c.g_double_prime) / std::abs(c.g_double_prime));
    }
    return worst;
}

ScalarField strict_margin_mu(const GTransform& gt, const ScalarField& v, const VariableExponent& p, double lambda,
                             std::span<const std::size_t> region) {
    gt.validate();
    if (gt.alpha != 2.0 || !(gt.A < 2.0)) throw ArgumentError("strict_margin_mu: requires alpha = 2 and 1 < A < 2");
    const GriddedDomain& dom = v.domain();
    std::vector<std::size_t> nodes(region.begin(), region.end());
    if (nodes.empty()) {
        for (std::size_t k : dom.interior_nodes()) {
            if (v[k] > 0.0) nodes.push_back(k);
        }
    }
    if (nodes.empty()) throw ArgumentError("strict_margin_mu: empty evaluation set");
    for (std::size_t k : nodes) {
        if (!(v[k] > 0.0)) throw ArgumentError("strict_margin_mu: v must be positive on the evaluation set");
    }
    double sup = 0.0;
    for (std::size_t k : nodes) sup = std::max(sup, std::exp(2.0 * v[k]) * p.grad_ln_p(dom.coord(k)).norm());
    if (!(sup < lambda)) {
        std::ostringstream os;
        os << "strict_margin_mu: ||e^{2v} grad ln p||_inf = " << sup << " is not below lambda = " << lambda;
        throw PreconditionError(os.str());
    }
    const std::vector<Vec2> grad = gradient(v);
    ScalarField mu(v.domain_ptr());
    const double factor = (gt.A - 1.0) / gt.A;
    for (std::size_t k : nodes) {
        const double gw = g_eval(gt, v[k]).g_prime * grad[k].norm();
        mu[k] = factor * gw * gw * gw * std::exp(-2.0 * v[k]) * (lambda - sup);
    }
    return mu;
}

bool comparison_condition(const ScalarField& u2, double m2, const VariableExponent& p, double lambda,
                          std::span<const std::size_t> region) {
    if (!(m2 > 0.0)) throw ArgumentError("comparison_condition: m2 must be positive");
    const GriddedDomain& dom = u2.domain();
    double sup = 0.0;
    for (std::size_t k : region) {
        if (u2[k] < m2 * (1.0 - 1e-14)) throw ArgumentError("comparison_condition: u2 drops below m2 on the region");
        const double ratio = u2[k] / m2;
        sup = std::max(sup, ratio * ratio * p.grad_ln_p(dom.coord(k)).norm());
    }
    return 3.0 * sup <= lambda;
}

std::vector<std::size_t> box_nodes(const GriddedDomain& dom, std::size_t center, int r) {
    std::vector<std::size_t> nodes;
    const int ry = dom.dim() == 2 ? r : 0;
    for (int dy = -ry; dy <= ry; ++dy) {
        for (int dx = -r; dx <= r; ++dx) {
            const auto q = dom.neighbor(center, dx, dy);
            if (!q) return {};
            nodes.push_back(*q);
        }
    }
    return nodes;
}

UniquenessRadius local_uniqueness_radius(const ScalarField& u, const VariableExponent& p, double lambda,
                                         std::size_t center) {
    if (!(u[center] > 0.0)) throw ArgumentError("local_uniqueness_radius: u must be positive at the center");
    const GriddedDomain& dom = u.domain();
    UniquenessRadius out;
    const int rmax = std::max(dom.nx(), dom.ny());
    for (int r = 0; r <= rmax; ++r) {
        const std::vector<std::size_t> nodes = box_nodes(dom, center, r);
        if (nodes.empty()) break;
        const bool usable = std::all_of(nodes.begin(), nodes.end(), [&](std::size_t k) {
            return dom.kind(k) == NodeKind::Interior && u[k] > 0.0;
        });
        if (!usable) break;
        double m2 = INFINITY;
        for (std::size_t k : nodes) m2 = std::min(m2, u[k]);
        if (!comparison_condition(u, m2, p, lambda, nodes)) break;
        if (r == 0) out.holds_at_center = true;
        out.half_width = r;
        out.radius = r * dom.h();
    }
    return out;
}

}  // namespace pxeig
