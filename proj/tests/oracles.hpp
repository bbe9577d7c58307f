#pragma once

// Reference computations that share no code with the library: brute-force
// quadrature, bisection in long double, and direct finite differences.

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "pxeig/domain_grid.hpp"
#include "pxeig/exponent_field.hpp"

namespace oracle {

struct Term {
    long double a;  // |f| at the sample
    long double w;  // quadrature measure
    long double p;  // exponent
};

// ln sum w |a/gamma|^p (/p), by direct long-double summation after a max shift.
inline long double log_modular(const std::vector<Term>& terms, long double log_gamma, bool over_p) {
    std::vector<long double> logs;
    long double m = -INFINITY;
    for (const Term& t : terms) {
        if (t.a == 0.0L) continue;
        long double l = t.p * (std::log(t.a) - log_gamma) + std::log(t.w);
        if (over_p) l -= std::log(t.p);
        logs.push_back(l);
        if (l > m) m = l;
    }
    if (logs.empty()) return -INFINITY;
    long double s = 0.0L;
    for (long double l : logs) s += std::exp(l - m);
    return m + std::log(s);
}

// Luxemburg norm by plain bisection on ln gamma (400 halvings).
inline double luxemburg(const std::vector<Term>& terms, bool over_p = true) {
    long double amax = 0.0L;
    for (const Term& t : terms) amax = std::max(amax, t.a);
    if (amax == 0.0L) return 0.0;
    long double lo = std::log(amax) - 1.0L, hi = std::log(amax) + 1.0L;
    while (log_modular(terms, lo, over_p) < 0.0L) lo -= 1.0L;
    while (log_modular(terms, hi, over_p) > 0.0L) hi += 1.0L;
    for (int i = 0; i < 400; ++i) {
        const long double mid = 0.5L * (lo + hi);
        if (log_modular(terms, mid, over_p) > 0.0L) lo = mid;
        else hi = mid;
    }
    return static_cast<double>(std::exp(0.5L * (lo + hi)));
}

// Trapezoid weights on a uniform 1-D grid with n cells.
inline std::vector<double> trapezoid_weights_1d(int n, double h) {
    std::vector<double> w(n + 1, h);
    w.front() = w.back() = 0.5 * h;
    return w;
}

// Nodal terms of f on an interval or rectangle, computed from scratch.
inline std::vector<Term> nodal_terms(const pxeig::ScalarField& f, const pxeig::VariableExponent& p) {
    const auto& dom = f.domain();
    std::vector<Term> out;
    const double h = dom.h();
    for (int iy = 0; iy <= (dom.dim() == 2 ? dom.ny() : 0); ++iy) {
        for (int ix = 0; ix <= dom.nx(); ++ix) {
            const std::size_t k = dom.index(ix, iy);
            double w = h;
            if (ix == 0 || ix == dom.nx()) w *= 0.5;
            if (dom.dim() == 2) {
                w *= h;
                if (iy == 0 || iy == dom.ny()) w *= 0.5;
            }
            const pxeig::Point x{dom.box().lo[0] + ix * h, dom.box().lo[1] + iy * h};
            out.push_back({std::abs(static_cast<long double>(f[k])), w, p.eval(x)});
        }
    }
    return out;
}

// Cell-gradient terms on an interval: (u_{i+1} - u_i)/h with p at the cell midpoint.
inline std::vector<Term> gradient_terms_1d(const pxeig::ScalarField& u, const pxeig::VariableExponent& p) {
    const auto& dom = u.domain();
    const double h = dom.h();
    std::vector<Term> out;
    for (int i = 0; i < dom.nx(); ++i) {
        const double g = (u[i + 1] - u[i]) / h;
        out.push_back({std::abs(static_cast<long double>(g)), h, p.eval({dom.box().lo[0] + (i + 0.5) * h, 0.0})});
    }
    return out;
}

inline double sum_power(const std::vector<Term>& terms, double scale) {
    long double s = 0.0L;
    for (const Term& t : terms) s += t.w * std::pow(t.a / scale, t.p);
    return static_cast<double>(s);
}

// Brute-force distance: min over all boundary nodes.
inline double brute_distance(const pxeig::GriddedDomain& dom, std::size_t k) {
    double best = INFINITY;
    for (std::size_t b : dom.boundary_nodes()) best = std::min(best, (dom.coord(k) - dom.coord(b)).norm());
    return best;
}

// Composite Simpson with many panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int panels = 20000) {
    const double h = (b - a) / panels;
    long double s = f(a) + f(b);
    for (int i = 1; i < panels; ++i) s += (i % 2 ? 4.0L : 2.0L) * f(a + i * h);
    return static_cast<double>(s * h / 3.0L);
}

inline double uniform(std::mt19937_64& rng, double a, double b) {
    return std::uniform_real_distribution<double>(a, b)(rng);
}

}  // namespace oracle
