#include "pxeig/luxemburg_norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pxeig/errors.hpp"

namespace pxeig {

void PowerSamples::add(double magnitude, double measure, double exponent) {
    if (!std::isfinite(magnitude)) throw DataError("modular: non-finite value in field");
    const double a = std::abs(magnitude);
    if (a == 0.0 || measure <= 0.0) return;
    a_.push_back(a);
    w_.push_back(measure);
    log_a_.push_back(std::log(a));
    log_w_.push_back(std::log(measure));
    log_p_.push_back(std::log(exponent));
    p_.push_back(exponent);
    p_min_ = std::min(p_min_, exponent);
    p_max_ = std::max(p_max_, exponent);
    log_a_max_ = std::max(log_a_max_, log_a_.back());
}

PowerSamples::Eval PowerSamples::log_modular_with_slope(WeightMode mode, double log_gamma) const {
    if (mode == WeightMode::OneOverBaseP) throw ArgumentError("modular: base-exponent weights need the field overloads");
    if (log_a_.empty()) return {-INFINITY, 0.0};
    const bool over_p = mode == WeightMode::OneOverP;
    double top = -INFINITY;
    for (std::size_t m = 0; m < p_.size(); ++m) {
        const double e = log_w_[m] - (over_p ? log_p_[m] : 0.0) + p_[m] * (log_a_[m] - log_gamma);
        top = std::max(top, e);
    }
    double sum = 0.0, psum = 0.0;
    for (std::size_t m = 0; m < p_.size(); ++m) {
        const double e = log_w_[m] - (over_p ? log_p_[m] : 0.0) + p_[m] * (log_a_[m] - log_gamma);
        const double x = std::exp(e - top);
        sum += x;
        psum += p_[m] * x;
    }
    return {top + std::log(sum), -psum / sum};
}

double PowerSamples::log_modular(WeightMode mode, double log_gamma) const {
    return log_modular_with_slope(mode, log_gamma).value;
}

double PowerSamples::modular(WeightMode mode, double gamma) const {
    if (!(gamma > 0.0)) throw ArgumentError("modular: gamma must be positive");
    if (mode == WeightMode::OneOverBaseP) throw ArgumentError("modular: base-exponent weights need the field overloads");
    if (log_a_.empty()) return 0.0;
    if (p_max_ <= kLogSpaceThreshold) {
        double s = 0.0;
        for (std::size_t m = 0; m < p_.size(); ++m) {
            const double term = w_[m] * std::pow(a_[m] / gamma, p_[m]);
            s += mode == WeightMode::OneOverP ? term / p_[m] : term;
        }
        return s;
    }
    return std::exp(log_modular(mode, std::log(gamma)));
}

double PowerSamples::solve_log_gamma(WeightMode mode, double log_level) const {
    if (log_a_.empty()) throw ArgumentError("modular: cannot normalize the zero function");
    // d/dt log_modular lies in [-p_max, -p_min], which brackets the root exactly.
    const double t0 = log_a_max_;
    const double excess = log_modular(mode, t0) - log_level;
    double lo = t0 + excess / (excess >= 0.0 ? p_max_ : p_min_);
    double hi = t0 + excess / (excess >= 0.0 ? p_min_ : p_max_);
    if (lo > hi) std::swap(lo, hi);

    // log_modular is convex and decreasing in t, so Newton from the left end
    // converges monotonically; bisection guards against rounding at the ends.
    double t = lo;
    for (int it = 0; it < 200; ++it) {
        const Eval ev = log_modular_with_slope(mode, t);
        const double r = ev.value - log_level;
        if (r == 0.0) return t;
        if (r > 0.0) lo = std::max(lo, t); else hi = std::min(hi, t);
        double next = t - r / ev.slope;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        const double step = std::abs(next - t);
        t = next;
        if (step <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t))) break;
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t))) break;
    }
    return t;
}

// ---------------------------------------------------------------------------

PowerSamples nodal_samples(const ScalarField& f, const VariableExponent& p) {
    const GriddedDomain& dom = f.domain();
    PowerSamples s;
    for (std::size_t k : dom.active_nodes()) {
        if (!std::isfinite(f[k])) throw DataError("luxemburg_norm: non-finite nodal value");
        if (f[k] == 0.0) continue;
        s.add(f[k], dom.weight(k), p.eval(dom.coord(k)));
    }
    return s;
}

std::vector<Vec2> element_gradients(const ScalarField& u) {
    const auto& elements = u.domain().elements();
    std::vector<Vec2> g(elements.size());
    for (std::size_t e = 0; e < elements.size(); ++e) {
        const Element& el = elements[e];
        Vec2 acc;
        for (int a = 0; a < el.size; ++a) acc = acc + u[el.node[a]] * el.coef[a];
        g[e] = acc;
    }
    return g;
}

PowerSamples gradient_samples(const ScalarField& u, const VariableExponent& p) {
    const auto& elements = u.domain().elements();
    const std::vector<Vec2> g = element_gradients(u);
    PowerSamples s;
    for (std::size_t e = 0; e < elements.size(); ++e) {
        const double m = g[e].norm();
        if (!std::isfinite(m)) throw DataError("luxemburg_norm: non-finite gradient");
        if (m == 0.0) continue;
        s.add(m, elements[e].weight, p.eval(elements[e].center));
    }
    return s;
}

namespace {

// dx / p of the unscaled exponent is dx / (jp) with the measure multiplied by j.
PowerSamples spec_samples(const ScalarField& f, const ModularSpec& spec, WeightMode& mode) {
    mode = spec.mode;
    if (mode != WeightMode::OneOverBaseP) return nodal_samples(f, spec.exponent);
    mode = WeightMode::OneOverP;
    const GriddedDomain& dom = f.domain();
    const double j = static_cast<double>(spec.exponent.multiplier());
    PowerSamples s;
    for (std::size_t k : dom.active_nodes()) s.add(std::abs(f[k]), j * dom.weight(k), spec.exponent.eval(dom.coord(k)));
    return s;
}

}  // namespace

double modular(const ScalarField& f, const ModularSpec& spec, double gamma) {
    if (!(gamma > 0.0)) throw ArgumentError("modular: gamma must be positive");
    WeightMode mode;
    const PowerSamples s = spec_samples(f, spec, mode);
    return s.modular(mode, gamma);
}

double luxemburg_norm(const PowerSamples& samples, WeightMode mode) {
    if (samples.empty()) return 0.0;
    return std::exp(samples.solve_log_gamma(mode, 0.0));
}

double luxemburg_norm(const ScalarField& f, const ModularSpec& spec) {
    WeightMode mode;
    const PowerSamples s = spec_samples(f, spec, mode);
    return luxemburg_norm(s, mode);
}

double gradient_norm(const ScalarField& u, const VariableExponent& p) {
    return luxemburg_norm(gradient_samples(u, p), WeightMode::OneOverP);
}

double sup_norm(const ScalarField& f) {
    double m = 0.0;
    for (std::size_t k : f.domain().active_nodes()) m = std::max(m, std::abs(f[k]));
    return m;
}

std::vector<NormTableRow> norm_limit_table(const ScalarField& f, const VariableExponent& p,
                                           const std::vector<std::int64_t>& j_list, WeightMode mode) {
    if (j_list.empty()) throw ArgumentError("norm_limit_table: empty j list");
    if (!std::is_sorted(j_list.begin(), j_list.end())) throw ArgumentError("norm_limit_table: j list must be ascending");
    std::vector<NormTableRow> rows;
    rows.reserve(j_list.size());
    for (std::int64_t j : j_list) {
        const ModularSpec spec{scale_exponent(p, j), mode};
        rows.push_back({j, luxemburg_norm(f, spec)});
    }
    return rows;
}

double rayleigh_quotient(const ScalarField& u, const VariableExponent& p) {
    if (u.is_zero()) throw ArgumentError("rayleigh_quotient: u is identically zero");
    const double k = luxemburg_norm(u, ModularSpec{p, WeightMode::OneOverP});
    return gradient_norm(u, p) / k;
}

double modular_rayleigh(const ScalarField& u, const VariableExponent& p) {
    if (u.is_zero()) throw ArgumentError("modular_rayleigh: u is identically zero");
    const double num = gradient_samples(u, p).log_modular(WeightMode::Plain, 0.0);
    const double den = nodal_samples(u, p).log_modular(WeightMode::Plain, 0.0);
    return std::exp(num - den);
}

}  // namespace pxeig
