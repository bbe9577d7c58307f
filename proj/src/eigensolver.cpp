#include "pxeig/eigensolver.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "pxeig/errors.hpp"
#include "pxeig/luxemburg_norms.hpp"

namespace pxeig {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

constexpr double kArmijo = 1e-4;
constexpr int kMaxBacktracks = 60;
// Element weights of the metric are kept above this fraction of the largest one.
constexpr double kMetricFloor = 1e-8;

// |x|^{q} with the convention 0^q = 0 for q > 0.
double signed_power_factor(double mag, double q) {
    if (mag == 0.0) return 0.0;
    return std::exp(q * std::log(mag));
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/**
 * Discrete problem data shared by the descent loops: exponent samples at nodes
 * and element centres, the interior numbering and the metric sparsity pattern.
 */
class Discretization {
public:
    Discretization(DomainPtr dom, const VariableExponent& p) : dom_(std::move(dom)) {
        const GriddedDomain& d = *dom_;
        p_node_.assign(d.node_count(), 0.0);
        for (std::size_t k : d.active_nodes()) p_node_[k] = p.eval(d.coord(k));
        for (const Element& e : d.elements()) p_elem_.push_back(p.eval(e.center));
        unknown_.assign(d.node_count(), -1);
        for (std::size_t k : d.interior_nodes()) {
            unknown_[k] = static_cast<int>(nodes_.size());
            nodes_.push_back(k);
        }
        if (nodes_.empty()) throw DegenerateDomainError("eigensolver: domain has no interior nodes");
    }

    const GriddedDomain& domain() const { return *dom_; }
    const DomainPtr& domain_ptr() const { return dom_; }
    std::size_t unknowns() const { return nodes_.size(); }
    std::size_t node(std::size_t i) const { return nodes_[i]; }
    int unknown(std::size_t k) const { return unknown_[k]; }
    double p_node(std::size_t k) const { return p_node_[k]; }
    double p_elem(std::size_t e) const { return p_elem_[e]; }

    // Assemble sum_e c_e B_e^T B_e over interior unknowns.
    SpMat stiffness(const std::vector<double>& c) const {
        std::vector<Eigen::Triplet<double>> trip;
        const auto& elems = dom_->elements();
        trip.reserve(elems.size() * 9);
        for (std::size_t e = 0; e < elems.size(); ++e) {
            const Element& el = elems[e];
            for (int a = 0; a < el.size; ++a) {
                const int ia = unknown_[el.node[a]];
                if (ia < 0) continue;
                for (int b = 0; b < el.size; ++b) {
                    const int ib = unknown_[el.node[b]];
                    if (ib < 0) continue;
                    trip.emplace_back(ia, ib, c[e] * el.coef[a].dot(el.coef[b]));
                }
            }
        }
        SpMat m(static_cast<Eigen::Index>(nodes_.size()), static_cast<Eigen::Index>(nodes_.size()));
        m.setFromTriplets(trip.begin(), trip.end());
        return m;
    }

private:
    DomainPtr dom_;
    std::vector<double> p_node_;
    std::vector<double> p_elem_;
    std::vector<int> unknown_;
    std::vector<std::size_t> nodes_;
};

// Quantities of the Luxemburg quotient at one field.
struct QuotientState {
    std::vector<double> u;  // full nodal vector
    std::vector<Vec2> g;    // element gradients
    double K = 0.0;
    double k = 0.0;
    double DK = 0.0;  // int |grad u / K|^p dx
    double Dk = 0.0;  // int |u / k|^p dx
    double Q = INFINITY;
    bool valid = false;
};

QuotientState evaluate_quotient(const Discretization& disc, std::vector<double> u) {
    const GriddedDomain& dom = disc.domain();
    QuotientState s;
    s.u = std::move(u);
    const auto& elems = dom.elements();
    s.g.resize(elems.size());
    PowerSamples grad_samples, node_samples;
    for (std::size_t e = 0; e < elems.size(); ++e) {
        const Element& el = elems[e];
        Vec2 acc;
        for (int a = 0; a < el.size; ++a) acc = acc + s.u[el.node[a]] * el.coef[a];
        s.g[e] = acc;
        grad_samples.add(acc.norm(), el.weight, disc.p_elem(e));
    }
    for (std::size_t k : dom.active_nodes()) node_samples.add(s.u[k], dom.weight(k), disc.p_node(k));
    if (node_samples.empty() || grad_samples.empty()) return s;
    const double logK = grad_samples.solve_log_gamma(WeightMode::OneOverP, 0.0);
    const double logk = node_samples.solve_log_gamma(WeightMode::OneOverP, 0.0);
    s.K = std::exp(logK);
    s.k = std::exp(logk);
    s.DK = std::exp(grad_samples.log_modular(WeightMode::Plain, logK));
    s.Dk = std::exp(node_samples.log_modular(WeightMode::Plain, logk));
    s.Q = s.K / s.k;
    s.valid = std::isfinite(s.Q) && s.Q > 0.0;
    return s;
}

// Per-unknown rows A_i = int |grad u/K|^{p-2} <grad u/K, grad eta_i>, B_i = int |u/k|^{p-2} (u/k) eta_i.
struct WeakRows {
    Vec A;
    Vec B;
};

WeakRows weak_rows(const Discretization& disc, const QuotientState& s) {
    const GriddedDomain& dom = disc.domain();
    const auto& elems = dom.elements();
    WeakRows r{Vec::Zero(static_cast<Eigen::Index>(disc.unknowns())), Vec::Zero(static_cast<Eigen::Index>(disc.unknowns()))};
    for (std::size_t e = 0; e < elems.size(); ++e) {
        const Element& el = elems[e];
        const Vec2 x = (1.0 / s.K) * s.g[e];
        const double f = el.weight * signed_power_factor(x.norm(), disc.p_elem(e) - 2.0);
        if (f == 0.0) continue;
        for (int a = 0; a < el.size; ++a) {
            const int ia = disc.unknown(el.node[a]);
            if (ia >= 0) r.A[ia] += f * x.dot(el.coef[a]);
        }
    }
    for (std::size_t i = 0; i < disc.unknowns(); ++i) {
        const std::size_t k = disc.node(i);
        const double y = s.u[k] / s.k;
        r.B[static_cast<Eigen::Index>(i)] =
            dom.weight(k) * signed_power_factor(std::abs(y), disc.p_node(k) - 1.0) * (y < 0 ? -1.0 : 1.0);
    }
    return r;
}

// d Q / d u_i = Q (K'/K - k'/k) for every interior unknown.
Vec quotient_gradient(const Discretization& disc, const QuotientState& s) {
    const WeakRows r = weak_rows(disc, s);
    return s.Q * (r.A / (s.K * s.DK) - r.B / (s.k * s.Dk));
}

// Hessian model of K / k: sum_e w_e (p_e - 1) |grad u/K|^{p_e-2} B_e^T B_e / (K DK k).
std::vector<double> metric_weights(const Discretization& disc, const QuotientState& s) {
    const auto& elems = disc.domain().elements();
    std::vector<double> c(elems.size());
    double cmax = 0.0;
    for (std::size_t e = 0; e < elems.size(); ++e) {
        const double pe = disc.p_elem(e);
        double mag = s.g[e].norm() / s.K;
        if (pe < 2.0) mag = std::max(mag, 1e-3);
        c[e] = elems[e].weight * (pe - 1.0) * signed_power_factor(mag, pe - 2.0) / (s.K * s.DK * s.k);
        cmax = std::max(cmax, c[e]);
    }
    const double floor = kMetricFloor * cmax;
    for (double& v : c) v = std::max(v, floor);
    return c;
}

std::vector<double> initial_field(const Discretization& disc, const SolverOptions& opts, int restart) {
    const GriddedDomain& dom = disc.domain();
    const ScalarField delta = distance_function(disc.domain_ptr());
    std::vector<double> u(dom.node_count(), 0.0);
    if (restart == 0 && opts.initialization == Initialization::Provided) {
        if (!opts.initial) throw ArgumentError("solver: provided initialization without a field");
        if (!(opts.initial->domain() == dom)) throw ArgumentError("solver: initial field lives on another domain");
        for (std::size_t i = 0; i < disc.unknowns(); ++i) {
            const std::size_t k = disc.node(i);
            u[k] = std::max((*opts.initial)[k], 0.0);
        }
        bool any = std::any_of(u.begin(), u.end(), [](double v) { return v > 0.0; });
        if (any) return u;
        // fall through to the distance function for an all-zero guess
    }
    if (restart == 0 && opts.initialization != Initialization::Random) {
        for (std::size_t i = 0; i < disc.unknowns(); ++i) u[disc.node(i)] = delta[disc.node(i)];
        return u;
    }
    std::mt19937_64 rng(opts.rng_seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(restart) + 1);
    for (std::size_t i = 0; i < disc.unknowns(); ++i) {
        const std::size_t k = disc.node(i);
        u[k] = delta[k] * (0.25 + uniform01(rng));
    }
    return u;
}

std::vector<double> scaled(std::vector<double> u, double s) {
    for (double& v : u) v *= s;
    return u;
}

struct RunResult {
    QuotientState state;
    std::vector<double> history;
    int iterations = 0;
    bool converged = false;
};

RunResult descend(const Discretization& disc, std::vector<double> u0, const SolverOptions& opts) {
    RunResult run;
    QuotientState s = evaluate_quotient(disc, std::move(u0));
    if (!s.valid) throw ArgumentError("minimize_rayleigh: initial field is zero");
    s.u = scaled(std::move(s.u), 1.0 / s.k);
    for (Vec2& g : s.g) g = (1.0 / s.k) * g;
    s.K = s.Q;
    s.k = 1.0;
    run.history.push_back(s.Q);

    Eigen::SimplicialLDLT<SpMat> ldlt;
    bool analyzed = false;
    for (int it = 1; it <= opts.max_iterations; ++it) {
        const Vec grad = quotient_gradient(disc, s);
        const SpMat metric = disc.stiffness(metric_weights(disc, s));
        if (!analyzed) {
            ldlt.analyzePattern(metric);
            analyzed = true;
        }
        ldlt.factorize(metric);
        if (ldlt.info() != Eigen::Success) break;
        const Vec dir = -ldlt.solve(grad);
        const double decrement = -grad.dot(dir);
        if (!(decrement > 0.0) || decrement <= 1e-3 * opts.tolerance * s.Q) {
            run.converged = decrement <= opts.tolerance * s.Q;
            break;
        }

        bool accepted = false;
        double t = 1.0;
        QuotientState trial;
        for (int bt = 0; bt < kMaxBacktracks; ++bt, t *= 0.5) {
            std::vector<double> v = s.u;
            double predicted = 0.0;
            for (std::size_t i = 0; i < disc.unknowns(); ++i) {
                const std::size_t k = disc.node(i);
                const double next = std::max(s.u[k] + t * dir[static_cast<Eigen::Index>(i)], 0.0);
                predicted += grad[static_cast<Eigen::Index>(i)] * (next - s.u[k]);
                v[k] = next;
            }
            trial = evaluate_quotient(disc, std::move(v));
            if (trial.valid && trial.Q <= s.Q + kArmijo * predicted) {
                accepted = true;
                break;
            }
        }
        run.iterations = it;
        if (!accepted) {
            run.converged = decrement <= opts.tolerance * s.Q;
            break;
        }
        const double rel_change = (s.Q - trial.Q) / trial.Q;
        trial.u = scaled(std::move(trial.u), 1.0 / trial.k);
        for (Vec2& g : trial.g) g = (1.0 / trial.k) * g;
        trial.K = trial.Q;
        trial.k = 1.0;
        s = std::move(trial);
        run.history.push_back(s.Q);
        if (rel_change < opts.tolerance && decrement <= 1e2 * opts.tolerance * s.Q) {
            run.converged = true;
            break;
        }
    }
    run.state = std::move(s);
    return run;
}

}  // namespace

void SolverOptions::validate() const {
    if (!(tolerance > 0.0)) throw ArgumentError("solver.tolerance must be positive");
    if (max_iterations < 1) throw ArgumentError("solver.max_iterations must be at least 1");
    if (restarts < 1) throw ArgumentError("solver.restarts must be at least 1");
}

ElConstants constants_KkS(const ScalarField& u, const VariableExponent& p) {
    if (u.is_zero()) throw ArgumentError("constants_KkS: u is identically zero");
    const PowerSamples gs = gradient_samples(u, p);
    const PowerSamples ns = nodal_samples(u, p);
    if (gs.empty()) throw ArgumentError("constants_KkS: grad u is identically zero");
    const double logK = gs.solve_log_gamma(WeightMode::OneOverP, 0.0);
    const double logk = ns.solve_log_gamma(WeightMode::OneOverP, 0.0);
    const double num = gs.log_modular(WeightMode::Plain, logK);
    const double den = ns.log_modular(WeightMode::Plain, logk);
    return {std::exp(logK), std::exp(logk), std::exp(num - den)};
}

EigenSolution minimize_rayleigh(const DomainPtr& dom, const VariableExponent& p, const SolverOptions& opts) {
    opts.validate();
    const Discretization disc(dom, p);
    std::optional<RunResult> best;
    for (int r = 0; r < opts.restarts; ++r) {
        RunResult run = descend(disc, initial_field(disc, opts, r), opts);
        if (!best) {
            best = std::move(run);
            continue;
        }
        const double q_best = best->state.Q, q_run = run.state.Q;
        const bool tie = std::abs(q_run - q_best) <= opts.tolerance * q_best;
        if ((!tie && q_run < q_best) || (tie && run.iterations < best->iterations)) best = std::move(run);
    }

    EigenSolution sol;
    sol.u = ScalarField(dom, best->state.u);
    const ElConstants c = constants_KkS(sol.u, p);
    sol.K = c.K;
    sol.k = c.k;
    sol.S = c.S;
    sol.lambda = c.K / c.k;
    sol.iterations = best->iterations;
    sol.converged = best->converged;
    sol.history = std::move(best->history);
    sol.weak_residual = el_weak_residual(sol.u, p);
    return sol;
}

double el_weak_residual(const ScalarField& u, const VariableExponent& p, std::optional<double> lambda) {
    if (u.is_zero()) throw ArgumentError("el_weak_residual: u is identically zero");
    const Discretization disc(u.domain_ptr(), p);
    const QuotientState s = evaluate_quotient(disc, std::vector<double>(u.values().begin(), u.values().end()));
    if (!s.valid) throw ArgumentError("el_weak_residual: degenerate field");
    const WeakRows r = weak_rows(disc, s);
    const double S = s.DK / s.Dk;
    const double lam = lambda.value_or(s.K / s.k);
    const Vec residual = r.A - lam * S * r.B;
    const double scale = (r.A.cwiseAbs() + lam * S * r.B.cwiseAbs()).maxCoeff();
    if (!(scale > 0.0)) return 0.0;
    return residual.cwiseAbs().maxCoeff() / scale;
}

double el_weak_residual(const EigenSolution& sol, const VariableExponent& p) { return el_weak_residual(sol.u, p); }

// ---------------------------------------------------------------------------

namespace {

struct ModularState {
    std::vector<double> v;
    std::vector<Vec2> g;
    double logN = 0.0;  // ln int |grad v|^p dx
    double logM = 0.0;  // ln int |v|^p dx
    bool valid = false;
};

ModularState evaluate_modular(const Discretization& disc, std::vector<double> v) {
    const GriddedDomain& dom = disc.domain();
    ModularState s;
    s.v = std::move(v);
    const auto& elems = dom.elements();
    s.g.resize(elems.size());
    PowerSamples gs, ns;
    for (std::size_t e = 0; e < elems.size(); ++e) {
        const Element& el = elems[e];
        Vec2 acc;
        for (int a = 0; a < el.size; ++a) acc = acc + s.v[el.node[a]] * el.coef[a];
        s.g[e] = acc;
        gs.add(acc.norm(), el.weight, disc.p_elem(e));
    }
    for (std::size_t k : dom.active_nodes()) ns.add(s.v[k], dom.weight(k), disc.p_node(k));
    if (gs.empty() || ns.empty()) return s;
    s.logN = gs.log_modular(WeightMode::Plain, 0.0);
    s.logM = ns.log_modular(WeightMode::Plain, 0.0);
    s.valid = std::isfinite(s.logN) && std::isfinite(s.logM);
    return s;
}

// Rescale v onto int |v|^p dx = C.
std::vector<double> project_to_constraint(const Discretization& disc, std::vector<double> v, double logC) {
    const GriddedDomain& dom = disc.domain();
    PowerSamples ns;
    for (std::size_t k : dom.active_nodes()) ns.add(v[k], dom.weight(k), disc.p_node(k));
    if (ns.empty()) throw ArgumentError("minimize_modular_constrained: field collapsed to zero");
    const double log_gamma = ns.solve_log_gamma(WeightMode::Plain, logC);
    return scaled(std::move(v), std::exp(-log_gamma));
}

}  // namespace

ModularSolution minimize_modular_constrained(const DomainPtr& dom, const VariableExponent& p, double C,
                                             const SolverOptions& opts) {
    opts.validate();
    if (!(C > 0.0) || !std::isfinite(C)) throw ArgumentError("minimize_modular_constrained: C must be positive and finite");
    const double logC = std::log(C);
    if (std::abs(logC) > 600.0) throw ArgumentError("minimize_modular_constrained: constraint level outside the overflow-safe range");
    const Discretization disc(dom, p);
    const GriddedDomain& d = *dom;

    ModularState s = evaluate_modular(disc, project_to_constraint(disc, initial_field(disc, opts, 0), logC));
    if (!s.valid) throw ArgumentError("minimize_modular_constrained: degenerate initial field");

    ModularSolution out;
    Eigen::SimplicialLDLT<SpMat> ldlt;
    bool analyzed = false;
    const auto& elems = d.elements();
    for (int it = 1; it <= opts.max_iterations; ++it) {
        // gradients of ln N and ln M
        Vec gN = Vec::Zero(static_cast<Eigen::Index>(disc.unknowns()));
        Vec gM = Vec::Zero(static_cast<Eigen::Index>(disc.unknowns()));
        std::vector<double> c(elems.size());
        double cmax = 0.0;
        for (std::size_t e = 0; e < elems.size(); ++e) {
            const Element& el = elems[e];
            const double pe = disc.p_elem(e);
            const double mag = s.g[e].norm();
            double f = 0.0;
            if (mag > 0.0) f = pe * std::exp(std::log(el.weight) + (pe - 2.0) * std::log(mag) - s.logN);
            for (int a = 0; a < el.size; ++a) {
                const int ia = disc.unknown(el.node[a]);
                if (ia >= 0) gN[ia] += f * s.g[e].dot(el.coef[a]);
            }
            const double mag_m = pe < 2.0 ? std::max(mag, 1e-12) : mag;
            c[e] = mag_m > 0.0 ? (pe - 1.0) * pe * std::exp(std::log(el.weight) + (pe - 2.0) * std::log(mag_m) - s.logN) : 0.0;
            cmax = std::max(cmax, c[e]);
        }
        for (double& v : c) v = std::max(v, kMetricFloor * cmax);
        for (std::size_t i = 0; i < disc.unknowns(); ++i) {
            const std::size_t k = disc.node(i);
            const double vk = s.v[k];
            if (vk != 0.0) {
                const double pk = disc.p_node(k);
                gM[static_cast<Eigen::Index>(i)] =
                    pk * std::exp(std::log(d.weight(k)) + (pk - 1.0) * std::log(std::abs(vk)) - s.logM) * (vk < 0 ? -1.0 : 1.0);
            }
        }
        const SpMat metric = disc.stiffness(c);
        if (!analyzed) {
            ldlt.analyzePattern(metric);
            analyzed = true;
        }
        ldlt.factorize(metric);
        if (ldlt.info() != Eigen::Success) break;
        const Vec pN = ldlt.solve(gN);
        const Vec pM = ldlt.solve(gM);
        const double mu = pN.dot(gM) / pM.dot(gM);
        const Vec lagrange = gN - mu * gM;
        const Vec dir = -(pN - mu * pM);
        const double decrement = -lagrange.dot(dir);
        out.iterations = it;
        if (!(decrement > 0.0) || decrement <= 1e-3 * opts.tolerance) {
            out.converged = !(decrement > opts.tolerance);
            break;
        }
        bool accepted = false;
        double t = 1.0;
        ModularState trial;
        for (int bt = 0; bt < kMaxBacktracks; ++bt, t *= 0.5) {
            std::vector<double> v = s.v;
            for (std::size_t i = 0; i < disc.unknowns(); ++i) {
                const std::size_t k = disc.node(i);
                v[k] = std::max(s.v[k] + t * dir[static_cast<Eigen::Index>(i)], 0.0);
            }
            if (std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; })) continue;
            trial = evaluate_modular(disc, project_to_constraint(disc, std::move(v), logC));
            if (trial.valid && trial.logN <= s.logN - kArmijo * t * decrement) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            out.converged = decrement <= opts.tolerance;
            break;
        }
        const double rel_change = std::expm1(s.logN - trial.logN);
        s = std::move(trial);
        if (rel_change < opts.tolerance && decrement <= 1e2 * opts.tolerance) {
            out.converged = true;
            break;
        }
    }
    out.v = ScalarField(dom, s.v);
    out.lambda_modular = std::exp(s.logN - s.logM);
    return out;
}

// ---------------------------------------------------------------------------

PositivityReport strict_positivity_check(const ScalarField& u) {
    PositivityReport r;
    r.min_interior = INFINITY;
    for (std::size_t k : u.domain().interior_nodes()) {
        if (u[k] < r.min_interior) {
            r.min_interior = u[k];
            r.argmin = k;
        }
    }
    if (!std::isfinite(r.min_interior)) r.min_interior = 0.0;
    r.has_interior_zero = !(r.min_interior > 0.0);
    return r;
}

PositivityReport strict_positivity_check(const EigenSolution& sol) { return strict_positivity_check(sol.u); }

}  // namespace pxeig
