#include "pxeig/oned_analytic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pxeig/errors.hpp"
#include "pxeig/infinity_limit.hpp"

namespace pxeig {

namespace {

class Profile {
public:
    Profile(const VariableExponent& p, double A, int n) : p_(p), A_(A), n_(n), m_(n * kFineGridFactor) {
        if (p.dim() != 1) throw ArgumentError("oned_analytic: exponent must be one-dimensional");
        if (!p.box().contains(Point{0.0, 0.0}) || !p.box().contains(Point{1.0, 0.0}))
            throw ArgumentError("oned_analytic: exponent box must contain [0, 1]");
        if (n < 2) throw ArgumentError("oned_analytic: need at least 2 cells");
        if (!std::isfinite(A)) throw ArgumentError("oned_analytic: A must be finite");
        c_ = A >= 0.0 ? A / p.p_minus() : A / p.p_plus();
        hf_ = 1.0 / m_;
        cum_.assign(m_ + 1, 0.0);
        for (int i = 0; i < m_; ++i) cum_[i + 1] = cum_[i] + integral(i * hf_, (i + 1) * hf_);
        find_x0();
    }

    double f(double t) const { return std::exp(A_ / p_.eval(Point{t, 0.0}) - c_); }

    // int_0^x of the scaled integrand
    double F(double x) const {
        const int i = std::clamp(static_cast<int>(x / hf_), 0, m_ - 1);
        return cum_[i] + integral(i * hf_, x);
    }

    double total() const { return cum_[m_]; }
    double x0() const { return x0_; }
    double c() const { return c_; }
    int fine() const { return m_; }
    double fine_x(int i) const { return i == m_ ? 1.0 : i * hf_; }
    double fine_F(int i) const { return cum_[i]; }

    double v_at(double x, double Fx) const { return x <= x0_ ? Fx : total() - Fx; }

private:
    double integral(double a, double b) const {
        if (b <= a) return 0.0;
        const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
        const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        return simpson(a, b, fa, fm, fb, whole, kQuadratureTolerance * (b - a), 0);
    }

    double simpson(double a, double b, double fa, double fm, double fb, double whole, double tol, int depth) const {
        const double m = 0.5 * (a + b);
        const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
        const double flm = f(lm), frm = f(rm);
        const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        const double diff = left + right - whole;
        if (std::abs(diff) <= 15.0 * tol || b - a < 1e-15) return left + right + diff / 15.0;
        if (depth >= 50) throw DataError("oned_analytic: adaptive quadrature did not converge");
        return simpson(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
               simpson(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
    }

    // 2 F(x) - F(1) is strictly increasing: locate the fine cell, then bisect inside it.
    void find_x0() {
        const double T = total();
        int i = 0;
        while (i < m_ && 2.0 * cum_[i + 1] < T) ++i;
        double lo = i * hf_, hi = fine_x(i + 1);
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            if (2.0 * F(mid) < T) lo = mid;
            else hi = mid;
        }
        const double rlo = std::abs(2.0 * F(lo) - T), rhi = std::abs(2.0 * F(hi) - T);
        x0_ = rlo <= rhi ? lo : hi;
    }

    const VariableExponent& p_;
    double A_;
    int n_, m_;
    double c_ = 0.0, hf_ = 0.0, x0_ = 0.5;
    std::vector<double> cum_;
};

}  // namespace

OneDSolution analytic_modular_solution(const VariableExponent& p, double A, int n) {
    const Profile prof(p, A, n);
    OneDSolution s;
    s.A = A;
    s.x0 = prof.x0();
    s.log_scale = prof.c();
    const double Fx0 = prof.F(s.x0);
    const double right = prof.total() - Fx0;
    s.v_x0 = Fx0;
    s.continuity_residual = std::abs(Fx0 - right);
    const double slope = prof.f(s.x0);
    s.lambda = slope / Fx0;
    s.lambda_right = slope / right;

    auto dom = GriddedDomain::interval(0.0, 1.0, n);
    s.v = ScalarField(dom);
    for (int i = 1; i < n; ++i) {
        const int fi = i * kFineGridFactor;
        s.v[static_cast<std::size_t>(i)] = prof.v_at(prof.fine_x(fi), prof.fine_F(fi));
    }

    double margin = INFINITY;
    for (int i = 1; i < prof.fine(); ++i) {
        const double x = prof.fine_x(i);
        if (x == s.x0) continue;
        const double v = prof.v_at(x, prof.fine_F(i));
        margin = std::min(margin, prof.f(x) / v / s.lambda);
    }
    s.condition_margin = margin;
    s.eigenvalue_condition_holds = margin >= 1.0 - 1e-9;
    return s;
}

double log_max_power(const VariableExponent& p, double A, int n) {
    const Profile prof(p, A, n);
    auto value = [&](double x, double Fx) {
        const double v = prof.v_at(x, Fx);
        return p.eval(Point{x, 0.0}) * (std::log(v) + prof.c());
    };
    double best = value(prof.x0(), prof.F(prof.x0()));
    for (int i = 1; i < prof.fine(); ++i) best = std::max(best, value(prof.fine_x(i), prof.fine_F(i)));
    return best;
}

std::vector<FamilyRow> eigenvalue_family(const VariableExponent& p, const std::vector<double>& c_list, int n) {
    for (double C : c_list) {
        if (!(C > 0.0) || !std::isfinite(C)) throw ArgumentError("eigenvalue_family: every C must be positive");
    }
    std::vector<FamilyRow> rows;
    for (double C : c_list) {
        FamilyRow row;
        row.C = C;
        const double target = std::log(C);
        auto F = [&](double A) { return log_max_power(p, A, n) - target; };
        double lo = -1.0, hi = 1.0;
        double flo = F(lo), fhi = F(hi);
        while (fhi < 0.0 && hi <= kMaxFamilyA) {
            lo = hi;
            flo = fhi;
            hi *= 2.0;
            fhi = F(hi);
        }
        while (flo > 0.0 && lo >= -kMaxFamilyA) {
            hi = lo;
            fhi = flo;
            lo *= 2.0;
            flo = F(lo);
        }
        if (fhi < 0.0 || flo > 0.0) {
            std::ostringstream os;
            os << "A bracket exhausted at |A| = " << kMaxFamilyA;
            row.error = os.str();
            rows.push_back(row);
            continue;
        }
        for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, std::abs(lo)); ++it) {
            const double mid = 0.5 * (lo + hi);
            if (F(mid) < 0.0) lo = mid;
            else hi = mid;
        }
        row.A = 0.5 * (lo + hi);
        const OneDSolution s = analytic_modular_solution(p, row.A, n);
        row.lambda = s.lambda;
        row.x0 = s.x0;
        row.ok = true;
        rows.push_back(row);
    }
    return rows;
}

RigidityReport luxemburg_rigidity_check(const VariableExponent& p, const std::optional<ScalarField>& limit_field,
                                        int n) {
    RigidityReport rep;
    const OneDSolution base = analytic_modular_solution(p, 0.0, n);
    rep.x0 = base.x0;
    rep.lambda = 1.0 / base.x0;

    const ScalarField delta = distance_function(base.v.domain_ptr());
    for (std::size_t k = 0; k < delta.size(); ++k) rep.delta_error = std::max(rep.delta_error, std::abs(base.v[k] - delta[k]));

    // Any positive A keeps the slope e^{-A/p} below 1, so ||v'||_inf = 1 is impossible.
    rep.exclusion_holds = true;
    const int m = n * kFineGridFactor;
    for (double A : {1e-6, 1e-3, 1e-1, 1.0, 10.0, 100.0}) {
        SlopeProbe pr;
        pr.A = A;
        for (int i = 0; i <= m; ++i) {
            const double x = i == m ? 1.0 : static_cast<double>(i) / m;
            pr.sup_slope = std::max(pr.sup_slope, std::exp(-A / p.eval(Point{x, 0.0})));
        }
        pr.lambda_ratio = std::exp(-A / p.eval(Point{base.x0, 0.0}));
        if (!(pr.sup_slope < 1.0) || !(pr.lambda_ratio < 1.0)) rep.exclusion_holds = false;
        rep.probes.push_back(pr);
    }
    rep.forced_A = 0.0;
    rep.unique = rep.exclusion_holds && std::abs(rep.lambda - 2.0) < 1e-9 && rep.delta_error < 1e-12;

    if (limit_field) {
        const ScalarField v = gradient_normalized(*limit_field);
        const ScalarField d = distance_function(limit_field->domain_ptr());
        double err = 0.0;
        for (std::size_t k : d.domain().active_nodes()) err = std::max(err, std::abs(v[k] - d[k]));
        rep.limit_error = err;
        rep.limit_matches = err < kLimitMatchTolerance;
    }
    return rep;
}

}  // namespace pxeig
