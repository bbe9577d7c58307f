#include "pxeig/exponent_field.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pxeig/errors.hpp"

namespace pxeig {

namespace {

void check_box(const Box& box) {
    if (box.dim != 1 && box.dim != 2) throw ArgumentError("exponent: dimension must be 1 or 2");
    for (int a = 0; a < box.dim; ++a) {
        if (!(box.hi[a] > box.lo[a]) || !std::isfinite(box.lo[a]) || !std::isfinite(box.hi[a])) {
            throw ArgumentError("exponent: empty or non-finite bounding box");
        }
    }
}

// Locate x in a uniform 1-D lattice with n cells; returns cell index and local coordinate in [0, 1].
std::pair<int, double> locate(double x, double lo, double hi, int n) {
    const double s = (x - lo) / (hi - lo) * n;
    int i = static_cast<int>(std::floor(s));
    i = std::clamp(i, 0, n - 1);
    return {i, std::clamp(s - i, 0.0, 1.0)};
}

}  // namespace

VariableExponent VariableExponent::constant(double value, const Box& box) {
    check_box(box);
    VariableExponent e;
    e.kind_ = Kind::Constant;
    e.box_ = box;
    e.coeffs_ = {value};
    e.finalize();
    return e;
}

VariableExponent VariableExponent::affine(std::vector<double> coeffs, const Box& box) {
    check_box(box);
    if (coeffs.empty() || coeffs.size() > 3) throw ArgumentError("exponent: affine needs 1 to 3 coefficients");
    if (box.dim == 1 && coeffs.size() == 3 && coeffs[2] != 0.0) {
        throw ArgumentError("exponent: y coefficient given for a 1-D exponent");
    }
    coeffs.resize(3, 0.0);
    VariableExponent e;
    e.kind_ = Kind::Affine;
    e.box_ = box;
    e.coeffs_ = std::move(coeffs);
    e.finalize();
    return e;
}

VariableExponent VariableExponent::sampled(const Box& box, int nx, int ny, std::vector<double> samples) {
    check_box(box);
    if (nx < 1 || (box.dim == 2 && ny < 1) || (box.dim == 1 && ny != 0)) {
        throw ArgumentError("exponent: sampled grid needs at least one cell per axis");
    }
    const std::size_t expected = static_cast<std::size_t>(nx + 1) * static_cast<std::size_t>(ny + 1);
    if (samples.size() != expected) {
        std::ostringstream os;
        os << "exponent: expected " << expected << " samples, got " << samples.size();
        throw ArgumentError(os.str());
    }
    VariableExponent e;
    e.kind_ = Kind::Sampled;
    e.box_ = box;
    e.nx_ = nx;
    e.ny_ = ny;
    e.samples_ = std::move(samples);
    e.finalize();
    return e;
}

void VariableExponent::finalize() {
    switch (kind_) {
    case Kind::Constant:
        base_min_ = base_max_ = coeffs_[0];
        base_lipschitz_ = 0.0;
        break;
    case Kind::Affine: {
        base_min_ = INFINITY;
        base_max_ = -INFINITY;
        const int ncorner = box_.dim == 2 ? 4 : 2;
        for (int c = 0; c < ncorner; ++c) {
            const Point corner{(c & 1) ? box_.hi[0] : box_.lo[0], (c & 2) ? box_.hi[1] : box_.lo[1]};
            const double v = coeffs_[0] + coeffs_[1] * corner.x + coeffs_[2] * corner.y;
            base_min_ = std::min(base_min_, v);
            base_max_ = std::max(base_max_, v);
        }
        base_lipschitz_ = std::hypot(coeffs_[1], coeffs_[2]);
        break;
    }
    case Kind::Sampled: {
        const auto [mn, mx] = std::minmax_element(samples_.begin(), samples_.end());
        base_min_ = *mn;
        base_max_ = *mx;
        const double hx = box_.extent(0) / nx_;
        const double hy = box_.dim == 2 ? box_.extent(1) / ny_ : 1.0;
        const int stride = nx_ + 1;
        double lip = 0.0;
        const int ncy = box_.dim == 2 ? ny_ : 1;
        for (int iy = 0; iy < ncy; ++iy) {
            for (int ix = 0; ix < nx_; ++ix) {
                const int k = iy * stride + ix;
                double gx = std::abs(samples_[k + 1] - samples_[k]) / hx;
                double gy = 0.0;
                if (box_.dim == 2) {
                    gx = std::max(gx, std::abs(samples_[k + stride + 1] - samples_[k + stride]) / hx);
                    gy = std::max(std::abs(samples_[k + stride] - samples_[k]),
                                  std::abs(samples_[k + stride + 1] - samples_[k + 1])) / hy;
                }
                lip = std::max(lip, std::hypot(gx, gy));
            }
        }
        base_lipschitz_ = lip;
        break;
    }
    }
    if (!std::isfinite(base_min_) || !std::isfinite(base_max_) || !std::isfinite(base_lipschitz_)) {
        throw ArgumentError("exponent: non-finite exponent values");
    }
    if (!(base_min_ > 1.0)) {
        std::ostringstream os;
        os << "exponent bounds: p- = " << base_min_ << " violates 1 < p-";
        throw ArgumentError(os.str());
    }
}

void VariableExponent::check_inside(const Point& x) const {
    if (!box_.contains(x)) {
        std::ostringstream os;
        os << "exponent: point (" << x.x << ", " << x.y << ") outside the bounding box";
        throw DomainError(os.str());
    }
}

double VariableExponent::base_eval(const Point& x) const {
    switch (kind_) {
    case Kind::Constant:
        return coeffs_[0];
    case Kind::Affine:
        return coeffs_[0] + coeffs_[1] * x.x + coeffs_[2] * x.y;
    case Kind::Sampled: {
        const auto [ix, tx] = locate(x.x, box_.lo[0], box_.hi[0], nx_);
        if (box_.dim == 1) return (1.0 - tx) * samples_[ix] + tx * samples_[ix + 1];
        const auto [iy, ty] = locate(x.y, box_.lo[1], box_.hi[1], ny_);
        const int stride = nx_ + 1;
        const int k = iy * stride + ix;
        const double bottom = (1.0 - tx) * samples_[k] + tx * samples_[k + 1];
        const double top = (1.0 - tx) * samples_[k + stride] + tx * samples_[k + stride + 1];
        return (1.0 - ty) * bottom + ty * top;
    }
    }
    return 0.0;
}

Vec2 VariableExponent::base_grad(const Point& x) const {
    switch (kind_) {
    case Kind::Constant:
        return {};
    case Kind::Affine:
        return {coeffs_[1], coeffs_[2]};
    case Kind::Sampled: {
        const double hx = box_.extent(0) / nx_;
        const auto [ix, tx] = locate(x.x, box_.lo[0], box_.hi[0], nx_);
        if (box_.dim == 1) return {(samples_[ix + 1] - samples_[ix]) / hx, 0.0};
        const double hy = box_.extent(1) / ny_;
        const auto [iy, ty] = locate(x.y, box_.lo[1], box_.hi[1], ny_);
        const int stride = nx_ + 1;
        const int k = iy * stride + ix;
        const double gx = ((1.0 - ty) * (samples_[k + 1] - samples_[k]) +
                           ty * (samples_[k + stride + 1] - samples_[k + stride])) / hx;
        const double gy = ((1.0 - tx) * (samples_[k + stride] - samples_[k]) +
                           tx * (samples_[k + stride + 1] - samples_[k + 1])) / hy;
        return {gx, gy};
    }
    }
    return {};
}

double VariableExponent::eval(const Point& x) const {
    check_inside(x);
    return multiplier_ * base_eval(x);
}

Vec2 VariableExponent::grad_p(const Point& x) const {
    check_inside(x);
    return static_cast<double>(multiplier_) * base_grad(x);
}

Vec2 VariableExponent::grad_ln_p(const Point& x) const {
    check_inside(x);
    if (kind_ == Kind::Constant) return {};
    const double p = base_eval(x);
    const Vec2 g = base_grad(x);
    return {g.x / p, g.y / p};
}

VariableExponent VariableExponent::scaled(std::int64_t j) const {
    if (j < 1) throw ArgumentError("scale_exponent: multiplier must be a positive integer");
    VariableExponent e = *this;
    e.multiplier_ = multiplier_ * j;
    return e;
}

double eval_p(const VariableExponent& exp, const Point& x) { return exp.eval(x); }

Vec2 grad_ln_p(const VariableExponent& exp, const Point& x) { return exp.grad_ln_p(x); }

VariableExponent scale_exponent(const VariableExponent& exp, std::int64_t j) { return exp.scaled(j); }

}  // namespace pxeig
