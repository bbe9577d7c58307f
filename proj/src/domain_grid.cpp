#include "pxeig/domain_grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pxeig/errors.hpp"

namespace pxeig {

namespace {

constexpr double kFar = 1e30;

// Lower envelope of parabolas (Felzenszwalb & Huttenlocher): d[q] = min_p (q - p)^2 + f[p].
void edt_1d(std::span<const double> f, std::span<double> d, std::vector<int>& v, std::vector<double>& z) {
    const int n = static_cast<int>(f.size());
    v.assign(n, 0);
    z.assign(n + 1, 0.0);
    int k = -1;
    for (int q = 0; q < n; ++q) {
        if (f[q] >= kFar) continue;
        if (k < 0) {
            k = 0;
            v[0] = q;
            z[0] = -kFar;
            z[1] = kFar;
            continue;
        }
        double s;
        while (true) {
            const int p = v[k];
            s = ((f[q] + double(q) * q) - (f[p] + double(p) * p)) / (2.0 * (q - p));
            if (s <= z[k] && k > 0) {
                --k;
            } else {
                break;
            }
        }
        if (s <= z[k]) {
            // k == 0 and the new parabola dominates everywhere
            v[0] = q;
            z[0] = -kFar;
            z[1] = kFar;
            continue;
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = kFar;
    }
    if (k < 0) {
        std::fill(d.begin(), d.end(), kFar);
        return;
    }
    int j = 0;
    for (int q = 0; q < n; ++q) {
        while (z[j + 1] < q) ++j;
        const double dq = q - v[j];
        d[q] = dq * dq + f[v[j]];
    }
}

}  // namespace

std::shared_ptr<const GriddedDomain> GriddedDomain::interval(double a, double b, int n) {
    if (!(b > a) || n < 2) throw ArgumentError("domain: interval needs b > a and at least 2 cells");
    auto d = std::shared_ptr<GriddedDomain>(new GriddedDomain());
    d->shape_ = Shape::Interval;
    d->box_ = Box::interval(a, b);
    d->nx_ = n;
    d->ny_ = 0;
    d->h_ = (b - a) / n;
    d->kind_.assign(n + 1, NodeKind::Interior);
    d->kind_.front() = d->kind_.back() = NodeKind::Boundary;
    d->build();
    return d;
}

std::shared_ptr<const GriddedDomain> GriddedDomain::rectangle(double x0, double x1, double y0, double y1, int nx) {
    if (!(x1 > x0) || !(y1 > y0) || nx < 2) throw ArgumentError("domain: rectangle needs positive extents and at least 2 cells");
    const double h = (x1 - x0) / nx;
    const double ny_real = (y1 - y0) / h;
    const int ny = static_cast<int>(std::lround(ny_real));
    if (ny < 2 || std::abs(ny_real - ny) > 1e-9 * ny_real) {
        throw ArgumentError("domain: rectangle height must be an integer multiple of the spacing");
    }
    auto d = std::shared_ptr<GriddedDomain>(new GriddedDomain());
    d->shape_ = Shape::Rectangle;
    d->box_ = Box::rectangle(x0, x1, y0, y1);
    d->nx_ = nx;
    d->ny_ = ny;
    d->h_ = h;
    d->kind_.assign(static_cast<std::size_t>(nx + 1) * (ny + 1), NodeKind::Interior);
    for (int iy = 0; iy <= ny; ++iy) {
        for (int ix = 0; ix <= nx; ++ix) {
            if (ix == 0 || iy == 0 || ix == nx || iy == ny) d->kind_[d->index(ix, iy)] = NodeKind::Boundary;
        }
    }
    d->build();
    return d;
}

std::shared_ptr<const GriddedDomain> GriddedDomain::mask(const Box& box, int nx, int ny, std::vector<std::uint8_t> inside) {
    if (box.dim != 2) throw ArgumentError("domain: masks are two-dimensional");
    if (nx < 2 || ny < 2) throw ArgumentError("domain: mask raster too small");
    if (inside.size() != static_cast<std::size_t>(nx + 1) * (ny + 1)) throw ArgumentError("domain: mask size mismatch");
    const double h = box.extent(0) / nx;
    if (!(h > 0.0) || std::abs(box.extent(1) / ny - h) > 1e-9 * h) {
        throw ArgumentError("domain: mask pixels must be square");
    }
    auto d = std::shared_ptr<GriddedDomain>(new GriddedDomain());
    d->shape_ = Shape::Mask;
    d->box_ = box;
    d->nx_ = nx;
    d->ny_ = ny;
    d->h_ = h;
    d->kind_.assign(inside.size(), NodeKind::Exterior);
    for (int iy = 0; iy <= ny; ++iy) {
        for (int ix = 0; ix <= nx; ++ix) {
            const std::size_t k = d->index(ix, iy);
            if (!inside[k]) continue;
            bool edge = ix == 0 || iy == 0 || ix == nx || iy == ny;
            if (!edge) {
                edge = !inside[d->index(ix - 1, iy)] || !inside[d->index(ix + 1, iy)] ||
                       !inside[d->index(ix, iy - 1)] || !inside[d->index(ix, iy + 1)];
            }
            d->kind_[k] = edge ? NodeKind::Boundary : NodeKind::Interior;
        }
    }
    d->build();
    return d;
}

void GriddedDomain::build() {
    const std::size_t n = kind_.size();
    weight_.assign(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        if (kind_[k] == NodeKind::Exterior) continue;
        active_.push_back(k);
        (kind_[k] == NodeKind::Interior ? interior_ : boundary_).push_back(k);
    }
    if (shape_ == Shape::Mask) {
        for (std::size_t k : active_) weight_[k] = h_ * h_;
    } else {
        // composite trapezoid rule
        auto w1 = [](int i, int m, double h) { return (i == 0 || i == m) ? 0.5 * h : h; };
        for (std::size_t k : active_) {
            weight_[k] = w1(ix(k), nx_, h_) * (dim() == 2 ? w1(iy(k), ny_, h_) : 1.0);
        }
    }

    const double inv_h = 1.0 / h_;
    if (dim() == 1) {
        for (int i = 0; i < nx_; ++i) {
            Element e;
            e.size = 2;
            e.node = {index(i), index(i + 1), 0};
            e.coef = {Vec2{-inv_h, 0.0}, Vec2{inv_h, 0.0}, Vec2{}};
            e.weight = h_;
            e.center = {box_.lo[0] + (i + 0.5) * h_, 0.0};
            elements_.push_back(e);
        }
        return;
    }
    // Each lattice square splits into a lower-left and an upper-right right triangle.
    for (int j = 0; j < ny_; ++j) {
        for (int i = 0; i < nx_; ++i) {
            const std::size_t n00 = index(i, j), n10 = index(i + 1, j);
            const std::size_t n01 = index(i, j + 1), n11 = index(i + 1, j + 1);
            const double x = box_.lo[0] + i * h_, y = box_.lo[1] + j * h_;
            if (inside(n00) && inside(n10) && inside(n01)) {
                Element e;
                e.size = 3;
                e.node = {n00, n10, n01};
                e.coef = {Vec2{-inv_h, -inv_h}, Vec2{inv_h, 0.0}, Vec2{0.0, inv_h}};
                e.weight = 0.5 * h_ * h_;
                e.center = {x + h_ / 3.0, y + h_ / 3.0};
                elements_.push_back(e);
            }
            if (inside(n11) && inside(n01) && inside(n10)) {
                Element e;
                e.size = 3;
                e.node = {n11, n01, n10};
                e.coef = {Vec2{inv_h, inv_h}, Vec2{-inv_h, 0.0}, Vec2{0.0, -inv_h}};
                e.weight = 0.5 * h_ * h_;
                e.center = {x + 2.0 * h_ / 3.0, y + 2.0 * h_ / 3.0};
                elements_.push_back(e);
            }
        }
    }
}

Point GriddedDomain::coord(std::size_t k) const {
    return {box_.lo[0] + ix(k) * h_, dim() == 2 ? box_.lo[1] + iy(k) * h_ : 0.0};
}

std::size_t GriddedDomain::nearest_node(const Point& x) const {
    const int i = std::clamp(static_cast<int>(std::lround((x.x - box_.lo[0]) / h_)), 0, nx_);
    const int j = dim() == 2 ? std::clamp(static_cast<int>(std::lround((x.y - box_.lo[1]) / h_)), 0, ny_) : 0;
    return index(i, j);
}

std::optional<std::size_t> GriddedDomain::neighbor(std::size_t k, int dx, int dy) const {
    const int i = ix(k) + dx, j = iy(k) + dy;
    if (i < 0 || i > nx_ || j < 0 || j > ny_) return std::nullopt;
    return index(i, j);
}

double GriddedDomain::total_weight() const {
    double s = 0.0;
    for (std::size_t k : active_) s += weight_[k];
    return s;
}

bool operator==(const GriddedDomain& a, const GriddedDomain& b) {
    return a.shape_ == b.shape_ && a.box_ == b.box_ && a.h_ == b.h_ && a.nx_ == b.nx_ && a.ny_ == b.ny_ &&
           a.kind_ == b.kind_;
}

// ---------------------------------------------------------------------------

ScalarField::ScalarField(DomainPtr domain) : domain_(std::move(domain)) {
    if (!domain_) throw ArgumentError("field: null domain");
    values_.assign(domain_->node_count(), 0.0);
}

ScalarField::ScalarField(DomainPtr domain, std::vector<double> values)
    : domain_(std::move(domain)), values_(std::move(values)) {
    if (!domain_) throw ArgumentError("field: null domain");
    if (values_.size() != domain_->node_count()) throw ArgumentError("field: value count does not match the domain");
    for (std::size_t k = 0; k < values_.size(); ++k) {
        if (!domain_->inside(k)) values_[k] = 0.0;
    }
}

bool ScalarField::same_domain(const ScalarField& other) const {
    return domain_ == other.domain_ || (domain_ && other.domain_ && *domain_ == *other.domain_);
}

bool ScalarField::vanishes_on_boundary() const {
    for (std::size_t k : domain_->boundary_nodes()) {
        if (values_[k] != 0.0) return false;
    }
    return true;
}

bool ScalarField::is_zero() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
}

ScalarField& ScalarField::operator*=(double s) {
    for (double& v : values_) v *= s;
    return *this;
}

bool operator==(const ScalarField& a, const ScalarField& b) {
    return a.same_domain(b) && a.values_ == b.values_;
}

// ---------------------------------------------------------------------------

ScalarField distance_function(const DomainPtr& dom) {
    if (dom->interior_nodes().empty()) throw DegenerateDomainError("distance_function: domain has no interior nodes");
    const int nx = dom->nx() + 1;
    const int ny = dom->ny() + 1;
    std::vector<double> grid(dom->node_count(), kFar);
    for (std::size_t k : dom->boundary_nodes()) grid[k] = 0.0;

    std::vector<int> v;
    std::vector<double> z;
    std::vector<double> line, out;
    // pass along x
    line.resize(nx);
    out.resize(nx);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) line[i] = grid[dom->index(i, j)];
        edt_1d(line, out, v, z);
        for (int i = 0; i < nx; ++i) grid[dom->index(i, j)] = out[i];
    }
    // pass along y
    if (dom->dim() == 2) {
        line.resize(ny);
        out.resize(ny);
        for (int i = 0; i < nx; ++i) {
            for (int j = 0; j < ny; ++j) line[j] = grid[dom->index(i, j)];
            edt_1d(line, out, v, z);
            for (int j = 0; j < ny; ++j) grid[dom->index(i, j)] = out[j];
        }
    }
    ScalarField delta(dom);
    for (std::size_t k : dom->interior_nodes()) delta[k] = std::sqrt(grid[k]) * dom->h();
    return delta;
}

InradiusResult inradius_and_lambda_infinity(const DomainPtr& dom) {
    const ScalarField delta = distance_function(dom);
    double r = 0.0;
    for (double v : delta.values()) r = std::max(r, v);
    if (!(r > 0.0)) throw DegenerateDomainError("inradius: zero inradius");
    return {r, 1.0 / r};
}

std::vector<Vec2> gradient(const ScalarField& f) {
    const GriddedDomain& dom = f.domain();
    std::vector<Vec2> g(dom.node_count());
    const double h = dom.h();
    auto axis = [&](std::size_t k, int dx, int dy) {
        const auto minus = dom.neighbor(k, -dx, -dy);
        const auto plus = dom.neighbor(k, dx, dy);
        const bool has_m = minus && dom.inside(*minus);
        const bool has_p = plus && dom.inside(*plus);
        if (has_m && has_p) return (f[*plus] - f[*minus]) / (2.0 * h);
        if (has_p) return (f[*plus] - f[k]) / h;
        if (has_m) return (f[k] - f[*minus]) / h;
        return 0.0;
    };
    for (std::size_t k : dom.active_nodes()) {
        g[k].x = axis(k, 1, 0);
        if (dom.dim() == 2) g[k].y = axis(k, 0, 1);
    }
    return g;
}

double integrate(const ScalarField& f, const ScalarField* weight) {
    if (weight && !f.same_domain(*weight)) throw ArgumentError("integrate: field and weight live on different domains");
    const GriddedDomain& dom = f.domain();
    double s = 0.0;
    for (std::size_t k : dom.active_nodes()) {
        s += f[k] * (weight ? (*weight)[k] : 1.0) * dom.weight(k);
    }
    return s;
}

std::vector<std::uint8_t> distance_ridge(const ScalarField& delta) {
    const GriddedDomain& dom = delta.domain();
    std::vector<std::uint8_t> ridge(dom.node_count(), 0);
    const double tol = 0.25 * dom.h();
    for (std::size_t k : dom.interior_nodes()) {
        for (int axis = 0; axis < dom.dim(); ++axis) {
            const int dx = axis == 0 ? 1 : 0, dy = 1 - dx;
            const auto m = dom.neighbor(k, -dx, -dy);
            const auto p = dom.neighbor(k, dx, dy);
            if (!m || !p || !dom.inside(*m) || !dom.inside(*p)) continue;
            const double backward = delta[k] - delta[*m];
            const double forward = delta[*p] - delta[k];
            if (std::abs(forward - backward) > tol) ridge[k] = 1;
        }
    }
    return ridge;
}

std::vector<std::uint8_t> near_set(const GriddedDomain& dom, const std::vector<std::uint8_t>& set, double radius) {
    std::vector<std::uint8_t> out(dom.node_count(), 0);
    const int w = static_cast<int>(std::ceil(radius / dom.h()));
    const int wy = dom.dim() == 2 ? w : 0;
    for (std::size_t k = 0; k < set.size(); ++k) {
        if (!set[k]) continue;
        for (int dy = -wy; dy <= wy; ++dy) {
            for (int dx = -w; dx <= w; ++dx) {
                const auto q = dom.neighbor(k, dx, dy);
                if (!q) continue;
                if (std::hypot(dx, dy) * dom.h() < radius) out[*q] = 1;
            }
        }
    }
    return out;
}

}  // namespace pxeig
