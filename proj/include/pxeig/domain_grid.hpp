#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "pxeig/geometry.hpp"

namespace pxeig {

enum class NodeKind : std::uint8_t { Interior, Boundary, Exterior };

// Piecewise-linear element: the gradient of a nodal field on the element is
// sum_a coef[a] * u[node[a]]. Intervals in 1-D, right triangles in 2-D.
struct Element {
    std::array<std::size_t, 3> node{};
    std::array<Vec2, 3> coef{};
    int size = 0;
    double weight = 0.0;  // element measure
    Point center;         // where the exponent is sampled
};

/**
 * Uniform lattice discretization of a bounded domain (interval, rectangle or
 * boolean raster mask). Nodes are classified interior / boundary / exterior;
 * fields in W_0 vanish on boundary nodes. Immutable; share through
 * std::shared_ptr<const GriddedDomain>.
 */
class GriddedDomain {
public:
    enum class Shape { Interval, Rectangle, Mask };

    // n cells on [a, b].
    static std::shared_ptr<const GriddedDomain> interval(double a, double b, int n);
    // nx cells along x; the y extent must be an integer multiple of h = (x1 - x0) / nx.
    static std::shared_ptr<const GriddedDomain> rectangle(double x0, double x1, double y0, double y1, int nx);
    // Raster of (nx + 1) x (ny + 1) node flags, index iy * (nx + 1) + ix with iy = 0 at box.lo[1].
    static std::shared_ptr<const GriddedDomain> mask(const Box& box, int nx, int ny, std::vector<std::uint8_t> inside);

    Shape shape() const { return shape_; }
    int dim() const { return box_.dim; }
    const Box& box() const { return box_; }
    double h() const { return h_; }
    int nx() const { return nx_; }
    int ny() const { return ny_; }
    std::size_t node_count() const { return kind_.size(); }

    std::size_t index(int ix, int iy = 0) const { return static_cast<std::size_t>(iy) * (nx_ + 1) + ix; }
    int ix(std::size_t k) const { return static_cast<int>(k % (nx_ + 1)); }
    int iy(std::size_t k) const { return static_cast<int>(k / (nx_ + 1)); }
    Point coord(std::size_t k) const;
    // Node nearest to a point (clamped to the lattice).
    std::size_t nearest_node(const Point& x) const;

    NodeKind kind(std::size_t k) const { return kind_[k]; }
    bool inside(std::size_t k) const { return kind_[k] != NodeKind::Exterior; }
    double weight(std::size_t k) const { return weight_[k]; }

    const std::vector<std::size_t>& interior_nodes() const { return interior_; }
    const std::vector<std::size_t>& boundary_nodes() const { return boundary_; }
    // interior and boundary nodes in index order
    const std::vector<std::size_t>& active_nodes() const { return active_; }
    const std::vector<Element>& elements() const { return elements_; }

    // Lattice neighbour of k shifted by (dx, dy), or nullopt when off the lattice.
    std::optional<std::size_t> neighbor(std::size_t k, int dx, int dy) const;

    double total_weight() const;

    friend bool operator==(const GriddedDomain& a, const GriddedDomain& b);

private:
    GriddedDomain() = default;
    void build();

    Shape shape_ = Shape::Interval;
    Box box_{};
    double h_ = 0.0;
    int nx_ = 0;
    int ny_ = 0;
    std::vector<NodeKind> kind_;
    std::vector<double> weight_;
    std::vector<std::size_t> interior_;
    std::vector<std::size_t> boundary_;
    std::vector<std::size_t> active_;
    std::vector<Element> elements_;
};

using DomainPtr = std::shared_ptr<const GriddedDomain>;

/**
 * Nodal values on a GriddedDomain. Values are meaningful on interior and
 * boundary nodes; exterior entries are kept at 0.
 */
class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(DomainPtr domain);
    ScalarField(DomainPtr domain, std::vector<double> values);

    template <class Fn>
    static ScalarField from_function(DomainPtr domain, Fn&& fn) {
        ScalarField f(domain);
        for (std::size_t k : domain->active_nodes()) f.values_[k] = fn(domain->coord(k));
        return f;
    }

    const GriddedDomain& domain() const { return *domain_; }
    const DomainPtr& domain_ptr() const { return domain_; }
    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }
    double operator[](std::size_t k) const { return values_[k]; }
    double& operator[](std::size_t k) { return values_[k]; }
    std::size_t size() const { return values_.size(); }

    bool same_domain(const ScalarField& other) const;
    // Zero on every boundary node.
    bool vanishes_on_boundary() const;
    bool is_zero() const;

    ScalarField& operator*=(double s);
    friend ScalarField operator*(double s, ScalarField f) { return f *= s; }

    friend bool operator==(const ScalarField& a, const ScalarField& b);

private:
    DomainPtr domain_;
    std::vector<double> values_;
};

// Euclidean distance to the nearest boundary node (exact transform), zero on
// boundary and exterior nodes. Throws DegenerateDomainError without interior nodes.
ScalarField distance_function(const DomainPtr& dom);

struct InradiusResult {
    double inradius = 0.0;
    double lambda_infinity = 0.0;
};
InradiusResult inradius_and_lambda_infinity(const DomainPtr& dom);

// Nodal gradient: central differences where both lattice neighbours are
// inside the domain, one-sided otherwise. Zero at exterior nodes.
std::vector<Vec2> gradient(const ScalarField& f);

// sum f * weight * measure over interior and boundary nodes.
double integrate(const ScalarField& f, const ScalarField* weight = nullptr);

// Nodes where the nearest-boundary direction of delta is not unique (kinks of
// the distance function), and the nodes within `radius` of any of them.
std::vector<std::uint8_t> distance_ridge(const ScalarField& delta);
std::vector<std::uint8_t> near_set(const GriddedDomain& dom, const std::vector<std::uint8_t>& set, double radius);

}  // namespace pxeig
