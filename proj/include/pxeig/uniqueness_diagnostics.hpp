#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "pxeig/domain_grid.hpp"
#include "pxeig/exponent_field.hpp"

namespace pxeig {

// g(t) = (1/alpha) ln(1 + A (e^{alpha t} - 1)), an approximation of the identity for A near 1.
struct GTransform {
    double A = 1.5;
    double alpha = 2.0;

    void validate() const;
};

struct GValues {
    double g = 0.0;
    double g_prime = 0.0;
    double g_double_prime = 0.0;
    // Cancellation-free forms of g - t and g' - 1.
    double g_minus_t = 0.0;
    double g_prime_minus_one = 0.0;
};

// Throws ArgumentError for t < 0.
GValues g_eval(const GTransform& gt, double t);

struct QPropertyReport {
    bool pass = true;
    std::size_t samples = 0;
    std::size_t violations = 0;
    std::vector<std::string> failed;  // names of the relations that failed at least once
};

// Checks the five elementary relations of g (and ln g' = ln A - alpha (g - t))
// at every sample, allowing relative slack `slack`.
QPropertyReport g_inequalities_check(const GTransform& gt, std::span<const double> t_samples, double slack = 1e-10);

// Max relative mismatch between the analytic g', g'' and centred differences at step `step`.
double g_derivative_check(const GTransform& gt, std::span<const double> t_samples, double step = 1e-5);

/**
 * Strict supersolution margin
 *   mu = A^{-1} (A - 1) |grad w|^3 e^{-2v} (lambda - || e^{2v} grad ln p ||_inf),  grad w = g'(v) grad v,
 * on `region` (interior nodes where v > 0 when empty). Throws PreconditionError
 * when the sup reaches lambda. Requires alpha = 2 and 1 < A < 2.
 */
ScalarField strict_margin_mu(const GTransform& gt, const ScalarField& v, const VariableExponent& p, double lambda,
                             std::span<const std::size_t> region = {});

// 3 max_region (u2 / m2)^2 |grad ln p| <= lambda.
bool comparison_condition(const ScalarField& u2, double m2, const VariableExponent& p, double lambda,
                          std::span<const std::size_t> region);

// Nodes of the lattice box of half-width r (in nodes) around center.
std::vector<std::size_t> box_nodes(const GriddedDomain& dom, std::size_t center, int r);

struct UniquenessRadius {
    double radius = 0.0;  // half-width in length units
    int half_width = 0;   // half-width in nodes
    bool holds_at_center = false;
};

// Largest box around center on which comparison_condition holds with m2 = min u on the box,
// and on every smaller box.
UniquenessRadius local_uniqueness_radius(const ScalarField& u, const VariableExponent& p, double lambda,
                                         std::size_t center);

}  // namespace pxeig
