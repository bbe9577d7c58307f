#pragma once

#include <cstdint>
#include <vector>

#include "pxeig/domain_grid.hpp"
#include "pxeig/eigensolver.hpp"
#include "pxeig/exponent_field.hpp"

namespace pxeig {

// Largest multiplied exponent j * p+ a sweep accepts.
inline constexpr double kMaxSweepExponent = 4096.0;

struct SweepRow {
    std::int64_t j = 0;
    double lambda = 0.0;
    double S = 0.0;
    double gap = 0.0;  // |lambda - lambda_infinity|
    int iterations = 0;
    bool converged = false;
    ScalarField u;  // normalized || u ||_{jp(x)} = 1
};

struct SweepResult {
    std::vector<SweepRow> rows;
    double lambda_infinity_geometric = 0.0;  // 1 / inradius
    ScalarField limit_field;                 // u of the last row
    double convergence_gap = 0.0;            // gap of the last row
};

enum class SweepStart { Warm, Cold };

// Solves the jp(x) problem for every j in j_list (ascending). Warm starts
// reuse the previous minimizer as the initial field.
SweepResult sweep_to_infinity(const DomainPtr& dom, const VariableExponent& p, const std::vector<std::int64_t>& j_list,
                              const SolverOptions& opts, SweepStart start = SweepStart::Warm);

// u / || grad u ||_inf with the nodal gradient; the profile compared against delta.
ScalarField gradient_normalized(const ScalarField& u);

// Default cutoff below which |grad v|^2 ln|grad v| is taken as 0, relative to the field's gradient scale.
inline constexpr double kGradCutoff = 1e-8;

/**
 * Delta_inf v + |grad v|^2 ln|grad v| <grad v, grad ln p> at an interior node,
 * by central differences. Throws StencilError when the 3x3 (or 3-point)
 * stencil leaves the domain.
 */
double infinity_x_laplacian(const ScalarField& v, const VariableExponent& p, std::size_t node);
double infinity_x_laplacian(const ScalarField& v, const VariableExponent& p, std::size_t node, double grad_cutoff);

struct LimitResidual {
    ScalarField residual;          // max{lambda - |grad u|/u, Delta_inf(x)(u/K)} at evaluated nodes
    std::vector<std::uint8_t> evaluated;  // nodes with a full stencil
    std::vector<std::uint8_t> counted;    // evaluated nodes at least 2h from the distance ridge
    double max_abs = 0.0;          // over counted nodes
    double K = 0.0;                // sup |grad u|
};

LimitResidual limit_equation_residual(const ScalarField& u, const VariableExponent& p, double lambda_inf);

}  // namespace pxeig
