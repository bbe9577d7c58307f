#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pxeig/domain_grid.hpp"
#include "pxeig/exponent_field.hpp"

namespace pxeig {

enum class Initialization { Distance, Random, Provided };

struct SolverOptions {
    double tolerance = 1e-10;    // relative quotient change that counts as converged
    int max_iterations = 5000;
    int restarts = 1;            // restart 0 uses `initialization`, later ones are random
    std::uint64_t rng_seed = 0;
    Initialization initialization = Initialization::Distance;
    std::optional<ScalarField> initial;  // used with Initialization::Provided

    void validate() const;
};

// Euler-Lagrange constants of a nonzero field.
struct ElConstants {
    double K = 0.0;  // || grad u ||_{p(x)}
    double k = 0.0;  // || u ||_{p(x)}
    double S = 0.0;  // int |grad u / K|^p dx / int |u / k|^p dx
};

struct EigenSolution {
    ScalarField u;  // normalized so that || u ||_{p(x)} = 1
    double lambda = 0.0;
    double K = 0.0;
    double k = 0.0;
    double S = 0.0;
    double weak_residual = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<double> history;  // quotient after every accepted step, starting with the initial value
};

ElConstants constants_KkS(const ScalarField& u, const VariableExponent& p);

/**
 * Minimizes || grad u ||_{p(x)} / || u ||_{p(x)} over nonnegative nodal fields
 * vanishing on the boundary. Each restart runs a projected descent whose
 * direction is the first variation of the quotient (the K'/K and k'/k
 * integrals) preconditioned by a weighted stiffness matrix, with Armijo
 * backtracking. The best restart wins.
 */
EigenSolution minimize_rayleigh(const DomainPtr& dom, const VariableExponent& p, const SolverOptions& opts);

// Max |row residual| of the discrete weak Euler-Lagrange system over hat
// test functions at interior nodes, divided by the largest row magnitude.
// Lambda defaults to K/k of u itself.
double el_weak_residual(const ScalarField& u, const VariableExponent& p, std::optional<double> lambda = std::nullopt);
double el_weak_residual(const EigenSolution& sol, const VariableExponent& p);

struct ModularSolution {
    ScalarField v;
    double lambda_modular = 0.0;  // int |grad v|^p dx / int |v|^p dx at the minimizer
    int iterations = 0;
    bool converged = false;
};

// Minimizes int |grad v|^{p(x)} dx subject to int |v|^{p(x)} dx = C, v >= 0.
ModularSolution minimize_modular_constrained(const DomainPtr& dom, const VariableExponent& p, double C,
                                             const SolverOptions& opts);

struct PositivityReport {
    double min_interior = 0.0;
    std::size_t argmin = 0;
    bool has_interior_zero = false;
};

PositivityReport strict_positivity_check(const ScalarField& u);
PositivityReport strict_positivity_check(const EigenSolution& sol);

}  // namespace pxeig
