#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pxeig/domain_grid.hpp"
#include "pxeig/exponent_field.hpp"

namespace pxeig {

// Closed-form solutions on (0, 1) obtained by separation of variables.

inline constexpr double kQuadratureTolerance = 1e-10;
inline constexpr int kFineGridFactor = 10;
inline constexpr double kMaxFamilyA = 1e4;

/**
 * v(x) = int_0^x e^{A/p}     on [0, x0]
 *        int_x^1 e^{A/p}     on [x0, 1]
 * with x0 chosen so both pieces meet.
 *
 * v is stored divided by e^{log_scale}, log_scale = max_x A/p(x), so large |A|
 * does not overflow. lambda, x0 and the condition do not depend on the scale.
 */
struct OneDSolution {
    double A = 0.0;
    double x0 = 0.5;
    double lambda = 0.0;        // from the left derivative at x0
    double lambda_right = 0.0;  // from the right derivative at x0
    double continuity_residual = 0.0;  // |int_0^x0 - int_x0^1|, same scale as v
    double v_x0 = 0.0;                  // v(x0), same scale as v
    double log_scale = 0.0;
    ScalarField v;
    bool eigenvalue_condition_holds = false;
    double condition_margin = 0.0;  // min |v'|/v over the fine grid, divided by lambda
};

// p must be a 1-D exponent whose box contains [0, 1]. n is the number of grid cells.
OneDSolution analytic_modular_solution(const VariableExponent& p, double A, int n = 512);

// max_x p(x) ln v(x) for the (unscaled) solution with constant A.
double log_max_power(const VariableExponent& p, double A, int n = 512);

struct FamilyRow {
    double C = 0.0;
    double A = 0.0;
    double lambda = 0.0;
    double x0 = 0.0;
    bool ok = false;
    std::string error;  // set when the A bracket is exhausted
};

// For each C > 0 solves max_x v(x)^{p(x)} = C for A and reports lambda.
std::vector<FamilyRow> eigenvalue_family(const VariableExponent& p, const std::vector<double>& c_list, int n = 512);

struct SlopeProbe {
    double A = 0.0;
    double sup_slope = 0.0;  // sup_x e^{-A/p(x)} on the fine grid
    double lambda_ratio = 0.0;  // e^{-A/p(x0)}: the factor separating the two one-sided eigenvalues
};

struct RigidityReport {
    std::vector<SlopeProbe> probes;
    bool exclusion_holds = false;  // every positive A gives a slope strictly below 1
    double forced_A = 0.0;
    double x0 = 0.0;
    double lambda = 0.0;
    double delta_error = 0.0;  // max |v_{A=0} - delta| over the grid
    bool unique = false;
    std::optional<double> limit_error;  // || u / ||grad u||_inf - delta ||_inf for a supplied limit field
    bool limit_matches = false;
};

inline constexpr double kLimitMatchTolerance = 0.05;

RigidityReport luxemburg_rigidity_check(const VariableExponent& p, const std::optional<ScalarField>& limit_field = {},
                                        int n = 512);

}  // namespace pxeig
