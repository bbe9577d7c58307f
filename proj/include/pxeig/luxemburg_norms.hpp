#pragma once

#include <cstdint>
#include <vector>

#include "pxeig/domain_grid.hpp"
#include "pxeig/exponent_field.hpp"

namespace pxeig {

// dx / p(x) (the Luxemburg normalization) or plain dx. OneOverBaseP weighs by
// the exponent before its integer multiplier, so dx / p(x) stays fixed along a
// jp(x) table; only the ScalarField overloads accept it.
enum class WeightMode { OneOverP, Plain, OneOverBaseP };

struct ModularSpec {
    VariableExponent exponent;
    WeightMode mode = WeightMode::OneOverP;
};

// Scaled exponent above which modulars are accumulated with log-sum-exp.
inline constexpr double kLogSpaceThreshold = 50.0;

/**
 * Quadrature samples of a power-type modular: sum_m w_m |a_m / gamma|^{p_m} (/ p_m).
 * Magnitudes are stored in log form; zero magnitudes are dropped since they
 * contribute nothing for any exponent.
 */
class PowerSamples {
public:
    void add(double magnitude, double measure, double exponent);

    bool empty() const { return log_a_.empty(); }
    std::size_t size() const { return log_a_.size(); }
    double max_exponent() const { return p_max_; }
    double min_exponent() const { return p_min_; }
    double max_log_magnitude() const { return log_a_max_; }

    // ln of the modular at gamma = exp(log_gamma); -inf when empty.
    double log_modular(WeightMode mode, double log_gamma) const;
    double modular(WeightMode mode, double gamma) const;
    // ln gamma solving log_modular(mode, ln gamma) = log_level.
    double solve_log_gamma(WeightMode mode, double log_level) const;

private:
    struct Eval {
        double value;
        double slope;
    };
    Eval log_modular_with_slope(WeightMode mode, double log_gamma) const;

    std::vector<double> a_;
    std::vector<double> w_;
    std::vector<double> log_a_;
    std::vector<double> log_w_;
    std::vector<double> log_p_;
    std::vector<double> p_;
    double p_min_ = INFINITY;
    double p_max_ = 0.0;
    double log_a_max_ = -INFINITY;
};

// Nodal values |f| with the domain's quadrature weights and p at the nodes.
PowerSamples nodal_samples(const ScalarField& f, const VariableExponent& p);
// Element gradient magnitudes |grad u| with element measures and p at element centres.
PowerSamples gradient_samples(const ScalarField& u, const VariableExponent& p);

// Element-wise gradients of a nodal field.
std::vector<Vec2> element_gradients(const ScalarField& u);

double modular(const ScalarField& f, const ModularSpec& spec, double gamma);
double luxemburg_norm(const ScalarField& f, const ModularSpec& spec);
double luxemburg_norm(const PowerSamples& samples, WeightMode mode);
// || grad u ||_{p(x)} with weight 1/p.
double gradient_norm(const ScalarField& u, const VariableExponent& p);
double sup_norm(const ScalarField& f);

struct NormTableRow {
    std::int64_t j = 0;
    double norm = 0.0;
};
std::vector<NormTableRow> norm_limit_table(const ScalarField& f, const VariableExponent& p,
                                           const std::vector<std::int64_t>& j_list,
                                           WeightMode mode = WeightMode::OneOverP);

double rayleigh_quotient(const ScalarField& u, const VariableExponent& p);
double modular_rayleigh(const ScalarField& u, const VariableExponent& p);

}  // namespace pxeig
