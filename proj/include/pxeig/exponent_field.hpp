#pragma once

#include <cstdint>
#include <vector>

#include "pxeig/geometry.hpp"

namespace pxeig {

/**
 * Variable exponent p(x) on a bounding box, with 1 < p- <= p(x) <= p+ < inf.
 *
 * Three representations are supported: a constant, an affine function
 * a0 + a1 x + a2 y, and nodal samples on a regular grid evaluated by
 * multilinear interpolation. A positive integer multiplier j is carried
 * separately so that jp(x) shares the exact grad ln p of p(x).
 *
 * Immutable after construction.
 */
class VariableExponent {
public:
    enum class Kind { Constant, Affine, Sampled };

    static VariableExponent constant(double value, const Box& box);
    // coeffs = {a0, a1} in 1-D, {a0, a1, a2} in 2-D; missing trailing terms are 0.
    static VariableExponent affine(std::vector<double> coeffs, const Box& box);
    // samples are row-major with x fastest: index = iy * (nx + 1) + ix. ny = 0 in 1-D.
    static VariableExponent sampled(const Box& box, int nx, int ny, std::vector<double> samples);

    Kind kind() const { return kind_; }
    const Box& box() const { return box_; }
    int dim() const { return box_.dim; }
    std::int64_t multiplier() const { return multiplier_; }

    double p_minus() const { return multiplier_ * base_min_; }
    double p_plus() const { return multiplier_ * base_max_; }
    // sup |grad p| including the multiplier.
    double lipschitz_bound() const { return multiplier_ * base_lipschitz_; }

    double eval(const Point& x) const;
    Vec2 grad_p(const Point& x) const;
    Vec2 grad_ln_p(const Point& x) const;

    VariableExponent scaled(std::int64_t j) const;

    const std::vector<double>& coefficients() const { return coeffs_; }
    const std::vector<double>& samples() const { return samples_; }
    int sample_nx() const { return nx_; }
    int sample_ny() const { return ny_; }

private:
    VariableExponent() = default;
    void check_inside(const Point& x) const;
    double base_eval(const Point& x) const;
    Vec2 base_grad(const Point& x) const;
    void finalize();

    Kind kind_ = Kind::Constant;
    Box box_{};
    std::int64_t multiplier_ = 1;
    std::vector<double> coeffs_;   // constant: {value}; affine: {a0, a1, a2}
    std::vector<double> samples_;  // sampled only
    int nx_ = 0;
    int ny_ = 0;
    double base_min_ = 0.0;
    double base_max_ = 0.0;
    double base_lipschitz_ = 0.0;
};

double eval_p(const VariableExponent& exp, const Point& x);
Vec2 grad_ln_p(const VariableExponent& exp, const Point& x);
// Returns jp(x). Throws ArgumentError for j < 1.
VariableExponent scale_exponent(const VariableExponent& exp, std::int64_t j);

}  // namespace pxeig
