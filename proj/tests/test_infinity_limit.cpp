#include <doctest.h>

#include <numbers>
#include <random>

#include "oracles.hpp"
#include "pxeig/errors.hpp"
#include "pxeig/infinity_limit.hpp"
#include "pxeig/luxemburg_norms.hpp"

using namespace pxeig;

namespace {

const Box unit = Box::interval(0.0, 1.0);
const Box square = Box::rectangle(0, 1, 0, 1);

SolverOptions defaults() {
    SolverOptions o;
    o.rng_seed = 1;
    return o;
}

// Direct evaluation of the infinity(x)-Laplacian from an analytic gradient and Hessian.
double symbolic_infinity_x(Vec2 g, double hxx, double hxy, double hyy, Vec2 grad_ln_p) {
    const double lap = g.x * g.x * hxx + 2.0 * g.x * g.y * hxy + g.y * g.y * hyy;
    const double s = g.norm();
    return lap + (s > 0.0 ? s * s * std::log(s) * g.dot(grad_ln_p) : 0.0);
}

}  // namespace

TEST_CASE("infinity(x)-Laplacian examples") {
    const auto dom = GriddedDomain::rectangle(0, 1, 0, 1, 32);
    const double c = 0.4;
    const auto p = VariableExponent::affine({2.0, c, 0.0}, square);
    const std::size_t mid = dom->nearest_node({0.5, 0.5});
    const double c_here = c / p.eval(dom->coord(mid));

    // v = 2 x1: the log term alone, 4 ln 2 * 2 c
    const auto v2 = ScalarField::from_function(dom, [](Point x) { return 2.0 * x.x; });
    CHECK(infinity_x_laplacian(v2, p, mid) == doctest::Approx(8.0 * c_here * std::log(2.0)).epsilon(1e-10));

    // unit slope: both terms vanish
    const auto v1 = ScalarField::from_function(dom, [](Point x) { return x.x; });
    for (std::size_t k : dom->interior_nodes()) CHECK(std::abs(infinity_x_laplacian(v1, p, k)) <= 1e-10);

    // constant p reduces to the infinity-Laplacian
    const auto two = VariableExponent::constant(2.0, square);
    const auto q = ScalarField::from_function(dom, [](Point x) { return x.x * x.x + x.x * x.y; });
    for (std::size_t k : dom->interior_nodes()) {
        const Point x = dom->coord(k);
        const Vec2 g{2.0 * x.x + x.y, x.x};
        // the stencil is exact for quadratics
        CHECK(infinity_x_laplacian(q, two, k) == doctest::Approx(symbolic_infinity_x(g, 2.0, 1.0, 0.0, {})).epsilon(1e-8));
    }
}

TEST_CASE("infinity(x)-Laplacian converges on smooth fields") {
    const auto p = VariableExponent::affine({2.0, 0.5, 0.25}, square);
    const Point x0{0.5, 0.5};
    auto f = [](Point x) { return std::sin(x.x) * std::exp(x.y); };
    const Vec2 g{std::cos(x0.x) * std::exp(x0.y), std::sin(x0.x) * std::exp(x0.y)};
    const double want = symbolic_infinity_x(g, -std::sin(x0.x) * std::exp(x0.y), std::cos(x0.x) * std::exp(x0.y),
                                            std::sin(x0.x) * std::exp(x0.y), grad_ln_p(p, x0));
    double prev = INFINITY;
    for (int n : {16, 32, 64}) {
        const auto dom = GriddedDomain::rectangle(0, 1, 0, 1, n);
        const auto v = ScalarField::from_function(dom, f);
        const double err = std::abs(infinity_x_laplacian(v, p, dom->nearest_node(x0)) - want);
        CHECK(err <= prev / 3.0);
        prev = err;
    }
    CHECK(prev <= 1e-3);
}

TEST_CASE("infinity(x)-Laplacian stencil and cutoff") {
    const auto dom = GriddedDomain::interval(0.0, 1.0, 16);
    const auto p = VariableExponent::affine({2.0, 1.0}, unit);
    const auto v = ScalarField::from_function(dom, [](Point x) { return 2.0 * x.x; });
    CHECK_THROWS_AS(infinity_x_laplacian(v, p, 0), StencilError);
    CHECK_THROWS_AS(infinity_x_laplacian(v, p, 16), StencilError);
    CHECK_NOTHROW(infinity_x_laplacian(v, p, 1));
    // gradients below the cutoff drop the log term
    CHECK(infinity_x_laplacian(v, p, 5, 3.0) == 0.0);
    const auto flat = ScalarField::from_function(dom, [](Point) { return 1.0; });
    CHECK(infinity_x_laplacian(flat, p, 5) == 0.0);
}

TEST_CASE("limit equation residual of delta") {
    const auto two = VariableExponent::constant(2.0, unit);
    const auto dom = GriddedDomain::interval(0.0, 1.0, 256);
    const auto res = limit_equation_residual(distance_function(dom), two, 2.0);
    CHECK(res.max_abs < 10.0 * dom->h());
    CHECK(res.K == doctest::Approx(1.0));
    // the ridge neighbourhood is evaluated but not counted
    const std::size_t mid = dom->nearest_node({0.5, 0.0});
    CHECK(res.evaluated[mid]);
    CHECK_FALSE(res.counted[mid]);

    const auto sq = GriddedDomain::rectangle(0, 1, 0, 1, 64);
    for (double pv : {2.0, 3.0}) {
        const auto r2 = limit_equation_residual(distance_function(sq), VariableExponent::constant(pv, square), 2.0);
        CHECK(r2.max_abs < 10.0 * sq->h());
    }
}

TEST_CASE("limit equation residual of constant and negative fields") {
    const auto dom = GriddedDomain::interval(0.0, 1.0, 64);
    const auto two = VariableExponent::constant(2.0, unit);
    const auto one = ScalarField::from_function(dom, [](Point) { return 1.0; });
    const auto res = limit_equation_residual(one, two, 2.0);
    for (std::size_t k : dom->interior_nodes()) CHECK(res.residual[k] == 2.0);
    CHECK(res.max_abs == 2.0);

    ScalarField neg = distance_function(dom);
    neg[10] = -1e-3;
    CHECK_THROWS_AS(limit_equation_residual(neg, two, 2.0), ArgumentError);
    CHECK_THROWS_AS(limit_equation_residual(ScalarField(dom), two, 2.0), ArgumentError);
}

TEST_CASE("infinity Rayleigh quotient is bounded below") {
    std::mt19937_64 rng(2);
    const auto dom = GriddedDomain::rectangle(0, 1, 0, 1, 32);
    const double lam_inf = inradius_and_lambda_infinity(dom).lambda_infinity;
    for (int trial = 0; trial < 20; ++trial) {
        ScalarField u(dom);
        for (std::size_t k : dom->interior_nodes()) u[k] = oracle::uniform(rng, 0.0, 1.0);
        double gmax = 0.0;
        for (const Vec2& g : gradient(u)) gmax = std::max(gmax, g.norm());
        CHECK(gmax / sup_norm(u) >= lam_inf - 2.0 * dom->h());
    }
}

TEST_CASE("gradient normalization") {
    const auto dom = GriddedDomain::interval(0.0, 1.0, 64);
    auto u = distance_function(dom);
    u *= 3.0;
    const auto v = gradient_normalized(u);
    CHECK(sup_norm(v) == doctest::Approx(0.5));
    CHECK_THROWS_AS(gradient_normalized(ScalarField(dom)), ArgumentError);
}

TEST_CASE("sweep on the interval with p = 2 + x") {
    const auto dom = GriddedDomain::interval(0.0, 1.0, 512);
    const auto p = VariableExponent::affine({2.0, 1.0}, unit);
    const std::vector<std::int64_t> js{1, 2, 4, 8, 16, 32, 64};
    const auto sweep = sweep_to_infinity(dom, p, js, defaults());
    REQUIRE(sweep.rows.size() == js.size());
    CHECK(sweep.lambda_infinity_geometric == doctest::Approx(2.0));
    CHECK(std::abs(sweep.rows.back().lambda - 2.0) / 2.0 < 0.05);
    CHECK(sweep.convergence_gap == sweep.rows.back().gap);
    CHECK(sweep.limit_field == sweep.rows.back().u);

    const ScalarField d = distance_function(dom);
    for (const auto& row : sweep.rows) {
        const auto pj = scale_exponent(p, row.j);
        CHECK(row.converged);
        CHECK(luxemburg_norm(row.u, {pj, WeightMode::OneOverP}) == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(row.lambda <= rayleigh_quotient(d, pj) * (1.0 + 1e-12));
        CHECK(row.S >= pj.p_minus() / pj.p_plus() * (1.0 - 1e-12));
        CHECK(row.S <= pj.p_plus() / pj.p_minus() * (1.0 + 1e-12));
    }
    // tail trend towards the inradius value
    const auto& last = sweep.rows.back();
    const auto& quarter = sweep.rows[sweep.rows.size() - 3];
    CHECK(last.gap < quarter.gap + 1e-3);

    const ScalarField u_inf = gradient_normalized(sweep.limit_field);
    double err = 0.0;
    for (std::size_t k : dom->active_nodes()) err = std::max(err, std::abs(u_inf[k] - d[k]));
    CHECK(err < 0.05);
    // Ascoli normalization: sup |u_inf| / 0.5 close to 1
    CHECK(std::abs(sup_norm(u_inf) / 0.5 - 1.0) < 0.05);
}

TEST_CASE("sweep with p = 2 starts at pi") {
    const auto dom = GriddedDomain::interval(0.0, 1.0, 512);
    const auto p = VariableExponent::constant(2.0, unit);
    const auto sweep = sweep_to_infinity(dom, p, {1, 4, 16, 64}, defaults());
    CHECK(std::abs(sweep.rows.front().lambda - std::numbers::pi) <= 0.01 * std::numbers::pi);
    CHECK(std::abs(sweep.rows.back().lambda - 2.0) <= 0.05 * 2.0);
}

TEST_CASE("single-row sweep equals a plain solve") {
    const auto dom = GriddedDomain::interval(0.0, 1.0, 128);
    const auto p = VariableExponent::affine({2.0, 1.0}, unit);
    const auto sweep = sweep_to_infinity(dom, p, {1}, defaults());
    const auto sol = minimize_rayleigh(dom, p, defaults());
    REQUIRE(sweep.rows.size() == 1);
    CHECK(sweep.rows[0].lambda == sol.lambda);
    CHECK(sweep.rows[0].u == sol.u);
}

TEST_CASE("cold and warm starts agree") {
    const auto dom = GriddedDomain::interval(0.0, 1.0, 128);
    const auto p = VariableExponent::affine({2.0, 1.0}, unit);
    const auto warm = sweep_to_infinity(dom, p, {1, 4, 16}, defaults(), SweepStart::Warm);
    const auto cold = sweep_to_infinity(dom, p, {1, 4, 16}, defaults(), SweepStart::Cold);
    for (std::size_t i = 0; i < warm.rows.size(); ++i) CHECK(warm.rows[i].lambda == doctest::Approx(cold.rows[i].lambda).epsilon(1e-6));
}

TEST_CASE("sweep argument validation") {
    const auto dom = GriddedDomain::interval(0.0, 1.0, 32);
    const auto p = VariableExponent::affine({2.0, 1.0}, unit);
    CHECK_THROWS_AS(sweep_to_infinity(dom, p, {}, defaults()), ArgumentError);
    CHECK_THROWS_AS(sweep_to_infinity(dom, p, {4, 2}, defaults()), ArgumentError);
    CHECK_THROWS_AS(sweep_to_infinity(dom, p, {0, 2}, defaults()), ArgumentError);
    CHECK_THROWS_AS(sweep_to_infinity(dom, p, {1, 2000}, defaults()), ArgumentError);
}
