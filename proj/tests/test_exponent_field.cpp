#include <doctest.h>

#include <random>

#include "pxeig/errors.hpp"
#include "pxeig/exponent_field.hpp"

using namespace pxeig;

namespace {
const Box unit = Box::interval(0.0, 1.0);
}

TEST_CASE("eval_p on the three kinds") {
    CHECK(eval_p(VariableExponent::constant(2.0, unit), {0.37, 0.0}) == 2.0);
    CHECK(eval_p(VariableExponent::affine({2.0, 1.0}, unit), {0.5, 0.0}) == doctest::Approx(2.5).epsilon(1e-15));

    const int n = 256;
    std::vector<double> s(n + 1);
    for (int i = 0; i <= n; ++i) s[i] = 2.0 + static_cast<double>(i) / n;
    const auto p = VariableExponent::sampled(unit, n, 0, s);
    CHECK(std::abs(eval_p(p, {0.25, 0.0}) - 2.25) <= 1.0 / n);
    // linear data is reproduced by linear interpolation between nodes
    CHECK(std::abs(eval_p(p, {0.3, 0.0}) - 2.3) <= 1e-14);
}

TEST_CASE("eval_p rejects points outside the box") {
    const auto p = VariableExponent::affine({2.0, 1.0}, unit);
    CHECK_THROWS_AS(p.eval({1.5, 0.0}), DomainError);
    CHECK_THROWS_AS(p.eval({-0.1, 0.0}), DomainError);
}

TEST_CASE("bounds validation names the exponent bounds") {
    try {
        VariableExponent::constant(1.0, unit);
        FAIL("expected ArgumentError");
    } catch (const ArgumentError& e) {
        CHECK(std::string(e.what()).find("exponent bounds") != std::string::npos);
    }
    CHECK_THROWS_AS(VariableExponent::affine({1.5, -1.0}, unit), ArgumentError);  // p(1) = 0.5
    CHECK_THROWS_AS(VariableExponent::sampled(unit, 2, 0, {2.0, 0.9, 2.0}), ArgumentError);
    CHECK_NOTHROW(VariableExponent::constant(1.0 + 1e-9, unit));
}

TEST_CASE("grad_ln_p") {
    const auto c = VariableExponent::constant(3.0, unit);
    CHECK(grad_ln_p(c, {0.2, 0.0}) == Vec2{0.0, 0.0});

    const auto p = VariableExponent::affine({2.0, 1.0}, unit);
    CHECK(grad_ln_p(p, {0.0, 0.0}).x == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(grad_ln_p(p, {1.0, 0.0}).x == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

    const auto q = VariableExponent::affine({2.0, 0.5, 0.25}, Box::rectangle(0, 1, 0, 1));
    const Vec2 g = grad_ln_p(q, {0.4, 0.8});
    const double pv = 2.0 + 0.2 + 0.2;
    CHECK(g.x == doctest::Approx(0.5 / pv).epsilon(1e-14));
    CHECK(g.y == doctest::Approx(0.25 / pv).epsilon(1e-14));
}

TEST_CASE("scale_exponent") {
    const auto two = VariableExponent::constant(2.0, unit);
    CHECK(scale_exponent(two, 1).eval({0.3, 0.0}) == 2.0);
    const auto ten = scale_exponent(two, 5);
    CHECK(ten.eval({0.3, 0.0}) == 10.0);
    CHECK(ten.p_minus() == 10.0);
    CHECK(ten.p_plus() == 10.0);

    const auto p = VariableExponent::affine({2.0, 1.0}, unit);
    const auto p3 = scale_exponent(p, 3);
    for (int i = 0; i <= 64; ++i) {
        const Point x{i / 64.0, 0.0};
        CHECK(p3.eval(x) == doctest::Approx(6.0 + 3.0 * x.x).epsilon(1e-15));
        CHECK(grad_ln_p(p3, x) == grad_ln_p(p, x));
    }
    CHECK(p3.p_minus() == 6.0);
    CHECK(p3.p_plus() == 9.0);
    CHECK(p3.lipschitz_bound() == doctest::Approx(3.0));

    CHECK_THROWS_AS(scale_exponent(p, 0), ArgumentError);
    CHECK_THROWS_AS(scale_exponent(p, -2), ArgumentError);
}

TEST_CASE("scaling is multiplicative") {
    const auto p = VariableExponent::affine({2.0, 0.7, -0.3}, Box::rectangle(0, 1, 0, 1));
    for (std::int64_t j : {1, 2, 7}) {
        for (std::int64_t l : {1, 3, 16}) {
            const auto a = scale_exponent(scale_exponent(p, j), l);
            const auto b = scale_exponent(p, j * l);
            for (double x : {0.0, 0.3, 1.0}) {
                for (double y : {0.0, 0.6}) {
                    CHECK(a.eval({x, y}) == b.eval({x, y}));
                    CHECK(grad_ln_p(a, {x, y}) == grad_ln_p(p, {x, y}));
                }
            }
        }
    }
}

TEST_CASE("random sampled exponents respect their bounds and Lipschitz bound") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(1.1, 4.0);
    for (int trial = 0; trial < 20; ++trial) {
        const int nx = 8, ny = 5;
        std::vector<double> s((nx + 1) * (ny + 1));
        for (double& v : s) v = U(rng);
        const Box box = Box::rectangle(0, 2, 0, 1);
        const auto p = VariableExponent::sampled(box, nx, ny, s);
        const double hx = 2.0 / nx, hy = 1.0 / ny;
        double max_diff = 0.0;
        for (int iy = 0; iy <= ny; ++iy) {
            for (int ix = 0; ix <= nx; ++ix) {
                const double v = p.eval({ix * hx, iy * hy});
                CHECK(v == doctest::Approx(s[iy * (nx + 1) + ix]).epsilon(1e-14));
                CHECK(v >= p.p_minus());
                CHECK(v <= p.p_plus());
                if (ix < nx) max_diff = std::max(max_diff, std::abs(s[iy * (nx + 1) + ix + 1] - s[iy * (nx + 1) + ix]) / hx);
                if (iy < ny) max_diff = std::max(max_diff, std::abs(s[(iy + 1) * (nx + 1) + ix] - s[iy * (nx + 1) + ix]) / hy);
            }
        }
        CHECK(p.lipschitz_bound() >= max_diff);
        // off-node points stay within bounds too
        for (int m = 0; m < 50; ++m) {
            const Point x{std::uniform_real_distribution<double>(0, 2)(rng), std::uniform_real_distribution<double>(0, 1)(rng)};
            CHECK(p.eval(x) >= p.p_minus() - 1e-14);
            CHECK(p.eval(x) <= p.p_plus() + 1e-14);
        }
    }
}

TEST_CASE("constant kind has zero gradient and equal bounds") {
    const auto p = VariableExponent::constant(2.5, Box::rectangle(-1, 1, -1, 1));
    CHECK(p.p_minus() == p.p_plus());
    CHECK(p.lipschitz_bound() == 0.0);
    CHECK(p.grad_p({0.3, -0.2}) == Vec2{0.0, 0.0});
}
