#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "pxeig/errors.hpp"
#include "pxeig/uniqueness_diagnostics.hpp"

using namespace pxeig;

namespace {

const Box unit = Box::interval(0.0, 1.0);

// Direct long-double evaluation of g and g' from the defining formula.
long double g_direct(long double A, long double alpha, long double t) {
    return std::log1p(A * std::expm1(alpha * t)) / alpha;
}

long double gp_direct(long double A, long double alpha, long double t) {
    const long double e = std::exp(alpha * t);
    return A * e / (1.0L + A * (e - 1.0L));
}

std::vector<double> random_t(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
    std::vector<double> t(n);
    for (double& x : t) x = oracle::uniform(rng, lo, hi);
    return t;
}

}  // namespace

TEST_CASE("g at t = 0 and near the identity") {
    for (double A : {1.1, 1.5, 1.99}) {
        const auto g0 = g_eval({A, 2.0}, 0.0);
        CHECK(g0.g == 0.0);
        CHECK(g0.g_prime == doctest::Approx(A).epsilon(1e-15));
    }
    const GTransform near{1.0 + 1e-9, 2.0};
    for (double t : {0.01, 1.0, 5.0}) {
        const auto v = g_eval(near, t);
        CHECK(std::abs(v.g - t) <= 1e-9);
        CHECK(std::abs(v.g_prime - 1.0) <= 1e-9);
        CHECK(std::abs(v.g_double_prime) <= 1e-8);
        CHECK(v.g_minus_t > 0.0);
        CHECK(v.g_prime_minus_one > 0.0);
    }
}

TEST_CASE("g against the defining formula") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        const double A = oracle::uniform(rng, 1.01, 1.99), alpha = oracle::uniform(rng, 1.0, 3.0);
        const double t = oracle::uniform(rng, 0.0, 8.0);
        const auto v = g_eval({A, alpha}, t);
        CHECK(v.g == doctest::Approx(static_cast<double>(g_direct(A, alpha, t))).epsilon(1e-13));
        CHECK(v.g_prime == doctest::Approx(static_cast<double>(gp_direct(A, alpha, t))).epsilon(1e-13));
        CHECK(v.g_double_prime == doctest::Approx(-alpha * (v.g_prime - 1.0) * v.g_prime).epsilon(1e-9));
        CHECK(v.g_minus_t == doctest::Approx(static_cast<double>(g_direct(A, alpha, t) - t)).epsilon(1e-8));
    }
}

TEST_CASE("analytic derivatives against long-double differences") {
    const double A = 1.5, alpha = 2.0, t = 1.0, s = 1e-5;
    const auto v = g_eval({A, alpha}, t);
    const long double fd1 = (g_direct(A, alpha, t + s) - g_direct(A, alpha, t - s)) / (2.0L * s);
    const long double fd2 = (gp_direct(A, alpha, t + s) - gp_direct(A, alpha, t - s)) / (2.0L * s);
    CHECK(std::abs(v.g_prime - fd1) <= 1e-6 * std::abs(fd1));
    CHECK(std::abs(v.g_double_prime - fd2) <= 1e-6 * std::abs(fd2));
    CHECK(v.g_double_prime == doctest::Approx(-2.0 * (v.g_prime - 1.0) * v.g_prime).epsilon(1e-12));

    std::mt19937_64 rng(9);
    const auto ts = random_t(rng, 1000, 0.01, 10.0);
    for (double a : {1.01, 1.5, 1.99}) CHECK(g_derivative_check({a, 2.0}, ts) <= 1e-6);
}

TEST_CASE("the five relations on the example samples") {
    const std::vector<double> ts{0.01, 0.1, 1.0, 5.0};
    const auto r = g_inequalities_check({1.5, 2.0}, ts);
    CHECK(r.pass);
    CHECK(r.samples == ts.size());
    CHECK(r.violations == 0);
    CHECK(r.failed.empty());
    CHECK(g_inequalities_check({1.0 + 1e-9, 2.0}, ts).pass);

    // deep tail: g' - 1 on the e^{-20} scale, bounds still ordered
    const auto v = g_eval({1.99, 2.0}, 10.0);
    const double e = std::exp(-20.0);
    CHECK(v.g_prime_minus_one > 0.99 / 1.99 * e);
    CHECK(v.g_prime_minus_one < 0.99 * e);
    CHECK(g_inequalities_check({1.99, 2.0}, std::vector<double>{10.0}).pass);
}

TEST_CASE("randomized relations with zero violations") {
    std::mt19937_64 rng(2024);
    std::size_t total = 0;
    for (int block = 0; block < 100; ++block) {
        const double A = oracle::uniform(rng, 1.0 + 1e-6, 2.0);
        const auto ts = random_t(rng, 100, 1e-6, 10.0);
        const auto r = g_inequalities_check({A, 2.0}, ts);
        CHECK(r.violations == 0);
        total += r.samples;
    }
    CHECK(total == 10000);
}

TEST_CASE("g sandwiches positive fields") {
    std::mt19937_64 rng(1);
    const GTransform gt{1.3, 2.0};
    for (int i = 0; i < 1000; ++i) {
        const double v = oracle::uniform(rng, 1e-6, 20.0);
        const double w = g_eval(gt, v).g;
        CHECK(w > v);
        CHECK(w < v + (gt.A - 1.0) / gt.alpha);
    }
}

TEST_CASE("g argument validation") {
    CHECK_THROWS_AS(g_eval({1.5, 2.0}, -0.1), ArgumentError);
    CHECK_THROWS_AS(g_eval({1.0, 2.0}, 1.0), ArgumentError);
    CHECK_THROWS_AS(g_eval({1.5, 0.5}, 1.0), ArgumentError);
    CHECK_THROWS_AS(g_inequalities_check({1.5, 2.0}, std::vector<double>{0.0}), ArgumentError);
}

TEST_CASE("strict margin mu") {
    const auto dom = GriddedDomain::interval(0.0, 1.0, 256);
    const GTransform gt{1.5, 2.0};
    // v = ln(delta / m) on [0.2, 0.8] is positive there
    const ScalarField d = distance_function(dom);
    const double m = 0.1;
    ScalarField v(dom);
    std::vector<std::size_t> region;
    for (std::size_t k : dom->interior_nodes()) {
        v[k] = std::log(std::max(d[k], 1e-300) / m);
        const double x = dom->coord(k).x;
        if (x >= 0.2 + 1e-12 && x <= 0.8 - 1e-12) region.push_back(k);
    }

    const auto two = VariableExponent::constant(2.0, unit);
    const auto mu_c = strict_margin_mu(gt, v, two, 2.0, region);
    const auto grad = gradient(v);
    for (std::size_t k : region) {
        const double gw = static_cast<double>(gp_direct(1.5, 2.0, v[k])) * grad[k].norm();
        CHECK(mu_c[k] == doctest::Approx((0.5 / 1.5) * gw * gw * gw * std::exp(-2.0 * v[k]) * 2.0).epsilon(1e-10));
    }

    // p = 2 + x: any lambda above sup e^{2v}/(2 + x) satisfies the proviso
    const auto p = VariableExponent::affine({2.0, 1.0}, unit);
    double sup = 0.0;
    for (std::size_t k : region) sup = std::max(sup, std::exp(2.0 * v[k]) / (2.0 + dom->coord(k).x));
    const double lambda = sup + 1.0;
    const auto mu = strict_margin_mu(gt, v, p, lambda, region);
    for (std::size_t k : region) {
        // the centred gradient of delta vanishes on the ridge x = 1/2
        if (grad[k].norm() > 0.0) CHECK(mu[k] > 0.0);
        const double gw = static_cast<double>(gp_direct(1.5, 2.0, v[k])) * grad[k].norm();
        CHECK(mu[k] == doctest::Approx((0.5 / 1.5) * gw * gw * gw * std::exp(-2.0 * v[k]) * (lambda - sup)).epsilon(1e-10));
    }
    CHECK_THROWS_AS(strict_margin_mu(gt, v, p, sup, region), PreconditionError);
    CHECK_THROWS_AS(strict_margin_mu({1.5, 3.0}, v, p, lambda, region), ArgumentError);
    CHECK_THROWS_AS(strict_margin_mu({2.5, 2.0}, v, p, lambda, region), ArgumentError);

    // default region: interior nodes with v > 0
    const auto mu_default = strict_margin_mu(gt, v, two, 2.0);
    for (std::size_t k : dom->interior_nodes()) {
        if (v[k] > 0.0 && grad[k].norm() > 0.0) CHECK(mu_default[k] > 0.0);
        if (v[k] <= 0.0) CHECK(mu_default[k] == 0.0);
    }
}

TEST_CASE("comparison condition") {
    const auto dom = GriddedDomain::interval(0.0, 1.0, 100);
    const ScalarField d = distance_function(dom);
    std::vector<std::size_t> region;
    for (std::size_t k : dom->active_nodes()) {
        const double x = dom->coord(k).x;
        if (x >= 0.3 - 1e-12 && x <= 0.7 + 1e-12) region.push_back(k);
    }
    const double m2 = 0.3;

    CHECK(comparison_condition(d, m2, VariableExponent::constant(3.0, unit), 1e-12, region));

    // u2 = m2: 3 sup |grad ln p| = 3 / 2.3 at x = 0.3
    const auto p = VariableExponent::affine({2.0, 1.0}, unit);
    const auto flat = ScalarField::from_function(dom, [](Point) { return 0.3; });
    CHECK(comparison_condition(flat, m2, p, 3.0 / 2.3 + 1e-9, region));
    CHECK_FALSE(comparison_condition(flat, m2, p, 3.0 / 2.3 - 1e-9, region));

    // direct evaluation of 3 max (delta/m2)^2 / (2 + x)
    double want = 0.0;
    for (std::size_t k : region) want = std::max(want, 3.0 * std::pow(d[k] / m2, 2) / (2.0 + dom->coord(k).x));
    CHECK(comparison_condition(d, m2, p, want * (1.0 + 1e-12), region));
    CHECK_FALSE(comparison_condition(d, m2, p, want * (1.0 - 1e-12), region));
    CHECK(comparison_condition(d, m2, p, 2.0, region) == (want <= 2.0));

    CHECK_THROWS_AS(comparison_condition(d, 0.4, p, 2.0, region), ArgumentError);
    CHECK_THROWS_AS(comparison_condition(d, 0.0, p, 2.0, region), ArgumentError);
}

TEST_CASE("box nodes") {
    const auto dom = GriddedDomain::rectangle(0, 1, 0, 1, 10);
    const std::size_t c = dom->nearest_node({0.5, 0.5});
    CHECK(box_nodes(*dom, c, 0).size() == 1);
    CHECK(box_nodes(*dom, c, 2).size() == 25);
    CHECK(box_nodes(*dom, c, 6).empty());
    const auto line = GriddedDomain::interval(0.0, 1.0, 10);
    CHECK(box_nodes(*line, 5, 3).size() == 7);
}

TEST_CASE("local uniqueness radius") {
    const auto dom = GriddedDomain::interval(0.0, 1.0, 200);
    const ScalarField d = distance_function(dom);
    const std::size_t mid = dom->nearest_node({0.5, 0.0});

    // constant p: grows until the box touches the boundary
    const auto rc = local_uniqueness_radius(d, VariableExponent::constant(2.0, unit), 2.0, mid);
    CHECK(rc.holds_at_center);
    CHECK(rc.half_width == 99);

    // steep exponent: fails immediately
    const auto steep = VariableExponent::affine({1.01, 1000.0}, unit);
    const auto rs = local_uniqueness_radius(d, steep, 2.0, mid);
    CHECK_FALSE(rs.holds_at_center);
    CHECK(rs.radius == 0.0);

    // p = 2 + x: every smaller box satisfies the condition and the next one does not
    const auto p = VariableExponent::affine({2.0, 1.0}, unit);
    const auto r = local_uniqueness_radius(d, p, 2.0, mid);
    CHECK(r.holds_at_center);
    CHECK(r.half_width > 0);
    CHECK(r.radius == doctest::Approx(r.half_width * dom->h()));
    for (int w = 0; w <= r.half_width + 1; ++w) {
        const auto nodes = box_nodes(*dom, mid, w);
        double m2 = INFINITY;
        for (std::size_t k : nodes) m2 = std::min(m2, d[k]);
        CHECK(comparison_condition(d, m2, p, 2.0, nodes) == (w <= r.half_width));
    }

    CHECK_THROWS_AS(local_uniqueness_radius(d, p, 2.0, 0), ArgumentError);
}
