#include "complab/geometry.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace complab;
using complab::testing::Gen;
using complab::testing::pt;
using complab::testing::vt;

TEST_CASE("classify_region follows the half-open convention") {
  const CompositeCube flat = complab::testing::flat_two_layer();
  CHECK(classify_region(flat, pt({-0.5, 0.3})) == 0);
  CHECK(classify_region(flat, pt({0.5, 0.3})) == 1);
  // on the graph: the region below
  CHECK(classify_region(flat, pt({0.0, 0.3})) == 0);

  const CompositeCube para = complab::testing::parabola_cube();
  CHECK(classify_region(para, pt({0.25, 0.4})) == 1);
  CHECK(classify_region(para, pt({0.1, 0.4})) == 0);
  CHECK(classify_region(para, pt({0.16, 0.4})) == 0);

  CHECK_THROWS_AS(classify_region(flat, pt({1.5, 0.0})), DomainError);
}

TEST_CASE("every sampled point lands in exactly one region") {
  const CompositeCube cube(pt({0.0, 0.0}), 1.0,
                           {GraphFunction::constant(1, -2.0), GraphFunction::sinusoid(1, -0.3, 0.2, 3.0),
                            GraphFunction::parabola(1, 0.2, 0.5), GraphFunction::constant(1, 2.0)},
                           1.0);
  Gen g(11);
  for (int s = 0; s < 2000; ++s) {
    const Point x = g.point_in(cube.center(), 1.0);
    const int k = classify_region(cube, x);
    REQUIRE(k >= 0);
    REQUIRE(k < cube.region_count());
    const double lo = cube.graph(k).value(tangential(x));
    const double hi = cube.graph(k + 1).value(tangential(x));
    CHECK(lo < x(0));
    CHECK(x(0) <= hi);
  }
}

TEST_CASE("interpolation_parameter") {
  const CompositeCube cube(pt({0.0, 0.0}), 1.0,
                           {GraphFunction::constant(1, -2.0), GraphFunction::constant(1, 0.0),
                            GraphFunction::constant(1, 1.0), GraphFunction::constant(1, 2.0)},
                           1.0);
  CHECK(interpolation_parameter(cube, pt({0.25, 0.1})) == doctest::Approx(0.25));
  CHECK(interpolation_parameter(cube, pt({1.0, 0.1})) == doctest::Approx(1.0));
  // x1 on the lower graph of region 1 belongs to region 0, where it is the upper end
  CHECK(interpolation_parameter(cube, pt({0.0, 0.1})) == doctest::Approx(1.0));
  CHECK(interpolation_parameter(cube, pt({1e-300, 0.1})) == doctest::Approx(0.0));
}

TEST_CASE("interpolation_parameter rejects touching graphs") {
  const CompositeCube cube(pt({0.0, 0.0}), 1.0,
                           {GraphFunction::constant(1, -2.0), GraphFunction::constant(1, -0.2),
                            GraphFunction::parabola(1, -0.2, 1.0), GraphFunction::constant(1, 2.0)},
                           1.0);
  // at x' = 0 region 1 is empty, so the touching point itself belongs to region 0
  CHECK(interpolation_parameter(cube, pt({-0.2, 0.0})) == doctest::Approx(1.0));
  const double xt = 1e-8;
  const Point thin = pt({cube.graph(2).value(vt({xt})), xt});
  REQUIRE(classify_region(cube, thin) == 1);
  CHECK_THROWS_AS(interpolation_parameter(cube, thin), DegenerateThickness);
  CHECK_THROWS_AS(flow_derivative(cube, thin), DegenerateThickness);
  CHECK_NOTHROW(flow_derivative(cube, pt({-0.1, 0.5})));
}

TEST_CASE("flow_derivative examples") {
  SUBCASE("constant graphs give pi' = 0") {
    const CompositeCube flat = complab::testing::flat_two_layer(0.3);
    const FlowDerivativeSample s = flow_derivative(flat, pt({0.1, -0.7}));
    CHECK(s.pi(0) == -1.0);
    CHECK(s.pi(1) == 0.0);
  }
  SUBCASE("on a graph pi' equals the graph gradient") {
    const CompositeCube para = complab::testing::parabola_cube();
    const double xt = 0.6;
    const FlowDerivativeSample s = flow_derivative(para, pt({xt * xt, xt}));
    CHECK(s.pi(1) == doctest::Approx(2.0 * xt).epsilon(1e-14));
  }
  SUBCASE("halfway between phi = 0 and phi = x'") {
    const CompositeCube cube(pt({0.0, 0.5}), 0.5,
                             {GraphFunction::constant(1, -2.0), GraphFunction::constant(1, 0.0),
                              GraphFunction::affine(0.0, vt({1.0})), GraphFunction::constant(1, 2.0)},
                             1.0);
    const FlowDerivativeSample s = flow_derivative(cube, pt({0.25, 0.5}));
    CHECK(s.region == 1);
    CHECK(s.pi(0) == -1.0);
    CHECK(s.pi(1) == doctest::Approx(0.5));
  }
}

TEST_CASE("property: pi_1 = -1 and T in [0, 1] with pi' a convex combination") {
  Gen g(3);
  for (int trial = 0; trial < 20; ++trial) {
    const double a = g.uniform(0.1, 0.6);
    const double shift = g.uniform(-0.3, 0.3);
    const CompositeCube cube(pt({0.0, 0.0, 0.0}), 1.0,
                             {GraphFunction::constant(2, -2.0), GraphFunction::sinusoid(2, shift - 0.2, 0.1, 2.0),
                              GraphFunction::parabola(2, shift + 0.3, a, vt({0.1, -0.2})),
                              GraphFunction::constant(2, 2.0)},
                             1.0);
    for (int s = 0; s < 200; ++s) {
      const Point x = g.point_in(cube.center(), 1.0);
      const FlowDerivativeSample f = flow_derivative(cube, x);
      REQUIRE(f.pi(0) == -1.0);
      const double t = interpolation_parameter(cube, x);
      CHECK(t >= 0.0);
      CHECK(t <= 1.0);
      const Vec lo = cube.graph(f.region).gradient(tangential(x));
      const Vec hi = cube.graph(f.region + 1).gradient(tangential(x));
      for (int a2 = 0; a2 < 2; ++a2) {
        CHECK(f.pi(1 + a2) >= std::min(lo(a2), hi(a2)) - 1e-14);
        CHECK(f.pi(1 + a2) <= std::max(lo(a2), hi(a2)) + 1e-14);
      }
    }
  }
}

TEST_CASE("pi' is continuous across an interface") {
  const CompositeCube cube(pt({0.0, 0.0}), 1.0,
                           {GraphFunction::constant(1, -1.5), GraphFunction::parabola(1, 0.0, 0.8),
                            GraphFunction::sinusoid(1, 1.3, 0.1, 2.0), GraphFunction::constant(1, 2.0)},
                           1.0);
  const double xt = 0.45;
  const double y = 0.8 * xt * xt;
  for (double d : {1e-3, 1e-5, 1e-7}) {
    const double below = flow_derivative(cube, pt({y - d, xt})).pi(1);
    const double above = flow_derivative(cube, pt({y + d, xt})).pi(1);
    CHECK(std::abs(above - below) < 10.0 * d);
  }
}

TEST_CASE("graph seminorm metadata matches dense sampling") {
  const TangentialBox box{vt({0.0}), 1.0};
  const std::vector<GraphFunction> graphs = {
      GraphFunction::parabola(1, 0.0, 0.7), GraphFunction::sinusoid(1, 0.0, 0.3, 1.2),
      GraphFunction::affine(0.0, vt({0.4}))};
  for (const GraphFunction& gph : graphs) {
    const double closed = gph.gradient_seminorm(box, 1.0);
    const double sampled = sampled_gradient_seminorm(gph, box, 1.0, 2001);
    if (closed == 0.0) {
      CHECK(sampled == 0.0);
    } else {
      CHECK(sampled <= closed * (1.0 + 1e-12));
      CHECK(sampled >= 0.99 * closed);
    }
  }
  const GraphFunction p2 = GraphFunction::parabola(1, 0.0, 1.0, 0.5);
  const double closed = p2.gradient_seminorm(box, 0.5);
  const double sampled = sampled_gradient_seminorm(p2, box, 0.5, 2001);
  CHECK(sampled <= closed * (1.0 + 1e-12));
  CHECK(sampled >= 0.99 * closed);
}

TEST_CASE("noncross_bound_check examples") {
  const GraphFunction zero = GraphFunction::constant(1, 0.0);
  SUBCASE("identical graphs") {
    const NoncrossReport r = noncross_bound_check(zero, zero, 1.0, 1.0, 1.0);
    CHECK(r.max_violation == 0.0);
  }
  SUBCASE("flat below a parabola") {
    const GraphFunction para = GraphFunction::parabola(1, 0.0, 1.0);
    const NoncrossReport r = noncross_bound_check(zero, para, 1.0, 1.0, 1.0);
    CHECK(r.c1 == doctest::Approx(2.0));
    CHECK(r.c2 == doctest::Approx(4.0));
    CHECK(r.max_violation <= 0.0);
    // LHS 2|x'| against RHS >= 3 sqrt(2) |x'|
    CHECK(r.max_ratio <= 2.0 / (3.0 * std::sqrt(2.0)) + 1e-12);
  }
  SUBCASE("touching sinusoids") {
    for (double eps : {1e-1, 1e-3}) {
      const GraphFunction lo = GraphFunction::sinusoid(1, 0.2, 0.3, 1.0);
      const GraphFunction hi = GraphFunction::sinusoid(1, 0.2 + eps, 0.3 + eps, 1.0);
      const NoncrossReport r = noncross_bound_check(lo, hi, 1.0, 1.0, 1.0);
      CHECK(r.max_violation <= 0.0);
    }
  }
  SUBCASE("crossing graphs") {
    CHECK_THROWS_AS(noncross_bound_check(GraphFunction::affine(0.0, vt({1.0})), zero, 1.0, 1.0, 1.0),
                    OrderingViolation);
  }
}

TEST_CASE("mu_of_gamma") {
  CHECK(mu_of_gamma(1.0) == 0.25);
  CHECK(mu_of_gamma(0.5) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  CHECK(mu_of_gamma(1e-12) < 1e-12);
  CHECK_THROWS(mu_of_gamma(0.0));
  CHECK_THROWS(mu_of_gamma(1.5));
}

TEST_CASE("kappa_constant") {
  CHECK(kappa_constant(complab::testing::flat_two_layer(), 0.0, 1.0) == doctest::Approx(36.0));
  const CompositeCube flat3(pt({0.0, 0.0, 0.0}), 1.0,
                            {GraphFunction::constant(2, -2.0), GraphFunction::constant(2, 0.0),
                             GraphFunction::constant(2, 2.0)},
                            1.0);
  CHECK(kappa_constant(flat3, 0.0, 1.0) == doctest::Approx(54.0));
  // sup |D phi| = 1 and [D phi]_{C^1} = 1 for cos(x') on Q'_3
  const CompositeCube wavy(pt({0.0, 0.0}), 1.0,
                           {GraphFunction::constant(1, -3.0), GraphFunction::sinusoid(1, 0.0, 1.0, 1.0),
                            GraphFunction::constant(1, 3.0)},
                           1.0);
  CHECK(kappa_constant(wavy, 0.0, 1.0) == doctest::Approx(108.0));
  // coefficient term R^{2 mu} [A]^2
  CHECK(kappa_constant(complab::testing::flat_two_layer(), 2.0, 1.0) == doctest::Approx(40.0));
}

TEST_CASE("pi_holder_check") {
  SUBCASE("flat graphs") {
    const PiHolderReport r = pi_holder_check(complab::testing::flat_two_layer(), 36.0, 1.0, 500, 5);
    CHECK(r.fitted_constant == 0.0);
  }
  SUBCASE("single affine interface") {
    const CompositeCube cube(pt({0.0, 0.0}), 1.0,
                             {GraphFunction::affine(-3.0, vt({0.3})), GraphFunction::affine(0.1, vt({0.3})),
                              GraphFunction::affine(3.0, vt({0.3}))},
                             1.0);
    const PiHolderReport r = pi_holder_check(cube, 50.0, 1.0, 500, 5);
    CHECK(r.fitted_constant == doctest::Approx(0.0).epsilon(1e-14));
  }
  SUBCASE("parabola between flat graphs") {
    const CompositeCube cube = complab::testing::parabola_cube();
    const double kappa = kappa_constant(cube, 0.0, 1.0);
    const PiHolderReport r = pi_holder_check(cube, kappa, 1.0, 10000, 9);
    CHECK(std::isfinite(r.fitted_constant));
    CHECK(r.fitted_constant > 0.0);
    CHECK(r.exponent_ok);
    CHECK(r.stable);
    CHECK(r.pairs == 10000);
  }
}

TEST_CASE("property: scaling invariance of the non-crossing ratio and pi Holder ratios") {
  const CompositeCube cube(pt({0.0, 0.0}), 1.0,
                           {GraphFunction::constant(1, -2.0), GraphFunction::parabola(1, -0.1, 0.6),
                            GraphFunction::sinusoid(1, 0.7, 0.1, 2.0), GraphFunction::constant(1, 2.0)},
                           1.0);
  const double kappa = kappa_constant(cube, 0.0, 1.0);
  const PiHolderReport base = pi_holder_check(cube, kappa, 1.0, 300, 21);
  const NoncrossReport nc = noncross_bound_check(cube.graph(1), cube.graph(2), 0.5, 0.5, 1.0, vt({0.0}), 257);
  for (double s : {0.5, 2.0}) {
    const CompositeCube scaled = cube.scaled(s);
    const PiHolderReport r = pi_holder_check(scaled, kappa, s, 300, 21);
    REQUIRE(r.ratios.size() == base.ratios.size());
    for (std::size_t i = 0; i < r.ratios.size(); ++i)
      CHECK(r.ratios[i] == doctest::Approx(base.ratios[i]).epsilon(1e-12));
    const NoncrossReport ns =
        noncross_bound_check(scaled.graph(1), scaled.graph(2), 0.5 * s, 0.5 * s, 1.0, vt({0.0}), 257);
    CHECK(ns.max_ratio == doctest::Approx(nc.max_ratio).epsilon(1e-12));
  }
}

TEST_CASE("minimum condition and construction errors") {
  CHECK(complab::testing::parabola_cube().satisfies_minimum_condition(1.0));
  const CompositeCube far(pt({0.0, 0.0}), 1.0,
                          {GraphFunction::constant(1, -9.0), GraphFunction::constant(1, 0.0),
                           GraphFunction::constant(1, 9.0)},
                          1.0);
  CHECK_FALSE(far.satisfies_minimum_condition(1.0));
  CHECK_THROWS_AS(CompositeCube(pt({0.0, 0.0}), 1.0,
                                {GraphFunction::constant(1, 0.5), GraphFunction::constant(1, -0.5)}, 1.0),
                  OrderingViolation);
}
