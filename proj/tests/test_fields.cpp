#include "complab/fields.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace complab;
using complab::testing::Gen;
using complab::testing::pt;
using complab::testing::vt;

namespace {

RegionCoefficients scalar_region(double a, int dim, double f1 = 0.0) {
  RegionCoefficients r;
  r.A_base = isotropic_tensor(a, 1, dim);
  r.F_base = Vec::Zero(dim);
  r.F_base(0) = f1;
  return r;
}

PiecewiseField two_phase(double a0, double a1, const CompositeCube& cube) {
  return PiecewiseField(cube, {scalar_region(a0, 2), scalar_region(a1, 2)}, 1, std::min(a0, a1),
                        std::max(a0, a1), 0.25);
}

}  // namespace

TEST_CASE("ellipticity_check examples") {
  const CompositeCube flat = complab::testing::flat_two_layer();
  SUBCASE("identity") {
    const EllipticityReport r = ellipticity_check(two_phase(1.0, 1.0, flat), 500);
    CHECK(r.min_rayleigh == doctest::Approx(1.0));
    CHECK(r.max_abs_entry == doctest::Approx(1.0));
  }
  SUBCASE("two phase 1 and 10") {
    const EllipticityReport r = ellipticity_check(two_phase(1.0, 10.0, flat), 500);
    CHECK(r.min_rayleigh == doctest::Approx(1.0));
    CHECK(r.max_abs_entry == doctest::Approx(10.0));
  }
  SUBCASE("anisotropic diag(1, 4)") {
    RegionCoefficients aniso;
    aniso.A_base = Eigen::Vector2d(1.0, 4.0).asDiagonal();
    aniso.F_base = Vec::Zero(2);
    const PiecewiseField f(flat, {scalar_region(2.0, 2), aniso}, 1, 1.0, 4.0, 0.25);
    const EllipticityReport r = ellipticity_check(f, 500);
    CHECK(r.min_rayleigh == doctest::Approx(1.0));
    CHECK(r.max_abs_entry == doctest::Approx(4.0));
  }
  SUBCASE("violation names the point") {
    const PiecewiseField f(flat, {scalar_region(1.0, 2), scalar_region(0.5, 2)}, 1, 1.0, 1.0, 0.25);
    try {
      ellipticity_check(f, 200);
      FAIL("expected EllipticityViolation");
    } catch (const EllipticityViolation& e) {
      CHECK(e.point.size() == 2);
      CHECK(e.point(0) > 0.0);
    }
  }
}

TEST_CASE("min_rayleigh_quotient uses the symmetric part") {
  Eigen::MatrixXd A(2, 2);
  A << 2.0, 5.0, -5.0, 3.0;
  CHECK(min_rayleigh_quotient(A) == doctest::Approx(2.0));
  Gen g(4);
  for (int s = 0; s < 200; ++s) {
    const Tensor T = g.elliptic_tensor(2, 2, 0.3);
    const double m = min_rayleigh_quotient(T);
    const Vec z = g.vec(4, -1.0, 1.0);
    CHECK(z.dot(T * z) / z.squaredNorm() >= m - 1e-12);
    CHECK(m >= 0.3 - 1e-12);
  }
}

TEST_CASE("freeze_piecewise") {
  const CompositeCube flat = complab::testing::flat_two_layer();
  SUBCASE("piecewise-constant field is unchanged and freezing is idempotent") {
    const PiecewiseField f = two_phase(1.0, 3.0, flat);
    const PiecewiseField frozen = freeze_piecewise(f, {pt({-0.5, 0.0}), pt({0.5, 0.0})});
    const CoefficientDefect d = coefficient_defect(f, frozen);
    CHECK(d.A_sup[0] == 0.0);
    CHECK(d.A_sup[1] == 0.0);
    const PiecewiseField again = freeze_piecewise(frozen, {pt({-0.2, 0.3}), pt({0.7, -0.4})});
    CHECK(coefficient_defect(frozen, again).A_sup[1] == 0.0);
  }
  SUBCASE("linear coefficient on a unit-diameter slab") {
    const CompositeCube one(pt({0.0, 0.0}), 0.5, {GraphFunction::constant(1, -1.0), GraphFunction::constant(1, 1.0)},
                            1.0);
    RegionCoefficients r = scalar_region(1.0, 2);
    r.A_profile = ScalarProfile::affine(1.0, vt({0.1, 0.0}), pt({0.0, 0.0}));
    const PiecewiseField f(one, {r}, 1, 0.9, 1.1, 0.25);
    const PiecewiseField frozen = freeze_piecewise(f, {pt({0.0, 0.0})});
    const CoefficientDefect d = coefficient_defect(f, frozen, 65);
    CHECK(d.A_sup[0] == doctest::Approx(0.05));
    CHECK(d.F_sup[0] == 0.0);
  }
  SUBCASE("anchor outside its region") {
    const PiecewiseField f = two_phase(1.0, 3.0, flat);
    CHECK_THROWS(freeze_piecewise(f, {pt({0.5, 0.0}), pt({0.5, 0.0})}));
  }
}

TEST_CASE("property: frozen defect within the declared Holder bound") {
  Gen g(8);
  const CompositeCube cube = complab::testing::parabola_cube(0.5);
  for (int trial = 0; trial < 25; ++trial) {
    RegionCoefficients lower = scalar_region(g.uniform(1.0, 2.0), 2);
    lower.A_profile = ScalarProfile::holder_bump(1.0, g.uniform(0.0, 0.2), g.point_in(pt({-0.5, 0.0}), 0.3), 0.25);
    RegionCoefficients upper = scalar_region(g.uniform(2.0, 4.0), 2, g.uniform(-1.0, 1.0));
    upper.A_profile = ScalarProfile::affine(1.0, g.vec(2, -0.1, 0.1), pt({0.5, 0.0}));
    upper.F_profile = ScalarProfile::affine(1.0, g.vec(2, -0.2, 0.2), pt({0.5, 0.0}));
    const PiecewiseField f(cube, {lower, upper}, 1, 0.5, 6.0, 0.25);
    const PiecewiseField frozen = freeze_piecewise(f, {pt({-0.6, 0.1}), pt({0.6, -0.1})});
    const CoefficientDefect d = coefficient_defect(f, frozen, 49);
    const double diameter = 2.0 * std::sqrt(2.0);
    for (int k = 0; k < 2; ++k) {
      CHECK(d.A_sup[static_cast<std::size_t>(k)] <= f.A_seminorm(k) * std::pow(diameter, 0.25) + 1e-12);
      CHECK(d.F_sup[static_cast<std::size_t>(k)] <= f.F_seminorm(k) * std::pow(diameter, 0.25) + 1e-12);
    }
  }
}

TEST_CASE("declared seminorms bound sampled Holder quotients") {
  Gen g(17);
  const CompositeCube cube = complab::testing::flat_two_layer();
  RegionCoefficients bump = scalar_region(1.0, 2);
  bump.A_profile = ScalarProfile::holder_bump(1.0, 0.3, pt({-0.5, 0.2}), 0.25);
  RegionCoefficients lin = scalar_region(2.0, 2);
  lin.A_profile = ScalarProfile::affine(1.0, vt({0.2, -0.1}), pt({0.5, 0.0}));
  const PiecewiseField f(cube, {bump, lin}, 1, 0.5, 4.0, 0.25);
  std::vector<Point> pts;
  std::vector<Vec> vals;
  std::vector<int> mask;
  for (int s = 0; s < 1500; ++s) {
    const Point x = g.point_in(cube.center(), 1.0);
    pts.push_back(x);
    vals.push_back(Vec::Constant(1, f.A(x)(0, 0)));
    mask.push_back(f.region_of(x));
  }
  for (int k = 0; k < 2; ++k) {
    const double est = holder_seminorm_estimate(pts, vals, mask, k, 0.25);
    CHECK(est <= f.A_seminorm(k) * 1.01);
    CHECK(est > 0.0);
  }
}

TEST_CASE("holder_seminorm_estimate examples") {
  std::vector<Point> pts;
  std::vector<Vec> constant, power, linear;
  std::vector<int> mask;
  for (int i = 0; i <= 400; ++i) {
    const double x = i / 400.0;
    pts.push_back(pt({x, 0.0}));
    constant.push_back(Vec::Constant(1, 3.0));
    power.push_back(Vec::Constant(1, std::pow(x, 0.25)));
    linear.push_back(Vec::Constant(1, 2.5 * x - 1.0));
    mask.push_back(0);
  }
  CHECK(holder_seminorm_estimate(pts, constant, mask, 0, 0.25) == 0.0);
  CHECK(holder_seminorm_estimate(pts, power, mask, 0, 0.25) == doctest::Approx(1.0).epsilon(0.05));
  CHECK(holder_seminorm_estimate(pts, linear, mask, 0, 1.0) == doctest::Approx(2.5));
  CHECK_THROWS(holder_seminorm_estimate(pts, linear, mask, 1, 1.0));
}

TEST_CASE("laminate_substitute examples") {
  SUBCASE("flat interfaces are already a laminate") {
    const PiecewiseField f = two_phase(1.0, 5.0, complab::testing::flat_two_layer(0.1));
    const LaminateSubstitution s = laminate_substitute(f, pt({0.0, 0.0}), 0.5, 1.0, 1.0, 128);
    CHECK(s.mismatch_measure == 0.0);
    CHECK(s.laminate.layer_A(1)(0, 0) == 5.0);
  }
  SUBCASE("single tilted interface obeys the slab bound") {
    const double slope = 0.2;
    const CompositeCube cube(pt({0.0, 0.0}), 1.0,
                             {GraphFunction::constant(1, -2.0), GraphFunction::affine(0.05, vt({slope})),
                              GraphFunction::constant(1, 2.0)},
                             1.0);
    const PiecewiseField f = two_phase(1.0, 5.0, cube);
    for (double theta : {0.5, 0.25}) {
      const LaminateSubstitution s = laminate_substitute(f, pt({0.0, 0.0}), theta, 1.0, 1.0, 256);
      CHECK(s.mismatch_measure > 0.0);
      CHECK(s.mismatch_measure <= 2.0 * slope * theta * 2.0 * theta);
    }
  }
  SUBCASE("empty region contributes nothing") {
    const CompositeCube cube(pt({0.0, 0.0}), 1.0,
                             {GraphFunction::constant(1, -2.0), GraphFunction::constant(1, 0.6),
                              GraphFunction::constant(1, 0.8), GraphFunction::constant(1, 2.0)},
                             1.0);
    const PiecewiseField f(cube, {scalar_region(1.0, 2), scalar_region(7.0, 2), scalar_region(2.0, 2)}, 1, 1.0, 7.0,
                           0.25);
    const LaminateSubstitution s = laminate_substitute(f, pt({0.0, 0.0}), 0.25, 1.0, 1.0, 128);
    CHECK(s.mismatch_measure == 0.0);
  }
}

TEST_CASE("laminate mismatch ratio stays bounded as theta halves") {
  const PiecewiseField f = two_phase(1.0, 10.0, complab::testing::parabola_cube());
  double first = 0.0, worst = 0.0;
  for (double theta : {0.5, 0.25, 0.125, 0.0625}) {
    const LaminateSubstitution s = laminate_substitute(f, pt({0.0, 0.0}), theta, 1.0, 1.0, 256);
    CHECK(s.ratio > 0.0);
    if (first == 0.0) first = s.ratio;
    worst = std::max(worst, s.ratio);
  }
  CHECK(worst <= 2.0 * first);
}

TEST_CASE("laminate load is bounded by the original load") {
  Gen g(23);
  for (int trial = 0; trial < 10; ++trial) {
    const CompositeCube cube(pt({0.0, 0.0}), 1.0,
                             {GraphFunction::constant(1, -2.0), GraphFunction::parabola(1, g.uniform(-0.3, 0.0), 0.2),
                              GraphFunction::sinusoid(1, g.uniform(0.4, 0.6), 0.1, 2.0),
                              GraphFunction::constant(1, 2.0)},
                             1.0);
    const PiecewiseField f(cube,
                           {scalar_region(1.0, 2, g.uniform(-2.0, 2.0)), scalar_region(3.0, 2, g.uniform(-2.0, 2.0)),
                            scalar_region(2.0, 2, g.uniform(-2.0, 2.0))},
                           1, 1.0, 3.0, 0.25);
    const LaminateSubstitution s = laminate_substitute(f, g.point_in(pt({0.0, 0.0}), 0.3), 0.4, 1.0, 1.0, 64);
    double F_sup = 0.0, Fbar_sup = 0.0;
    for (int k = 0; k < 3; ++k) F_sup = std::max(F_sup, f.region(k).F_base.cwiseAbs().maxCoeff());
    for (int k = 0; k < s.laminate.layer_count(); ++k)
      Fbar_sup = std::max(Fbar_sup, s.laminate.layer_F(k).cwiseAbs().maxCoeff());
    CHECK(Fbar_sup <= F_sup);
  }
}

TEST_CASE("LaminateField layers") {
  const LaminateField lam(2, 1, {-INFINITY, 0.0, INFINITY}, {isotropic_tensor(1.0, 1, 2), isotropic_tensor(2.0, 1, 2)},
                          {Vec::Zero(2), Vec::Zero(2)}, 1.0, 2.0, {pt({0.0, 0.0}), 1.0});
  CHECK(lam.layer_of(-0.5) == 0);
  CHECK(lam.layer_of(0.0) == 0);
  CHECK(lam.layer_of(1e-12) == 1);
  CHECK(lam.A(pt({0.3, -0.9}))(1, 1) == 2.0);
}
