#include "complab/analysis.hpp"
#include "complab/oracle.hpp"
#include "complab/transform.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace complab;
using complab::testing::Gen;
using complab::testing::pt;
using complab::testing::vt;

namespace {

std::shared_ptr<PiecewiseField> two_phase(const CompositeCube& cube, double a0, double a1, double f0 = 0.0) {
  RegionCoefficients r0, r1;
  r0.A_base = isotropic_tensor(a0, 1, cube.dim());
  r1.A_base = isotropic_tensor(a1, 1, cube.dim());
  r0.F_base = Vec::Zero(cube.dim());
  r0.F_base(0) = f0;
  r1.F_base = Vec::Zero(cube.dim());
  return std::make_shared<PiecewiseField>(cube, std::vector<RegionCoefficients>{r0, r1}, 1, std::min(a0, a1),
                                          std::max(a0, a1), 0.25);
}

}  // namespace

TEST_CASE("LinearTransform round trip and Jacobian") {
  Gen g(12);
  for (int s = 0; s < 200; ++s) {
    const int n = g.integer(2, 3);
    const LinearTransform t(g.point_in(Point::Zero(n), 1.0), g.vec(n - 1, -2.0, 2.0));
    const Point x = g.point_in(Point::Zero(n), 1.0);
    CHECK((t.inverse(t.forward(x)) - x).norm() <= 1e-14);
    CHECK((t.forward(t.inverse(x)) - x).norm() <= 1e-14);
    const Eigen::MatrixXd J = t.jacobian();
    CHECK(J.determinant() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(t.determinant() == 1.0);
    CHECK((J * t.inverse_jacobian() - Eigen::MatrixXd::Identity(n, n)).norm() <= 1e-14);
    // forward is affine with this Jacobian
    const Point x2 = g.point_in(Point::Zero(n), 1.0);
    CHECK((t.forward(x2) - t.forward(x) - J * (x2 - x)).norm() <= 1e-14);
  }
}

TEST_CASE("push_tensor examples") {
  const Tensor A = isotropic_tensor(1.0, 1, 2);
  SUBCASE("zero slope is a translation") {
    const LinearTransform t(pt({0.3, -0.2}), vt({0.0}));
    Gen g(1);
    const Tensor B = g.elliptic_tensor(2, 2);
    CHECK((push_tensor(B, t.jacobian(), 2) - B).norm() == 0.0);
  }
  SUBCASE("identity tensor with slope s") {
    const double s = 0.7;
    const LinearTransform t(pt({0.0, 0.0}), vt({s}));
    Eigen::MatrixXd expect(2, 2);
    expect << 1.0 + s * s, -s, -s, 1.0;
    CHECK((push_tensor(A, t.jacobian(), 1) - expect).norm() <= 1e-15);
  }
}

TEST_CASE("property: transformed load and ellipticity bounds") {
  Gen g(13);
  for (int s = 0; s < 300; ++s) {
    const int n = g.integer(2, 3), N = g.integer(1, 2);
    const LinearTransform t(Point::Zero(n), g.vec(n - 1, -1.5, 1.5));
    const Vec F = g.vec(N * n, -1.0, 1.0);
    const Vec G = push_load(F, t.jacobian(), N);
    const double p1 = t.slope().cwiseAbs().sum();
    CHECK(G.cwiseAbs().maxCoeff() <= F.cwiseAbs().maxCoeff() * (1.0 + p1) + 1e-14);

    const Tensor A = g.elliptic_tensor(N, n, 0.5);
    const Tensor At = push_tensor(A, t.jacobian(), N);
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(t.jacobian());
    const double smin = svd.singularValues().minCoeff();
    CHECK(min_rayleigh_quotient(At) >= min_rayleigh_quotient(A) * smin * smin - 1e-12);
    CHECK(At.cwiseAbs().maxCoeff() <= A.cwiseAbs().maxCoeff() * (1.0 + p1) * (1.0 + p1) + 1e-12);
  }
}

TEST_CASE("TransformedField samples the original field through Phi") {
  const CompositeCube cube = complab::testing::parabola_cube();
  const auto f = two_phase(cube, 1.0, 10.0, 0.5);
  const LinearTransform t = LinearTransform::at(cube, pt({0.09, 0.3}));
  CHECK(t.slope()(0) == doctest::Approx(0.6));
  const double delta = inscribed_factor(cube);
  const TransformedField tf(f, t, 0.5 * delta);
  Gen g(3);
  for (int s = 0; s < 200; ++s) {
    const Point y = g.point_in(Point::Zero(2), 0.5 * delta);
    const Point x = t.inverse(y);
    CHECK((tf.A(y) - push_tensor(f->A(x), t.jacobian(), 1)).norm() <= 1e-14);
    CHECK((tf.F(y) - push_load(f->F(x), t.jacobian(), 1)).norm() <= 1e-14);
  }
  CHECK_NOTHROW(ellipticity_check(tf, 500));
}

TEST_CASE("inscribed cube lies in the image of the original cube") {
  Gen g(14);
  const std::vector<CompositeCube> cubes = {
      complab::testing::parabola_cube(),
      CompositeCube(pt({0.0, 0.0}), 1.0,
                    {GraphFunction::constant(1, -2.0), GraphFunction::sinusoid(1, 0.0, 0.2, 3.0),
                     GraphFunction::constant(1, 2.0)},
                    1.0)};
  for (const CompositeCube& cube : cubes) {
    const double delta = inscribed_factor(cube);
    for (int s = 0; s < 50; ++s) {
      const Point z = g.point_in(cube.center(), 0.5);
      const double rho = 0.5;
      const LinearTransform t = LinearTransform::at(cube, z);
      for (int k = 0; k < 200; ++k) {
        const Point y = g.point_in(Point::Zero(2), delta * rho);
        CHECK((t.inverse(y) - z).cwiseAbs().maxCoeff() <= rho + 1e-12);
      }
    }
  }
}

TEST_CASE("transformed flow") {
  SUBCASE("flat graphs give pi~' = 0") {
    const CompositeCube flat = complab::testing::flat_two_layer(0.2);
    const LinearTransform t = LinearTransform::at(flat, pt({0.3, 0.1}));
    for (const Point& y : {pt({0.0, 0.0}), pt({0.2, -0.3}), pt({-0.5, 0.4})})
      CHECK(transformed_flow(flat, t, y).pi(1) == 0.0);
  }
  SUBCASE("pi~'(0) vanishes and the identity holds on the parabola") {
    const CompositeCube cube = complab::testing::parabola_cube();
    const Point z = pt({0.25, 0.5});  // on the graph
    const LinearTransform t = LinearTransform::at(cube, z);
    CHECK(std::abs(transformed_flow(cube, t, Point::Zero(2)).pi(1)) <= 1e-12);
    const Vec pz = flow_derivative(cube, z).tangential_part();
    Gen g(15);
    int checked = 0;
    while (checked < 1000) {
      const Point x = g.point_in(cube.center(), 1.0);
      const Point y = t.forward(x);
      const FlowDerivativeSample s = transformed_flow(cube, t, y);
      CHECK(s.pi(0) == -1.0);
      CHECK((s.tangential_part() - (flow_derivative(cube, x).tangential_part() - pz)).norm() <= 1e-12);
      ++checked;
    }
  }
  SUBCASE("points outside the image are rejected") {
    const CompositeCube cube = complab::testing::parabola_cube();
    const LinearTransform t = LinearTransform::at(cube, pt({0.0, 0.0}));
    CHECK_THROWS_AS(transformed_flow(cube, t, pt({3.0, 0.0})), DomainError);
  }
}

TEST_CASE("decay_after_transform") {
  const std::vector<double> radii{0.4, 0.2, 0.1, 0.05};
  SUBCASE("flat graphs") {
    const CompositeCube flat = complab::testing::flat_two_layer();
    const TransformDecayReport r = decay_after_transform(flat, LinearTransform::at(flat, pt({0.0, 0.0})), 36.0, 1.0, radii);
    for (double m : r.maxima) CHECK(m == 0.0);
    CHECK(r.bounded);
  }
  SUBCASE("affine graphs") {
    const CompositeCube cube(pt({0.0, 0.0}), 1.0,
                             {GraphFunction::affine(-2.0, vt({0.1})), GraphFunction::affine(0.0, vt({0.5})),
                              GraphFunction::affine(2.0, vt({-0.2}))},
                             1.0);
    const double kappa = kappa_constant(cube, 0.0, 1.0);
    const TransformDecayReport r = decay_after_transform(cube, LinearTransform::at(cube, pt({0.1, 0.2})), kappa, 1.0, radii);
    CHECK(std::isfinite(r.max_ratio));
    CHECK(r.max_ratio > 0.0);
    CHECK(r.ratio_over_kappa < 1.0);
  }
  SUBCASE("parabola") {
    const CompositeCube cube = complab::testing::parabola_cube();
    const double kappa = kappa_constant(cube, 0.0, 1.0);
    for (const Point& z : {pt({0.0, 0.0}), pt({0.25, 0.5}), pt({-0.3, 0.2})}) {
      const TransformDecayReport r = decay_after_transform(cube, LinearTransform::at(cube, z), kappa, 1.0, radii);
      CHECK(r.bounded);
      CHECK(r.max_growth <= 2.0);
      CHECK(r.ratio_over_kappa < 1.0);
    }
  }
}

TEST_CASE("transformed W equals the frozen U pointwise") {
  Gen g(16);
  for (int s = 0; s < 500; ++s) {
    const int n = g.integer(2, 3), N = g.integer(1, 2);
    const LinearTransform t(Point::Zero(n), g.vec(n - 1, -1.0, 1.0));
    const Tensor A = g.elliptic_tensor(N, n);
    const Vec F = g.vec(N * n, -1.0, 1.0);
    const Vec Du = g.vec(N * n, -2.0, 2.0);
    // Dv = Du dx/dy per component
    Vec Dv(N * n);
    for (int i = 0; i < N; ++i)
      Dv.segment(i * n, n) = t.inverse_jacobian().transpose() * Du.segment(i * n, n);
    Vec pi(n);
    pi(0) = -1.0;
    pi.tail(n - 1) = t.slope();
    const Vec W = compute_W_point(push_tensor(A, t.jacobian(), N), push_load(F, t.jacobian(), N), Dv, N);
    CHECK((W - compute_U_point(A, F, pi, Du, N)).norm() <= 1e-12 * (1.0 + W.norm()));
  }
}

TEST_CASE("solving in transformed coordinates matches the original problem") {
  const CompositeCube cube = complab::testing::parabola_cube();
  const auto f = two_phase(cube, 1.0, 4.0, 0.3);
  Eigen::MatrixXd slope(1, 2);
  slope << 1.0, 0.5;
  const BoundaryData g = BoundaryData::affine(Vec::Zero(1), slope);
  const DiscreteSolution fine = assemble_and_solve(*f, StructuredGrid(pt({0.0, 0.0}), 1.0, 256), g, {1e-12});

  const Point z = pt({0.16, 0.4});
  const LinearTransform t = LinearTransform::at(cube, z);
  const double half = 0.5 * inscribed_factor(cube);
  const auto tf = std::make_shared<TransformedField>(f, t, half);
  auto pulled = [&](const Point& y) { return fine.value_at(t.inverse(y)); };

  const int m = 16;
  const DiscreteSolution v = assemble_and_solve(*tf, StructuredGrid(Point::Zero(2), half, m),
                                                BoundaryData::function(pulled, "pulled back"), {1e-12});
  // the same resolution in x coordinates, on the cube around z
  const DiscreteSolution u = assemble_and_solve(*f, StructuredGrid(pt({0.0, 0.0}), 1.0, static_cast<int>(m / half)), g,
                                                {1e-12});
  double v_err = 0.0, u_err = 0.0;
  for (std::size_t n = 0; n < v.grid().node_count(); ++n) {
    const Point y = v.grid().node_point(n);
    v_err = std::max(v_err, std::abs(v.node_value(n)(0) - pulled(y)(0)));
    const Point x = t.inverse(y);
    u_err = std::max(u_err, std::abs(u.value_at(x)(0) - fine.value_at(x)(0)));
  }
  CHECK(v_err <= 5.0 * u_err + 1e-8);
}
