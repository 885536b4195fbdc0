#include "complab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace complab {

Vec compute_U_point(const Tensor& A, const Vec& F, const Vec& pi, const Vec& Du, int components) {
  const int n = static_cast<int>(pi.size());
  const Vec flux = A * Du - F;
  Vec U(components * n);
  for (int i = 0; i < components; ++i) {
    U(i * n) = pi.dot(flux.segment(i * n, n));
    for (int b = 1; b < n; ++b) U(i * n + b) = Du(i * n + b) + pi(b) * Du(i * n);
  }
  return U;
}

std::vector<Vec> compute_U(const DiscreteSolution& solution, const CoefficientField& field, const CompositeCube& cube,
                           const std::vector<Point>& points) {
  std::vector<Vec> out;
  out.reserve(points.size());
  for (const Point& x : points)
    out.push_back(compute_U_point(field.A(x), field.F(x), flow_derivative(cube, x).pi, solution.gradient_at(x),
                                  field.components()));
  return out;
}

Vec cell_U(const DiscreteSolution& solution, const CoefficientField& field, const CompositeCube& cube,
           std::size_t element) {
  const StructuredGrid& grid = solution.grid();
  const int n = grid.dim();
  std::vector<double> gx, gw;
  gauss_rule(2, gx, gw);
  const auto e = grid.element_multi(element);
  const Point lo = grid.lower_corner();
  Vec acc = Vec::Zero(solution.components() * n);
  for (int q = 0; q < (1 << n); ++q) {
    Vec xi(n);
    Point x(n);
    double w = 1.0;
    for (int a = 0; a < n; ++a) {
      const std::size_t k = static_cast<std::size_t>((q >> a) & 1);
      xi(a) = gx[k];
      w *= gw[k];
      x(a) = lo(a) + grid.spacing() * (e[static_cast<std::size_t>(a)] + xi(a));
    }
    acc += w * compute_U_point(field.A(x), field.F(x), flow_derivative(cube, x).pi,
                               solution.gradient_in_element(element, xi), field.components());
  }
  return acc;
}

MidpointField sample_U(const DiscreteSolution& solution, const CoefficientField& field, const CompositeCube& cube) {
  return MidpointField::sample(solution.grid(), [&](std::size_t e) { return cell_U(solution, field, cube, e); });
}

MidpointField sample_gradient(const DiscreteSolution& solution) {
  const Vec xi = Vec::Constant(solution.dim(), 0.5);
  return MidpointField::sample(solution.grid(), [&](std::size_t e) { return solution.gradient_in_element(e, xi); });
}

GradientRecovery recover_gradient(const Vec& U, const Tensor& A, const Vec& F, const Vec& pi, int components) {
  const int n = static_cast<int>(pi.size());
  const int N = components;
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(N, N);
  Vec rhs(N);
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j)
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) M(i, j) += A(i * n + a, j * n + b) * pi(a) * pi(b);
    double s = 0.0;
    for (int a = 0; a < n; ++a) {
      double inner = -F(i * n + a);
      for (int j = 0; j < N; ++j)
        for (int b = 1; b < n; ++b) inner += A(i * n + a, j * n + b) * U(j * n + b);
      s += pi(a) * inner;
    }
    rhs(i) = s - U(i * n);
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
  const Vec sv = svd.singularValues();
  GradientRecovery out;
  out.condition = sv.minCoeff() > 0.0 ? sv.maxCoeff() / sv.minCoeff() : std::numeric_limits<double>::infinity();
  if (!(out.condition <= 1e12)) throw Error("pi-contracted matrix is numerically singular");
  const Vec zeta1 = M.fullPivLu().solve(rhs);
  out.Du.resize(N * n);
  for (int i = 0; i < N; ++i) {
    out.Du(i * n) = zeta1(i);
    for (int b = 1; b < n; ++b) out.Du(i * n + b) = U(i * n + b) - pi(b) * zeta1(i);
  }
  return out;
}

GradientDifferenceTerms gradient_difference_bound(const PointData& x, const PointData& y) {
  GradientDifferenceTerms t;
  t.du_difference = (x.Du - y.Du).norm();
  const double dpi = (x.pi - y.pi).norm();
  const double size = x.U.norm() + x.F.norm();
  t.u_group = (y.U - x.U).norm() + (y.F - x.F).norm();
  t.pi_group = size * (dpi + dpi * dpi);
  t.a_group = size * (x.A - y.A).cwiseAbs().sum();
  t.sum = t.u_group + t.pi_group + t.a_group;
  if (t.sum > 0.0)
    t.ratio = t.du_difference / t.sum;
  else
    t.ratio = t.du_difference > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  return t;
}

HolderEstimate campanato_holder(const MidpointField& field, const std::vector<Point>& centers,
                                const std::vector<double>& radii, double exponent) {
  HolderEstimate est;
  est.exponent = exponent;
  est.level_radii = radii;
  std::sort(est.level_radii.begin(), est.level_radii.end(), std::greater<>());
  const int n = field.grid().dim();
  for (double rho : est.level_radii) {
    double level = 0.0;
    for (const Point& z : centers) {
      const double rs = snap_cube(field.grid(), z, rho).rho;
      level = std::max(level, std::sqrt(excess_integral(field, z, rho)) / std::pow(rs, (n + 2.0 * exponent) / 2.0));
    }
    est.level_M.push_back(level);
    est.M = std::max(est.M, level);
  }
  return est;
}

double iteration_delta(double A, double alpha, double gamma_exp) {
  if (!(alpha > gamma_exp)) throw Error("iteration lemma needs gamma < alpha");
  return std::min(std::pow(2.0 * A, -1.0 / (alpha - gamma_exp)), 0.5);
}

double iteration_constructive_constant(double A, double alpha, double beta, double gamma_exp, int n) {
  const double d = iteration_delta(A, alpha, gamma_exp);
  return std::max(A * std::pow(d, -n - gamma_exp), (2.0 * A + 1.0) * std::pow(d, -2.0 * n - 2.0 * beta));
}

IterationReport iteration_bound(const std::vector<double>& radii, const std::vector<double>& phi, double A, double B,
                                double alpha, double beta, double gamma_exp, int n) {
  if (radii.size() != phi.size() || radii.empty()) throw Error("iteration_bound needs matching nonempty samples");
  if (!(beta < alpha)) throw Error("iteration lemma needs beta < alpha");
  if (gamma_exp < beta || gamma_exp >= alpha) throw Error("iteration lemma needs gamma in [beta, alpha)");
  IterationReport rep;
  rep.delta = iteration_delta(A, alpha, gamma_exp);
  rep.constructive = iteration_constructive_constant(A, alpha, beta, gamma_exp, n);

  rep.hypothesis_excess = -std::numeric_limits<double>::infinity();
  rep.hypothesis_holds = true;
  for (std::size_t i = 0; i < radii.size(); ++i)
    for (std::size_t j = 0; j < radii.size(); ++j) {
      const double rho = radii[i], tau = radii[j];
      if (rho > tau) continue;
      const double rhs = A * std::pow(rho / tau, alpha) * phi[j] + B * std::pow(tau, beta) * std::pow(tau / rho, n);
      rep.hypothesis_excess = std::max(rep.hypothesis_excess, phi[i] - rhs);
      if (phi[i] > rhs * (1.0 + 1e-12)) rep.hypothesis_holds = false;
    }
  if (!rep.hypothesis_holds) {
    rep.status = "hypothesis fails on samples";
    return rep;
  }

  for (std::size_t i = 0; i < radii.size(); ++i)
    for (std::size_t j = 0; j < radii.size(); ++j) {
      const double rho = radii[i], tau = radii[j];
      if (rho > tau) continue;
      const double denom = std::pow(rho / tau, gamma_exp) * phi[j] + B * std::pow(rho, beta);
      if (denom > 0.0)
        rep.c = std::max(rep.c, phi[i] / denom);
      else if (phi[i] > 0.0)
        rep.c = std::numeric_limits<double>::infinity();
    }
  rep.holds = std::isfinite(rep.c) && rep.c <= rep.constructive * (1.0 + 1e-12);
  rep.status = rep.holds ? "holds" : "constant exceeds the constructive bound";
  return rep;
}

JumpProfile interface_jump(const DiscreteSolution& solution, const CoefficientField& field, const CompositeCube& cube,
                           int graph, const std::vector<double>& offsets, const std::vector<Vec>& tangential_points) {
  const GraphFunction& g = cube.graph(graph);
  const int n = solution.dim();
  const int N = solution.components();
  const Vec mid = Vec::Constant(n, 0.5);
  JumpProfile prof;
  prof.offsets = offsets;
  prof.samples = tangential_points.size();
  for (double off : offsets) {
    double du = 0.0, d1 = 0.0, uj = 0.0;
    for (const Vec& xt : tangential_points) {
      Point lo(n), hi(n);
      lo(0) = g.value(xt) - off;
      hi(0) = g.value(xt) + off;
      lo.tail(n - 1) = xt;
      hi.tail(n - 1) = xt;
      if (!solution.grid().contains(lo, 0.0) || !solution.grid().contains(hi, 0.0))
        throw DomainError("interface_jump sample leaves the grid at " + format_point(xt));
      const std::size_t elo = solution.grid().locate(lo), ehi = solution.grid().locate(hi);
      const Vec dlo = solution.gradient_in_element(elo, mid), dhi = solution.gradient_in_element(ehi, mid);
      const Vec ulo = cell_U(solution, field, cube, elo), uhi = cell_U(solution, field, cube, ehi);
      du = std::max(du, (dhi - dlo).norm());
      for (int i = 0; i < N; ++i) d1 = std::max(d1, std::abs(dhi(i * n) - dlo(i * n)));
      uj = std::max(uj, (uhi - ulo).norm());
    }
    prof.du_jump.push_back(du);
    prof.d1u_jump.push_back(d1);
    prof.u_jump.push_back(uj);
  }
  return prof;
}

}  // namespace complab
