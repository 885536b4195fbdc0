#include "complab/solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace complab {

BoundaryData BoundaryData::affine(const Vec& offset, const Eigen::MatrixXd& slope) {
  BoundaryData b;
  b.value = [offset, slope](const Point& x) -> Vec { return offset + slope * x; };
  b.description = "affine";
  return b;
}

BoundaryData BoundaryData::function(std::function<Vec(const Point&)> g, std::string description) {
  return {std::move(g), std::move(description)};
}

void gauss_rule(int points, std::vector<double>& nodes, std::vector<double>& weights) {
  std::vector<double> x, w;
  switch (points) {
    case 1: x = {0.0}; w = {2.0}; break;
    case 2: x = {-1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0)}; w = {1.0, 1.0}; break;
    case 3: x = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)}; w = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0}; break;
    case 4: {
      const double a = std::sqrt(3.0 / 7.0 - 2.0 / 7.0 * std::sqrt(1.2));
      const double b = std::sqrt(3.0 / 7.0 + 2.0 / 7.0 * std::sqrt(1.2));
      const double wa = (18.0 + std::sqrt(30.0)) / 36.0, wb = (18.0 - std::sqrt(30.0)) / 36.0;
      x = {-b, -a, a, b};
      w = {wb, wa, wa, wb};
      break;
    }
    case 5: {
      const double a = std::sqrt(5.0 - 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
      const double b = std::sqrt(5.0 + 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
      const double wa = (322.0 + 13.0 * std::sqrt(70.0)) / 900.0, wb = (322.0 - 13.0 * std::sqrt(70.0)) / 900.0;
      x = {-b, -a, 0.0, a, b};
      w = {wb, wa, 128.0 / 225.0, wa, wb};
      break;
    }
    default: throw Error("gauss_rule supports 1 to 5 points");
  }
  nodes.resize(x.size());
  weights.resize(w.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    nodes[i] = 0.5 * (x[i] + 1.0);
    weights[i] = 0.5 * w[i];
  }
}

namespace {

// Tensor-product quadrature on the unit reference element.
struct ReferenceRule {
  std::vector<Vec> xi;
  std::vector<double> w;
};

ReferenceRule tensor_rule(int dim, int points) {
  std::vector<double> x, w;
  gauss_rule(points, x, w);
  ReferenceRule rule;
  int total = 1;
  for (int a = 0; a < dim; ++a) total *= points;
  for (int q = 0; q < total; ++q) {
    Vec xi(dim);
    double weight = 1.0;
    int rest = q;
    for (int a = 0; a < dim; ++a) {
      xi(a) = x[static_cast<std::size_t>(rest % points)];
      weight *= w[static_cast<std::size_t>(rest % points)];
      rest /= points;
    }
    rule.xi.push_back(xi);
    rule.w.push_back(weight);
  }
  return rule;
}

Point reference_to_physical(const StructuredGrid& grid, std::size_t element, const Vec& xi) {
  const auto e = grid.element_multi(element);
  Point x(grid.dim());
  const Point lo = grid.lower_corner();
  for (int a = 0; a < grid.dim(); ++a) x(a) = lo(a) + grid.spacing() * (e[static_cast<std::size_t>(a)] + xi(a));
  return x;
}

struct BlockResult {
  std::vector<Eigen::Triplet<double>> triplets;
  std::vector<std::pair<long, double>> rhs;
  bool ellipticity_failed = false;
  Point failure_point;
  std::string failure;
};

constexpr std::size_t kBlockSize = 2048;

}  // namespace

LinearSystem assemble_system_checked(const CoefficientField& field, const StructuredGrid& grid,
                                     const BoundaryData& boundary, int threads, bool check_ellipticity) {
  if (field.dim() != grid.dim()) throw Error("field and grid dimensions differ");
  const int n = grid.dim();
  const int N = field.components();
  const std::size_t nodes = grid.node_count();
  const std::size_t dofs = nodes * static_cast<std::size_t>(N);

  LinearSystem sys;
  sys.free_index.assign(dofs, -1);
  sys.boundary_values = Vec::Zero(static_cast<Eigen::Index>(dofs));
  long free_count = 0;
  for (std::size_t node = 0; node < nodes; ++node) {
    if (grid.is_boundary_node(node)) {
      const Vec g = boundary.value(grid.node_point(node));
      if (g.size() != N) throw Error("boundary data has the wrong number of components");
      for (int i = 0; i < N; ++i) sys.boundary_values(static_cast<Eigen::Index>(node) * N + i) = g(i);
    } else {
      for (int i = 0; i < N; ++i) sys.free_index[node * static_cast<std::size_t>(N) + static_cast<std::size_t>(i)] = free_count++;
    }
  }

  const ReferenceRule rule = tensor_rule(n, 2);
  std::vector<Eigen::MatrixXd> grads;
  for (const Vec& xi : rule.xi) grads.push_back(q1_gradients(xi, grid.spacing()));
  const double volume = std::pow(grid.spacing(), n);
  const int nn = 1 << n;
  const int ldofs = nn * N;
  const int width = N * n;

  const std::size_t elements = grid.element_count();
  const std::size_t blocks = (elements + kBlockSize - 1) / kBlockSize;
  std::vector<BlockResult> results(blocks);

  auto work = [&](std::size_t block) {
    BlockResult& out = results[block];
    Eigen::MatrixXd K(ldofs, ldofs);
    Vec f(ldofs);
    Eigen::MatrixXd flux(width, ldofs);
    const std::size_t first = block * kBlockSize;
    const std::size_t last = std::min(elements, first + kBlockSize);
    for (std::size_t e = first; e < last; ++e) {
      if (check_ellipticity && !out.ellipticity_failed) {
        const Point mid = grid.element_midpoint(e);
        const Tensor Am = field.A(mid);
        if (min_rayleigh_quotient(Am) < field.lambda() * (1.0 - 1e-12) ||
            Am.cwiseAbs().maxCoeff() > field.Lambda() * (1.0 + 1e-12)) {
          out.ellipticity_failed = true;
          out.failure_point = mid;
        }
      }
      K.setZero();
      f.setZero();
      for (std::size_t q = 0; q < rule.xi.size(); ++q) {
        const Point x = reference_to_physical(grid, e, rule.xi[q]);
        const Tensor A = field.A(x);
        const Vec F = field.F(x);
        const Eigen::MatrixXd& G = grads[q];
        const double w = rule.w[q] * volume;
        // flux(:, b*N + j) = A(:, j*n + beta) G(b, beta)
        for (int b = 0; b < nn; ++b)
          for (int j = 0; j < N; ++j) {
            Vec col = Vec::Zero(width);
            for (int beta = 0; beta < n; ++beta) col += A.col(j * n + beta) * G(b, beta);
            flux.col(b * N + j) = col;
          }
        for (int a = 0; a < nn; ++a)
          for (int i = 0; i < N; ++i) {
            double load = 0.0;
            for (int alpha = 0; alpha < n; ++alpha) load += F(i * n + alpha) * G(a, alpha);
            f(a * N + i) += w * load;
            for (int col = 0; col < ldofs; ++col) {
              double s = 0.0;
              for (int alpha = 0; alpha < n; ++alpha) s += flux(i * n + alpha, col) * G(a, alpha);
              K(a * N + i, col) += w * s;
            }
          }
      }
      const auto enodes = grid.element_nodes(e);
      for (int a = 0; a < nn; ++a)
        for (int i = 0; i < N; ++i) {
          const std::size_t row_dof = enodes[static_cast<std::size_t>(a)] * static_cast<std::size_t>(N) + static_cast<std::size_t>(i);
          const long row = sys.free_index[row_dof];
          if (row < 0) continue;
          double rhs = f(a * N + i);
          for (int b = 0; b < nn; ++b)
            for (int j = 0; j < N; ++j) {
              const std::size_t col_dof = enodes[static_cast<std::size_t>(b)] * static_cast<std::size_t>(N) + static_cast<std::size_t>(j);
              const long col = sys.free_index[col_dof];
              const double k = K(a * N + i, b * N + j);
              if (col >= 0)
                out.triplets.emplace_back(row, col, k);
              else
                rhs -= k * sys.boundary_values(static_cast<Eigen::Index>(col_dof));
            }
          out.rhs.emplace_back(row, rhs);
        }
    }
  };

  const int nthreads = std::max(1, std::min<int>(threads, static_cast<int>(blocks)));
  if (nthreads == 1) {
    for (std::size_t b = 0; b < blocks; ++b) work(b);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t)
      pool.emplace_back([&] {
        for (std::size_t b = next++; b < blocks; b = next++) work(b);
      });
    for (auto& th : pool) th.join();
  }

  // Fixed block order keeps the reduction independent of the thread count.
  std::vector<Eigen::Triplet<double>> triplets;
  sys.rhs = Vec::Zero(free_count);
  for (const auto& r : results) {
    if (r.ellipticity_failed)
      throw EllipticityViolation("ellipticity fails at element midpoint " + format_point(r.failure_point),
                                 r.failure_point);
    triplets.insert(triplets.end(), r.triplets.begin(), r.triplets.end());
    for (const auto& [row, v] : r.rhs) sys.rhs(row) += v;
  }
  sys.matrix.resize(free_count, free_count);
  sys.matrix.setFromTriplets(triplets.begin(), triplets.end());
  sys.matrix.makeCompressed();
  return sys;
}

LinearSystem assemble_system(const CoefficientField& field, const StructuredGrid& grid, const BoundaryData& boundary,
                             int threads) {
  return assemble_system_checked(field, grid, boundary, threads, false);
}

DiscreteSolution::DiscreteSolution(StructuredGrid grid, int components, Vec values)
    : grid_(std::move(grid)), components_(components), values_(std::move(values)) {
  if (values_.size() != static_cast<Eigen::Index>(grid_.node_count()) * components_)
    throw Error("solution vector does not match the grid");
}

namespace {
Vec local_coordinates(const StructuredGrid& grid, std::size_t element, const Point& x) {
  const auto e = grid.element_multi(element);
  const Point lo = grid.lower_corner();
  Vec xi(grid.dim());
  for (int a = 0; a < grid.dim(); ++a)
    xi(a) = std::clamp((x(a) - lo(a)) / grid.spacing() - e[static_cast<std::size_t>(a)], 0.0, 1.0);
  return xi;
}
}  // namespace

Vec DiscreteSolution::value_at(const Point& x) const {
  const std::size_t e = grid_.locate(x);
  const Vec phi = q1_values(local_coordinates(grid_, e, x));
  const auto nodes = grid_.element_nodes(e);
  Vec u = Vec::Zero(components_);
  for (std::size_t a = 0; a < nodes.size(); ++a) u += phi(static_cast<Eigen::Index>(a)) * node_value(nodes[a]);
  return u;
}

Vec DiscreteSolution::gradient_in_element(std::size_t element, const Vec& xi) const {
  const int n = grid_.dim();
  const Eigen::MatrixXd G = q1_gradients(xi, grid_.spacing());
  const auto nodes = grid_.element_nodes(element);
  Vec du = Vec::Zero(components_ * n);
  for (std::size_t a = 0; a < nodes.size(); ++a) {
    const Vec ua = node_value(nodes[a]);
    for (int i = 0; i < components_; ++i)
      for (int b = 0; b < n; ++b) du(i * n + b) += ua(i) * G(static_cast<Eigen::Index>(a), b);
  }
  return du;
}

Vec DiscreteSolution::gradient_at(const Point& x) const {
  const std::size_t e = grid_.locate(x);
  return gradient_in_element(e, local_coordinates(grid_, e, x));
}

DiscreteSolution assemble_and_solve(const CoefficientField& field, const StructuredGrid& grid,
                                    const BoundaryData& boundary, const SolverOptions& options) {
  if (!(options.tol > 0.0 && options.tol <= 1e-6)) throw Error("solver tolerance must lie in (0, 1e-6]");
  LinearSystem sys = assemble_system_checked(field, grid, boundary, options.threads, options.check_ellipticity);
  const Eigen::Index nfree = sys.rhs.size();
  const int max_iter = options.max_iter > 0
                           ? options.max_iter
                           : std::max(100, static_cast<int>(50.0 * std::sqrt(static_cast<double>(nfree))));
  Vec x = Vec::Zero(nfree);
  KrylovResult kr = bicgstab(sys.matrix, sys.rhs, x, options.tol, max_iter);
  if (!kr.converged)
    throw SolverDivergence("BiCGSTAB did not reach relative residual " + std::to_string(options.tol) + " in " +
                               std::to_string(max_iter) + " iterations (last " +
                               std::to_string(kr.relative_residual) + ")",
                           kr.history);
  Vec values = sys.boundary_values;
  for (std::size_t dof = 0; dof < sys.free_index.size(); ++dof)
    if (sys.free_index[dof] >= 0) values(static_cast<Eigen::Index>(dof)) = x(sys.free_index[dof]);
  DiscreteSolution sol(grid, field.components(), std::move(values));
  sol.boundary_description = boundary.description;
  sol.iterations = kr.iterations;
  sol.residual = kr.relative_residual;
  sol.residual_history = std::move(kr.history);
  return sol;
}

std::vector<Vec> gradient_samples(const DiscreteSolution& solution, const std::vector<Point>& points) {
  std::vector<Vec> out;
  out.reserve(points.size());
  for (const Point& p : points) out.push_back(solution.gradient_at(p));
  return out;
}

namespace {

std::vector<std::size_t> elements_in_cube(const StructuredGrid& grid, const Point& center, double rho) {
  std::vector<std::size_t> out;
  for (std::size_t e = 0; e < grid.element_count(); ++e)
    if (((grid.element_midpoint(e) - center).cwiseAbs().array() < rho).all()) out.push_back(e);
  return out;
}

}  // namespace

double caccioppoli_check(const DiscreteSolution& solution, const Point& center, double rho) {
  const StructuredGrid& grid = solution.grid();
  if (!grid.contains(center.array() + 2.0 * rho) || !grid.contains(center.array() - 2.0 * rho))
    throw DomainError("caccioppoli_check: Q_{2 rho} leaves the grid");
  const ReferenceRule rule = tensor_rule(grid.dim(), 2);
  const double volume = std::pow(grid.spacing(), grid.dim());

  double energy = 0.0;
  for (std::size_t e : elements_in_cube(grid, center, rho))
    for (std::size_t q = 0; q < rule.xi.size(); ++q)
      energy += rule.w[q] * volume * solution.gradient_in_element(e, rule.xi[q]).squaredNorm();
  if (energy == 0.0) return 0.0;

  const auto outer = elements_in_cube(grid, center, 2.0 * rho);
  const int N = solution.components();
  Vec mean = Vec::Zero(N);
  double total = 0.0;
  for (std::size_t e : outer)
    for (std::size_t q = 0; q < rule.xi.size(); ++q) {
      mean += rule.w[q] * volume * solution.value_at(reference_to_physical(grid, e, rule.xi[q]));
      total += rule.w[q] * volume;
    }
  mean /= total;
  double spread = 0.0;
  for (std::size_t e : outer)
    for (std::size_t q = 0; q < rule.xi.size(); ++q)
      spread += rule.w[q] * volume * (solution.value_at(reference_to_physical(grid, e, rule.xi[q])) - mean).squaredNorm();
  // u constant up to roundoff
  const double floor = 1e-9 * std::max(1.0, mean.norm());
  if (!(spread > floor * floor * total)) return 0.0;
  return rho * rho * energy / spread;
}

double l2_error(const DiscreteSolution& solution, const std::function<Vec(const Point&)>& exact,
                int points_per_axis) {
  const StructuredGrid& grid = solution.grid();
  const ReferenceRule rule = tensor_rule(grid.dim(), points_per_axis);
  const double volume = std::pow(grid.spacing(), grid.dim());
  double sum = 0.0;
  for (std::size_t e = 0; e < grid.element_count(); ++e) {
    const auto nodes = grid.element_nodes(e);
    for (std::size_t q = 0; q < rule.xi.size(); ++q) {
      const Point x = reference_to_physical(grid, e, rule.xi[q]);
      const Vec phi = q1_values(rule.xi[q]);
      Vec uh = Vec::Zero(solution.components());
      for (std::size_t a = 0; a < nodes.size(); ++a) uh += phi(static_cast<Eigen::Index>(a)) * solution.node_value(nodes[a]);
      sum += rule.w[q] * volume * (uh - exact(x)).squaredNorm();
    }
  }
  return std::sqrt(sum);
}

double nodal_max_error(const DiscreteSolution& solution, const std::function<Vec(const Point&)>& exact) {
  double err = 0.0;
  for (std::size_t node = 0; node < solution.grid().node_count(); ++node)
    err = std::max(err, (solution.node_value(node) - exact(solution.grid().node_point(node))).cwiseAbs().maxCoeff());
  return err;
}

}  // namespace complab
