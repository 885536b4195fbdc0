#pragma once

#include "complab/fields.hpp"
#include "complab/grid.hpp"

#include <Eigen/Sparse>

#include <functional>
#include <string>
#include <vector>

namespace complab {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct KrylovResult {
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
  std::vector<double> history;
};

/// Jacobi-preconditioned BiCGSTAB. x holds the initial guess on entry.
KrylovResult bicgstab(const SparseMatrix& A, const Vec& b, Vec& x, double tol, int max_iter);

/// Dirichlet data g : R^n -> R^N.
struct BoundaryData {
  std::function<Vec(const Point&)> value;
  std::string description;

  /// g(x) = offset + slope x, slope is N x n.
  static BoundaryData affine(const Vec& offset, const Eigen::MatrixXd& slope);
  static BoundaryData function(std::function<Vec(const Point&)> g, std::string description);
};

struct SolverOptions {
  double tol = 1e-10;
  int max_iter = 0;  // 0 selects 50 sqrt(dof)
  int threads = 1;
  bool check_ellipticity = true;
};

/// Interior system after Dirichlet elimination.
struct LinearSystem {
  SparseMatrix matrix;
  Vec rhs;
  std::vector<long> free_index;   // dof -> free index, -1 on the boundary
  Vec boundary_values;            // full dof vector, zero at free dofs
};

LinearSystem assemble_system(const CoefficientField& field, const StructuredGrid& grid, const BoundaryData& boundary,
                             int threads = 1);

class DiscreteSolution {
 public:
  DiscreteSolution(StructuredGrid grid, int components, Vec values);

  const StructuredGrid& grid() const { return grid_; }
  int components() const { return components_; }
  int dim() const { return grid_.dim(); }
  const Vec& values() const { return values_; }
  Vec node_value(std::size_t node) const { return values_.segment(static_cast<Eigen::Index>(node) * components_, components_); }

  Vec value_at(const Point& x) const;
  /// Flattened gradient, entry i*n + b = D_b u^i, from the containing element.
  Vec gradient_at(const Point& x) const;
  Vec gradient_in_element(std::size_t element, const Vec& xi) const;

  std::string boundary_description;
  std::string quadrature = "tensor Gauss 2 points per axis";
  int iterations = 0;
  double residual = 0.0;
  std::vector<double> residual_history;

 private:
  StructuredGrid grid_;
  int components_;
  Vec values_;
};

DiscreteSolution assemble_and_solve(const CoefficientField& field, const StructuredGrid& grid,
                                    const BoundaryData& boundary, const SolverOptions& options = {});

std::vector<Vec> gradient_samples(const DiscreteSolution& solution, const std::vector<Point>& points);

/// rho^2 int_{Q_rho} |Du|^2 / int_{Q_2rho} |u - (u)|^2 on grid-snapped cubes.
/// Returns 0 when u is constant on Q_2rho up to a relative 1e-9.
double caccioppoli_check(const DiscreteSolution& solution, const Point& center, double rho);

/// L2 norm of u_h - exact with a Gauss rule of the given order per axis.
double l2_error(const DiscreteSolution& solution, const std::function<Vec(const Point&)>& exact,
                int points_per_axis = 4);
double nodal_max_error(const DiscreteSolution& solution, const std::function<Vec(const Point&)>& exact);

/// Gauss-Legendre nodes on [0,1] and weights summing to 1.
void gauss_rule(int points, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace complab
