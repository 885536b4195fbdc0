#pragma once

#include "complab/excess.hpp"
#include "complab/fields.hpp"
#include "complab/solver.hpp"

#include <memory>
#include <vector>

namespace complab {

/// Exact solution u(x) = q x' + w(x^1) of a laminate problem on the field's box.
/// Layers are the field's layers clipped to [c^1 - r, c^1 + r].
class LaminateSolution {
 public:
  struct Segment {
    double lower = 0.0, upper = 0.0;
    int layer = 0;
    Vec slope;     // w' on the segment
    Vec w_lower;   // w at the lower end
  };

  int dim() const { return dim_; }
  int components() const { return components_; }
  const Vec& flux_constant() const { return C_; }
  const Eigen::MatrixXd& tangential_slope() const { return q_; }
  const std::vector<Segment>& segments() const { return segments_; }

  Vec w(double x1) const;
  Vec w_prime(double x1) const;
  Vec value(const Point& x) const;
  /// Flattened gradient i*n + b.
  Vec gradient(const Point& x) const;

 private:
  friend LaminateSolution solve_laminate_exact(const LaminateField&, const Eigen::MatrixXd&, const Vec&, const Vec&);
  const Segment& segment_of(double x1) const;

  int dim_ = 0, components_ = 0;
  Vec C_;
  Eigen::MatrixXd q_;
  std::vector<Segment> segments_;
};

/// q is N x (n-1); w_lower and w_upper are the end values of w at x^1 = c^1 -+ r.
/// Throws Error when an A^{11} block is singular.
LaminateSolution solve_laminate_exact(const LaminateField& field, const Eigen::MatrixXd& q, const Vec& w_lower,
                                      const Vec& w_upper);

/// Dirichlet data equal to the exact trace.
BoundaryData laminate_boundary(const LaminateSolution& solution);

/// W^i = (-sum A^{1b}_{ij} D_b u^j + F^i_1, D_{x'} u^i), flattened i*n + a.
Vec compute_W_point(const Tensor& A, const Vec& F, const Vec& Du, int components);

std::vector<Vec> compute_W_laminate(const DiscreteSolution& solution, const CoefficientField& field,
                                    const std::vector<Point>& points);
std::vector<Vec> compute_W_laminate(const LaminateSolution& solution, const LaminateField& field,
                                    const std::vector<Point>& points);

/// Laminate problem plus the tangential perturbation eps (x^2)^2 on component 0.
/// The load is shifted by A D p, so u_lam + p solves the perturbed problem exactly.
class PerturbedLaminateField final : public CoefficientField {
 public:
  PerturbedLaminateField(std::shared_ptr<const LaminateField> base, double epsilon);

  int dim() const override { return base_->dim(); }
  int components() const override { return base_->components(); }
  Tensor A(const Point& x) const override { return base_->A(x); }
  Vec F(const Point& x) const override;
  double lambda() const override { return base_->lambda(); }
  double Lambda() const override { return base_->Lambda(); }
  DomainBox domain() const override { return base_->domain(); }

  const LaminateField& base() const { return *base_; }
  double epsilon() const { return epsilon_; }
  Vec perturbation(const Point& x) const;
  Vec perturbation_gradient(const Point& x) const;

 private:
  std::shared_ptr<const LaminateField> base_;
  double epsilon_;
};

struct WDecayReport {
  ExcessReport excess;
  double nodal_error = 0.0;  // against the manufactured exact solution
};

/// Excess of W_h around center for the perturbed laminate problem solved on grid.
WDecayReport w_decay_check(const PerturbedLaminateField& field, const LaminateSolution& base_solution,
                           const StructuredGrid& grid, const Point& center, const std::vector<double>& radii,
                           const SolverOptions& options = {});

}  // namespace complab
