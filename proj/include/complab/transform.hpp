#pragma once

#include "complab/fields.hpp"

#include <memory>
#include <vector>

namespace complab {

/// y = Psi(x) = (x^1 - z^1 - p . (x' - z'), x' - z') and its inverse Phi.
class LinearTransform {
 public:
  LinearTransform(Point base, Vec slope);
  /// Transform based at z with slope pi'(z).
  static LinearTransform at(const CompositeCube& cube, const Point& z);

  int dim() const { return static_cast<int>(base_.size()); }
  const Point& base() const { return base_; }
  const Vec& slope() const { return slope_; }

  Point forward(const Point& x) const;
  Point inverse(const Point& y) const;
  /// dy/dx, unit upper block [[1, -p^T], [0, I]].
  Eigen::MatrixXd jacobian() const;
  Eigen::MatrixXd inverse_jacobian() const;
  double determinant() const { return 1.0; }

 private:
  Point base_;
  Vec slope_;
};

/// A~ = J A J^T on every (i, j) block.
Tensor push_tensor(const Tensor& A, const Eigen::MatrixXd& J, int components);
/// G^i = J F^i.
Vec push_load(const Vec& F, const Eigen::MatrixXd& J, int components);

/// Largest delta with Q_{delta rho}(0) inside Psi(Q_rho(z)) for slopes bounded
/// through the graph gradients: 1 / (1 + 2 n sup |D phi|).
double inscribed_factor(const CompositeCube& cube);

/// The field in y coordinates, restricted to the cube of halfwidth delta r around 0.
class TransformedField final : public CoefficientField {
 public:
  TransformedField(std::shared_ptr<const CoefficientField> field, LinearTransform transform, double halfwidth);

  int dim() const override { return field_->dim(); }
  int components() const override { return field_->components(); }
  Tensor A(const Point& y) const override;
  Vec F(const Point& y) const override;
  double lambda() const override;
  double Lambda() const override;
  DomainBox domain() const override { return {Point::Zero(dim()), halfwidth_}; }

  const LinearTransform& transform() const { return transform_; }

 private:
  std::shared_ptr<const CoefficientField> field_;
  LinearTransform transform_;
  Eigen::MatrixXd J_;
  double halfwidth_;
};

std::vector<GraphFunction> transformed_graphs(const CompositeCube& cube, const LinearTransform& transform);

/// pi~(y) from the transformed graphs. Throws DomainError when Phi(y) leaves the cube.
FlowDerivativeSample transformed_flow(const CompositeCube& cube, const LinearTransform& transform, const Point& y);
FlowDerivativeSample transformed_flow(const CompositeCube& cube, const std::vector<GraphFunction>& graphs,
                                      const LinearTransform& transform, const Point& y);

struct TransformDecayReport {
  std::vector<double> radii;   // descending
  std::vector<double> maxima;  // max |pi~'| over Q_rho(0)
  std::vector<double> ratios;  // maxima / (rho/R)^{2 mu}
  double max_ratio = 0.0;
  double ratio_over_kappa = 0.0;
  /// Largest factor by which the ratio grows when the radius shrinks.
  double max_growth = 0.0;
  bool bounded = false;
};

TransformDecayReport decay_after_transform(const CompositeCube& cube, const LinearTransform& transform, double kappa,
                                           double R, const std::vector<double>& radii, int points_per_axis = 41);

}  // namespace complab
