#include "complab/transform.hpp"

#include <algorithm>
#include <cmath>

namespace complab {

LinearTransform::LinearTransform(Point base, Vec slope) : base_(std::move(base)), slope_(std::move(slope)) {
  if (slope_.size() != base_.size() - 1) throw Error("transform slope must have n-1 components");
}

LinearTransform LinearTransform::at(const CompositeCube& cube, const Point& z) {
  return LinearTransform(z, flow_derivative(cube, z).tangential_part());
}

Point LinearTransform::forward(const Point& x) const {
  Point y = x - base_;
  y(0) -= slope_.dot(tangential(y));
  return y;
}

Point LinearTransform::inverse(const Point& y) const {
  Point x = y + base_;
  x(0) += slope_.dot(tangential(y));
  return x;
}

Eigen::MatrixXd LinearTransform::jacobian() const {
  Eigen::MatrixXd J = Eigen::MatrixXd::Identity(dim(), dim());
  J.block(0, 1, 1, dim() - 1) = -slope_.transpose();
  return J;
}

Eigen::MatrixXd LinearTransform::inverse_jacobian() const {
  Eigen::MatrixXd J = Eigen::MatrixXd::Identity(dim(), dim());
  J.block(0, 1, 1, dim() - 1) = slope_.transpose();
  return J;
}

Tensor push_tensor(const Tensor& A, const Eigen::MatrixXd& J, int components) {
  const int n = static_cast<int>(J.rows());
  Tensor out(A.rows(), A.cols());
  for (int i = 0; i < components; ++i)
    for (int j = 0; j < components; ++j)
      out.block(i * n, j * n, n, n) = J * A.block(i * n, j * n, n, n) * J.transpose();
  return out;
}

Vec push_load(const Vec& F, const Eigen::MatrixXd& J, int components) {
  const int n = static_cast<int>(J.rows());
  Vec out(F.size());
  for (int i = 0; i < components; ++i) out.segment(i * n, n) = J * F.segment(i * n, n);
  return out;
}

double inscribed_factor(const CompositeCube& cube) {
  double sup = 0.0;
  for (const GraphFunction& g : cube.graphs()) sup = std::max(sup, g.gradient_sup(cube.tangential_box()));
  return 1.0 / (1.0 + 2.0 * sup * cube.dim());
}

TransformedField::TransformedField(std::shared_ptr<const CoefficientField> field, LinearTransform transform,
                                   double halfwidth)
    : field_(std::move(field)), transform_(std::move(transform)), J_(transform_.jacobian()), halfwidth_(halfwidth) {
  if (!field_) throw Error("transformed field needs a source field");
  if (field_->dim() != transform_.dim()) throw Error("transform and field dimensions differ");
}

Tensor TransformedField::A(const Point& y) const {
  return push_tensor(field_->A(transform_.inverse(y)), J_, components());
}

Vec TransformedField::F(const Point& y) const { return push_load(field_->F(transform_.inverse(y)), J_, components()); }

double TransformedField::lambda() const {
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(J_);
  const double s = svd.singularValues().minCoeff();
  return field_->lambda() * s * s;
}

double TransformedField::Lambda() const {
  const double row = 1.0 + transform_.slope().cwiseAbs().sum();
  return field_->Lambda() * row * row;
}

std::vector<GraphFunction> transformed_graphs(const CompositeCube& cube, const LinearTransform& transform) {
  std::vector<GraphFunction> out;
  for (const GraphFunction& g : cube.graphs()) out.push_back(g.transformed(transform.base(), transform.slope()));
  return out;
}

FlowDerivativeSample transformed_flow(const CompositeCube& cube, const std::vector<GraphFunction>& graphs,
                                      const LinearTransform& transform, const Point& y) {
  if (!cube.contains(transform.inverse(y), 1e-12))
    throw DomainError("point " + format_point(y) + " lies outside the transformed cube");
  return flow_derivative_unchecked(graphs, y);
}

FlowDerivativeSample transformed_flow(const CompositeCube& cube, const LinearTransform& transform, const Point& y) {
  return transformed_flow(cube, transformed_graphs(cube, transform), transform, y);
}

TransformDecayReport decay_after_transform(const CompositeCube& cube, const LinearTransform& transform, double kappa,
                                           double R, const std::vector<double>& radii, int points_per_axis) {
  const int n = cube.dim();
  const double mu = mu_of_gamma(cube.gamma());
  const auto graphs = transformed_graphs(cube, transform);
  TransformDecayReport rep;
  rep.radii = radii;
  std::sort(rep.radii.begin(), rep.radii.end(), std::greater<>());

  long total = 1;
  for (int a = 0; a < n; ++a) total *= points_per_axis;
  for (double rho : rep.radii) {
    double best = 0.0;
    Point y(n);
    for (long q = 0; q < total; ++q) {
      long rest = q;
      for (int a = 0; a < n; ++a) {
        y(a) = -rho + 2.0 * rho * static_cast<double>(rest % points_per_axis) / (points_per_axis - 1);
        rest /= points_per_axis;
      }
      if (!cube.contains(transform.inverse(y), 1e-12)) continue;
      best = std::max(best, flow_derivative_unchecked(graphs, y).tangential_part().norm());
    }
    rep.maxima.push_back(best);
    rep.ratios.push_back(best / std::pow(rho / R, 2.0 * mu));
  }
  rep.max_ratio = *std::max_element(rep.ratios.begin(), rep.ratios.end());
  rep.ratio_over_kappa = rep.max_ratio / kappa;
  const double floor = 1e-14;
  for (std::size_t i = 0; i < rep.ratios.size(); ++i)
    for (std::size_t j = i + 1; j < rep.ratios.size(); ++j) {
      if (rep.ratios[j] <= floor) continue;
      const double g = rep.ratios[i] > floor ? rep.ratios[j] / rep.ratios[i] : std::numeric_limits<double>::infinity();
      rep.max_growth = std::max(rep.max_growth, g);
    }
  rep.bounded = std::isfinite(rep.max_ratio) && rep.max_growth <= 2.0;
  return rep;
}

}  // namespace complab
