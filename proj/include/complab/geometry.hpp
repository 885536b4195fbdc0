#pragma once

#include "complab/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace complab {

/// Axis-aligned cube in the tangential variables x' (dimension n-1).
struct TangentialBox {
  Vec center;
  double halfwidth = 1.0;

  int dim() const { return static_cast<int>(center.size()); }
  double diameter() const;
};

/// Closed-form interface graph x^1 = phi(x').
///
/// Every catalog graph has the form
///
///   phi(x') = offset + tilt . x' + shape(x' - anchor)
///
/// where shape is zero (constant, affine), amplitude |s|^2 (parabola) or
/// amplitude cos(frequency s_1) (sinusoid). Keeping the affine part explicit
/// makes the linear coordinate change and the rescaling of a cube exact
/// operations on the parameters.
class GraphFunction {
 public:
  enum class Kind { constant, affine, parabola, sinusoid };

  static GraphFunction constant(int tangential_dim, double value, double gamma = 1.0, double halfwidth = 1.0);
  static GraphFunction affine(double value, const Vec& slope, double gamma = 1.0, double halfwidth = 1.0);
  static GraphFunction parabola(int tangential_dim, double value, double amplitude, const Vec& vertex,
                                double gamma = 1.0, double halfwidth = 1.0);
  static GraphFunction parabola(int tangential_dim, double value, double amplitude, double gamma = 1.0,
                                double halfwidth = 1.0);
  static GraphFunction sinusoid(int tangential_dim, double value, double amplitude, double frequency,
                                double shift = 0.0, double gamma = 1.0, double halfwidth = 1.0);

  Kind kind() const { return kind_; }
  std::string kind_name() const;
  int tangential_dim() const { return static_cast<int>(tilt_.size()); }
  double gamma() const { return gamma_; }
  double domain_halfwidth() const { return halfwidth_; }

  double value(const Vec& xt) const;
  Vec gradient(const Vec& xt) const;

  /// Closed-form C^gamma seminorm of the gradient over the box (an upper bound
  /// that is attained for the catalog shapes on boxes centered at the anchor).
  double gradient_seminorm(const TangentialBox& box, double gamma) const;
  double gradient_seminorm(const TangentialBox& box) const { return gradient_seminorm(box, gamma_); }
  double gradient_seminorm() const { return gradient_seminorm(domain(), gamma_); }
  double gradient_sup(const TangentialBox& box) const;
  double sup_norm(const TangentialBox& box) const;

  /// phi~(y') = phi(y' + z') - z^1 - slope . y'
  GraphFunction transformed(const Point& base, const Vec& slope) const;
  /// x' -> s phi(x'/s)
  GraphFunction scaled(double s) const;

  TangentialBox domain() const;

 private:
  Kind kind_ = Kind::constant;
  double offset_ = 0.0;
  Vec tilt_;
  Vec anchor_;
  double amplitude_ = 0.0;
  double frequency_ = 0.0;
  double gamma_ = 1.0;
  double halfwidth_ = 1.0;
};

/// Dense-sampling estimate of the C^gamma seminorm of D_{x'} phi on a box.
double sampled_gradient_seminorm(const GraphFunction& graph, const TangentialBox& box, double gamma,
                                 int points_per_axis);

/// Nodal tensor grid (endpoints included) over a tangential box.
std::vector<Vec> tangential_grid(const TangentialBox& box, int points_per_axis);

/// A cube Q_r(z) together with the ordered graphs phi_{k-}, ..., phi_{k+ + 1}.
/// Region k (0-based) is phi_k(x') < x^1 <= phi_{k+1}(x').
class CompositeCube {
 public:
  CompositeCube(Point center, double halfwidth, std::vector<GraphFunction> graphs, double gamma,
                int check_points_per_axis = 256);

  int dim() const { return static_cast<int>(center_.size()); }
  const Point& center() const { return center_; }
  double halfwidth() const { return halfwidth_; }
  double gamma() const { return gamma_; }
  const std::vector<GraphFunction>& graphs() const { return graphs_; }
  const GraphFunction& graph(int k) const { return graphs_.at(static_cast<std::size_t>(k)); }
  int graph_count() const { return static_cast<int>(graphs_.size()); }
  int region_count() const { return graph_count() - 1; }

  bool contains(const Point& x, double slack = 1e-12) const;
  TangentialBox tangential_box(double halfwidth) const;
  TangentialBox tangential_box() const { return tangential_box(halfwidth_); }

  /// inf over Q'_{3R} of |phi_k| < 4R for every graph.
  bool satisfies_minimum_condition(double R, int points_per_axis = 256) const;

  CompositeCube scaled(double s) const;

 private:
  Point center_;
  double halfwidth_;
  std::vector<GraphFunction> graphs_;
  double gamma_;
};

struct FlowDerivativeSample {
  Point point;
  Vec pi;  // (pi_1, ..., pi_n), pi_1 = -1
  int region = 0;

  Vec tangential_part() const { return pi.tail(pi.size() - 1); }
};

struct MuKappa {
  double mu = 0.0;
  double kappa = 0.0;
  double R = 1.0;
};

constexpr double kDegenerateThickness = 1e-14;

int classify_region(const CompositeCube& cube, const Point& x);
/// Region lookup without the containment check, for points of the transformed
/// or extended domains. Follows the same half-open convention and clamping.
int classify_against_graphs(const std::vector<GraphFunction>& graphs, const Point& x);

double interpolation_parameter(const CompositeCube& cube, const Point& x);
FlowDerivativeSample flow_derivative(const CompositeCube& cube, const Point& x);
FlowDerivativeSample flow_derivative_unchecked(const std::vector<GraphFunction>& graphs, const Point& x);

struct NoncrossReport {
  double max_violation = 0.0;  // max of LHS - RHS; <= 0 confirms the estimate
  double max_ratio = 0.0;      // max of LHS / RHS over samples with RHS > 0
  double c1 = 0.0;
  double c2 = 0.0;
  std::size_t samples = 0;
};

/// Non-crossing gradient estimate for ordered graphs phi_k <= phi_l:
/// |D phi_l - D phi_k| <= 3/rho (rho^{1+g} c1 + 2 c2)^{1/(g+1)} (phi_l - phi_k)^{g/(g+1)}
/// checked on a dense grid of Q'_r(center').
NoncrossReport noncross_bound_check(const GraphFunction& phi_k, const GraphFunction& phi_l, double rho, double r,
                                    double gamma, const Vec& center = Vec(), int points_per_axis = 256);

double mu_of_gamma(double gamma);

/// kappa = 18 n (1 + R^g sup[D phi]_{C^g} + sup |D phi|) + R^{2 mu} sup_k [A]^2_{C^mu},
/// with the graph terms taken over Q'_{3R} around the cube center.
double kappa_constant(const CompositeCube& cube, double coefficient_seminorm_sup, double R);

struct PiHolderReport {
  double fitted_constant = 0.0;      // max |pi'(y) - pi'(z)| / (|y - z|/R)^{2 mu}
  double coarse_constant = 0.0;      // same, from the first tenth of the pairs
  double fitted_over_kappa = 0.0;
  bool stable = false;
  bool exponent_ok = false;
  std::size_t pairs = 0;
  std::vector<double> ratios;        // every evaluated random-pair ratio, in draw order
};

PiHolderReport pi_holder_check(const CompositeCube& cube, double kappa, double R, std::size_t num_pairs,
                               std::uint64_t seed = 1, double stability_tolerance = 0.05);

}  // namespace complab
