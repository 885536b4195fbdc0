#pragma once

#include "complab/geometry.hpp"

#include <memory>
#include <optional>
#include <vector>

namespace complab {

/// Scalar multiplier g(x) from the coefficient catalog:
///   constant     g = c
///   affine       g = c + b . (x - x0)
///   holder_bump  g = c + b |x - x0|^e
class ScalarProfile {
 public:
  enum class Kind { constant, affine, holder_bump };

  static ScalarProfile constant(double c);
  static ScalarProfile affine(double c, Vec gradient, Point origin);
  static ScalarProfile holder_bump(double c, double b, Point origin, double exponent);

  Kind kind() const { return kind_; }
  bool is_constant() const { return kind_ == Kind::constant; }
  double operator()(const Point& x) const;

  /// Upper bound for the C^mu seminorm over a set of the given diameter.
  double seminorm(double mu, double diameter) const;

 private:
  Kind kind_ = Kind::constant;
  double c_ = 1.0;
  double b_ = 0.0;
  Vec gradient_;
  Point origin_;
  double exponent_ = 1.0;
};

/// Coefficients of one region: A(x) = A_base g_A(x), F(x) = F_base g_F(x).
struct RegionCoefficients {
  Tensor A_base;
  ScalarProfile A_profile = ScalarProfile::constant(1.0);
  Vec F_base;
  ScalarProfile F_profile = ScalarProfile::constant(1.0);

  Tensor A(const Point& x) const { return A_base * A_profile(x); }
  Vec F(const Point& x) const { return F_base * F_profile(x); }
  bool is_constant() const { return A_profile.is_constant() && F_profile.is_constant(); }
};

/// Isotropic scalar coefficient a delta_ij delta^{ab} for N components in n dimensions.
Tensor isotropic_tensor(double a, int components, int dim);

struct DomainBox {
  Point center;
  double halfwidth = 1.0;
};

/// Anything the solver can assemble: tensor A(x) and load F(x) on a box.
class CoefficientField {
 public:
  virtual ~CoefficientField() = default;
  virtual int dim() const = 0;
  virtual int components() const = 0;
  virtual Tensor A(const Point& x) const = 0;
  virtual Vec F(const Point& x) const = 0;
  virtual double lambda() const = 0;
  virtual double Lambda() const = 0;
  virtual DomainBox domain() const = 0;
};

class PiecewiseField final : public CoefficientField {
 public:
  PiecewiseField(CompositeCube cube, std::vector<RegionCoefficients> regions, int components, double lambda,
                 double Lambda, double mu);

  int dim() const override { return cube_.dim(); }
  int components() const override { return components_; }
  Tensor A(const Point& x) const override;
  Vec F(const Point& x) const override;
  double lambda() const override { return lambda_; }
  double Lambda() const override { return Lambda_; }
  DomainBox domain() const override { return {cube_.center(), cube_.halfwidth()}; }

  double mu() const { return mu_; }
  const CompositeCube& cube() const { return cube_; }
  const std::vector<RegionCoefficients>& regions() const { return regions_; }
  const RegionCoefficients& region(int k) const { return regions_.at(static_cast<std::size_t>(k)); }
  int region_of(const Point& x) const;
  bool is_piecewise_constant() const;

  /// Declared per-region C^mu seminorms (componentwise max), using the cube diameter.
  double A_seminorm(int k) const;
  double F_seminorm(int k) const;
  double A_seminorm_sup() const;
  double F_seminorm_sup() const;

 private:
  CompositeCube cube_;
  std::vector<RegionCoefficients> regions_;
  int components_;
  double lambda_, Lambda_, mu_;
};

/// Coefficients depending on x^1 only, constant on layers b_k < x^1 <= b_{k+1}.
class LaminateField final : public CoefficientField {
 public:
  /// breakpoints has layers+1 entries (use +-infinity for unbounded end layers).
  LaminateField(int dim, int components, std::vector<double> breakpoints, std::vector<Tensor> A,
                std::vector<Vec> F, double lambda, double Lambda, DomainBox domain);

  int dim() const override { return dim_; }
  int components() const override { return components_; }
  Tensor A(const Point& x) const override { return A_[static_cast<std::size_t>(layer_of(x(0)))]; }
  Vec F(const Point& x) const override { return F_[static_cast<std::size_t>(layer_of(x(0)))]; }
  double lambda() const override { return lambda_; }
  double Lambda() const override { return Lambda_; }
  DomainBox domain() const override { return domain_; }

  int layer_count() const { return static_cast<int>(A_.size()); }
  int layer_of(double x1) const;
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const Tensor& layer_A(int k) const { return A_.at(static_cast<std::size_t>(k)); }
  const Vec& layer_F(int k) const { return F_.at(static_cast<std::size_t>(k)); }

 private:
  int dim_, components_;
  std::vector<double> breakpoints_;
  std::vector<Tensor> A_;
  std::vector<Vec> F_;
  double lambda_, Lambda_;
  DomainBox domain_;
};

struct EllipticityReport {
  double min_rayleigh = 0.0;
  double max_abs_entry = 0.0;
  Point argmin;
  Point argmax;
  std::size_t samples = 0;
};

/// Samples A at random points of the field's box (plus the box corners and
/// center) and reports min over samples of the smallest eigenvalue of the
/// symmetric part, which is the infimum of the Rayleigh quotient A z.z / |z|^2,
/// and the largest entry magnitude. Throws EllipticityViolation when the
/// declared lambda or Lambda is violated.
EllipticityReport ellipticity_check(const CoefficientField& field, std::size_t num_samples, std::uint64_t seed = 1);
double min_rayleigh_quotient(const Tensor& A);

/// Replace A, F on region k by their values at anchor z_k. Regions with no
/// anchor must be empty inside the cube.
PiecewiseField freeze_piecewise(const PiecewiseField& field, const std::vector<std::optional<Point>>& anchors);

struct CoefficientDefect {
  std::vector<double> A_sup;  // per region, max |A - A_frozen| componentwise
  std::vector<double> F_sup;
};

/// Sup-norm difference between two fields sharing a cube, on a nodal grid.
CoefficientDefect coefficient_defect(const PiecewiseField& a, const PiecewiseField& b, int points_per_axis = 65);

struct LaminateSubstitution {
  LaminateField laminate;
  std::vector<Point> anchors;     // z_k per graph (first coordinate is the layer breakpoint)
  double mismatch_measure = 0.0;  // |{A != A_bar} u {F != F_bar}| in Q_theta(z)
  double bound_scale = 0.0;       // nu (theta/R)^{2 mu} theta^n
  double ratio = 0.0;             // mismatch_measure / bound_scale
};

/// Replace a piecewise-constant field on Q_theta(center) by a laminate in x^1.
/// Layer breakpoints come from one point per graph: the graph point above the
/// cube center when it lies in the cube, otherwise the nearest graph point in
/// the cube, otherwise the graph value above the center (graph outside).
/// Mismatch is counted on the midpoint grid with cells_per_axis cells.
LaminateSubstitution laminate_substitute(const PiecewiseField& field, const Point& center, double theta, double nu,
                                         double R, int cells_per_axis = 256);

/// max over sample pairs (x, y) in one region of |g(x) - g(y)| / |x - y|^mu.
double holder_seminorm_estimate(const std::vector<Point>& points, const std::vector<Vec>& values,
                                const std::vector<int>& region_mask, int region, double mu);

}  // namespace complab
