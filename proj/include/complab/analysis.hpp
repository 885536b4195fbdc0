#pragma once

#include "complab/excess.hpp"
#include "complab/fields.hpp"
#include "complab/solver.hpp"

#include <string>
#include <vector>

namespace complab {

/// U^i = (sum_a pi_a [(A Du)^i_a - F^i_a], D_{x'} u^i + pi' D_1 u^i), flattened i*n + a.
Vec compute_U_point(const Tensor& A, const Vec& F, const Vec& pi, const Vec& Du, int components);

std::vector<Vec> compute_U(const DiscreteSolution& solution, const CoefficientField& field, const CompositeCube& cube,
                           const std::vector<Point>& points);

/// Average of U_h over an element with the assembly quadrature (2 Gauss
/// points per axis, coefficients and pi sampled pointwise).
Vec cell_U(const DiscreteSolution& solution, const CoefficientField& field, const CompositeCube& cube,
           std::size_t element);

/// Cell averages of U_h on every element. The Q1 gradient average is the midpoint gradient.
MidpointField sample_U(const DiscreteSolution& solution, const CoefficientField& field, const CompositeCube& cube);
MidpointField sample_gradient(const DiscreteSolution& solution);

struct GradientRecovery {
  Vec Du;
  double condition = 1.0;  // 2-norm condition number of sum A^{ab} pi_a pi_b
};

/// Inverts compute_U_point at fixed A, F, pi. Throws Error when the contracted
/// matrix has condition number above 1e12.
GradientRecovery recover_gradient(const Vec& U, const Tensor& A, const Vec& F, const Vec& pi, int components);

struct PointData {
  Tensor A;
  Vec F;
  Vec pi;
  Vec U;
  Vec Du;
};

struct GradientDifferenceTerms {
  double du_difference = 0.0;  // |Du(x) - Du(y)|
  double u_group = 0.0;        // |U(y) - U(x)| + |F(y) - F(x)|
  double pi_group = 0.0;       // (|U(x)| + |F(x)|)(|dpi| + |dpi|^2)
  double a_group = 0.0;        // (|U(x)| + |F(x)|) sum |dA|
  double sum = 0.0;
  double ratio = 0.0;          // du_difference / sum, 0 when both vanish
};

GradientDifferenceTerms gradient_difference_bound(const PointData& x, const PointData& y);

struct HolderEstimate {
  double exponent = 0.0;
  double M = 0.0;
  std::vector<double> level_radii;  // descending
  std::vector<double> level_M;      // max over centers at each radius
};

/// M = max over (center, radius) of sqrt(int_{Q_rho} |g - (g)|^2) / rho^{(n + 2 exponent)/2}.
HolderEstimate campanato_holder(const MidpointField& field, const std::vector<Point>& centers,
                                const std::vector<double>& radii, double exponent);

struct IterationReport {
  bool hypothesis_holds = false;
  double hypothesis_excess = 0.0;  // max of lhs - rhs of the hypothesis over sampled pairs
  bool holds = false;
  double c = 0.0;                  // smallest constant in the conclusion over sampled pairs
  double constructive = 0.0;
  double delta = 0.0;
  std::string status;
};

/// delta = min((2A)^{-1/(alpha - gamma)}, 1/2), so 2 A delta^alpha <= delta^gamma.
double iteration_delta(double A, double alpha, double gamma_exp);
/// max(A delta^{-n-gamma}, (2A+1) delta^{-2n-2beta}).
double iteration_constructive_constant(double A, double alpha, double beta, double gamma_exp, int n);

IterationReport iteration_bound(const std::vector<double>& radii, const std::vector<double>& phi, double A, double B,
                                double alpha, double beta, double gamma_exp, int n);

struct JumpProfile {
  std::vector<double> offsets;
  std::vector<double> du_jump;   // max over samples of |Du+ - Du-|
  std::vector<double> d1u_jump;  // max over samples of |D_1 u+ - D_1 u-|
  std::vector<double> u_jump;    // max over samples of |U+ - U-|
  std::size_t samples = 0;
};

/// Pairs (phi_k(x') -+ offset, x') for each tangential sample x', each side
/// represented by the cell averages of Du_h and U_h of its element. Throws
/// DomainError when a point leaves the solution grid.
JumpProfile interface_jump(const DiscreteSolution& solution, const CoefficientField& field, const CompositeCube& cube,
                           int graph, const std::vector<double>& offsets, const std::vector<Vec>& tangential_points);

}  // namespace complab
