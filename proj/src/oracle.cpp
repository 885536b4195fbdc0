#include "complab/oracle.hpp"

#include <algorithm>
#include <cmath>

namespace complab {

namespace {

Eigen::MatrixXd normal_block(const Tensor& A, int N, int n) {
  Eigen::MatrixXd M(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) M(i, j) = A(i * n, j * n);
  return M;
}

// (A^{1,tang} q)_i = sum_j sum_{b >= 1} A^{1b}_{ij} q_{j,b-1}
Vec tangential_flux(const Tensor& A, const Eigen::MatrixXd& q, int N, int n) {
  Vec out = Vec::Zero(N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int b = 1; b < n; ++b) out(i) += A(i * n, j * n + b) * q(j, b - 1);
  return out;
}

Vec normal_load(const Vec& F, int N, int n) {
  Vec out(N);
  for (int i = 0; i < N; ++i) out(i) = F(i * n);
  return out;
}

}  // namespace

LaminateSolution solve_laminate_exact(const LaminateField& field, const Eigen::MatrixXd& q, const Vec& w_lower,
                                      const Vec& w_upper) {
  const int N = field.components();
  const int n = field.dim();
  if (q.rows() != N || q.cols() != n - 1) throw Error("tangential slope must be N x (n-1)");
  if (w_lower.size() != N || w_upper.size() != N) throw Error("end values must have N components");
  const DomainBox box = field.domain();
  const double a = box.center(0) - box.halfwidth;
  const double b = box.center(0) + box.halfwidth;

  LaminateSolution sol;
  sol.dim_ = n;
  sol.components_ = N;
  sol.q_ = q;

  struct Piece {
    double lo, hi;
    int layer;
    Eigen::MatrixXd M;  // inverse normal block
    Vec shift;          // F_1 - A^{1,tang} q
  };
  std::vector<Piece> pieces;
  const auto& bp = field.breakpoints();
  for (int k = 0; k < field.layer_count(); ++k) {
    const double lo = std::max(a, bp[static_cast<std::size_t>(k)]);
    const double hi = std::min(b, bp[static_cast<std::size_t>(k) + 1]);
    if (!(hi > lo)) continue;
    const Tensor& A = field.layer_A(k);
    const Eigen::MatrixXd A11 = normal_block(A, N, n);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(A11);
    if (!lu.isInvertible()) throw Error("singular A^{11} block in layer " + std::to_string(k));
    pieces.push_back({lo, hi, k, lu.inverse(), normal_load(field.layer_F(k), N, n) - tangential_flux(A, q, N, n)});
  }

  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(N, N);
  Vec rhs = w_upper - w_lower;
  for (const Piece& p : pieces) {
    const double len = p.hi - p.lo;
    S += len * p.M;
    rhs -= len * p.M * p.shift;
  }
  sol.C_ = S.fullPivLu().solve(rhs);

  Vec w = w_lower;
  for (const Piece& p : pieces) {
    LaminateSolution::Segment s;
    s.lower = p.lo;
    s.upper = p.hi;
    s.layer = p.layer;
    s.slope = p.M * (sol.C_ + p.shift);
    s.w_lower = w;
    w = w + (p.hi - p.lo) * s.slope;
    sol.segments_.push_back(std::move(s));
  }
  return sol;
}

const LaminateSolution::Segment& LaminateSolution::segment_of(double x1) const {
  for (const Segment& s : segments_)
    if (x1 <= s.upper) return s;
  return segments_.back();
}

Vec LaminateSolution::w(double x1) const {
  const Segment& s = segment_of(x1);
  return s.w_lower + (x1 - s.lower) * s.slope;
}

Vec LaminateSolution::w_prime(double x1) const { return segment_of(x1).slope; }

Vec LaminateSolution::value(const Point& x) const { return w(x(0)) + q_ * tangential(x); }

Vec LaminateSolution::gradient(const Point& x) const {
  const Vec wp = w_prime(x(0));
  Vec du(components_ * dim_);
  for (int i = 0; i < components_; ++i) {
    du(i * dim_) = wp(i);
    for (int b = 1; b < dim_; ++b) du(i * dim_ + b) = q_(i, b - 1);
  }
  return du;
}

BoundaryData laminate_boundary(const LaminateSolution& solution) {
  return BoundaryData::function([solution](const Point& x) { return solution.value(x); }, "laminate_oracle");
}

Vec compute_W_point(const Tensor& A, const Vec& F, const Vec& Du, int components) {
  const int n = static_cast<int>(Du.size()) / components;
  const Vec flux = A * Du;
  Vec W = Du;
  for (int i = 0; i < components; ++i) W(i * n) = -flux(i * n) + F(i * n);
  return W;
}

std::vector<Vec> compute_W_laminate(const DiscreteSolution& solution, const CoefficientField& field,
                                    const std::vector<Point>& points) {
  std::vector<Vec> out;
  out.reserve(points.size());
  for (const Point& x : points)
    out.push_back(compute_W_point(field.A(x), field.F(x), solution.gradient_at(x), field.components()));
  return out;
}

std::vector<Vec> compute_W_laminate(const LaminateSolution& solution, const LaminateField& field,
                                    const std::vector<Point>& points) {
  std::vector<Vec> out;
  out.reserve(points.size());
  for (const Point& x : points)
    out.push_back(compute_W_point(field.A(x), field.F(x), solution.gradient(x), field.components()));
  return out;
}

PerturbedLaminateField::PerturbedLaminateField(std::shared_ptr<const LaminateField> base, double epsilon)
    : base_(std::move(base)), epsilon_(epsilon) {
  if (!base_) throw Error("perturbed laminate needs a base field");
  if (base_->dim() < 2) throw Error("perturbed laminate needs a tangential direction");
}

Vec PerturbedLaminateField::perturbation(const Point& x) const {
  Vec p = Vec::Zero(components());
  p(0) = epsilon_ * x(1) * x(1);
  return p;
}

Vec PerturbedLaminateField::perturbation_gradient(const Point& x) const {
  Vec dp = Vec::Zero(components() * dim());
  dp(1) = 2.0 * epsilon_ * x(1);
  return dp;
}

Vec PerturbedLaminateField::F(const Point& x) const { return base_->F(x) + base_->A(x) * perturbation_gradient(x); }

WDecayReport w_decay_check(const PerturbedLaminateField& field, const LaminateSolution& base_solution,
                           const StructuredGrid& grid, const Point& center, const std::vector<double>& radii,
                           const SolverOptions& options) {
  if (radii.size() < 3) throw Error("w_decay_check needs at least 3 radii");
  auto exact = [&](const Point& x) -> Vec { return base_solution.value(x) + field.perturbation(x); };
  const DiscreteSolution sol =
      assemble_and_solve(field, grid, BoundaryData::function(exact, "manufactured laminate perturbation"), options);
  const Vec mid_xi = Vec::Constant(grid.dim(), 0.5);
  const MidpointField W = MidpointField::sample(grid, [&](std::size_t e) {
    const Point x = grid.element_midpoint(e);
    return compute_W_point(field.A(x), field.F(x), sol.gradient_in_element(e, mid_xi), field.components());
  });
  WDecayReport rep;
  rep.excess = excess_scan(W, center, radii, "W");
  rep.nodal_error = nodal_max_error(sol, exact);
  return rep;
}

}  // namespace complab
