#include "complab/fields.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace complab {

ScalarProfile ScalarProfile::constant(double c) {
  ScalarProfile p;
  p.kind_ = Kind::constant;
  p.c_ = c;
  return p;
}

ScalarProfile ScalarProfile::affine(double c, Vec gradient, Point origin) {
  if (gradient.size() != origin.size()) throw Error("affine profile: gradient and origin sizes differ");
  ScalarProfile p;
  p.kind_ = Kind::affine;
  p.c_ = c;
  p.gradient_ = std::move(gradient);
  p.origin_ = std::move(origin);
  return p;
}

ScalarProfile ScalarProfile::holder_bump(double c, double b, Point origin, double exponent) {
  if (!(exponent > 0.0 && exponent <= 1.0)) throw Error("holder bump exponent must lie in (0, 1]");
  ScalarProfile p;
  p.kind_ = Kind::holder_bump;
  p.c_ = c;
  p.b_ = b;
  p.origin_ = std::move(origin);
  p.exponent_ = exponent;
  return p;
}

double ScalarProfile::operator()(const Point& x) const {
  switch (kind_) {
    case Kind::constant: return c_;
    case Kind::affine: return c_ + gradient_.dot(x - origin_);
    case Kind::holder_bump: return c_ + b_ * std::pow((x - origin_).norm(), exponent_);
  }
  return c_;
}

double ScalarProfile::seminorm(double mu, double diameter) const {
  switch (kind_) {
    case Kind::constant: return 0.0;
    case Kind::affine: return gradient_.norm() * std::pow(diameter, 1.0 - mu);
    case Kind::holder_bump:
      if (b_ == 0.0) return 0.0;
      if (exponent_ < mu) return std::numeric_limits<double>::infinity();
      return std::abs(b_) * std::pow(diameter, exponent_ - mu);
  }
  return 0.0;
}

Tensor isotropic_tensor(double a, int components, int dim) {
  return a * Tensor::Identity(components * dim, components * dim);
}

PiecewiseField::PiecewiseField(CompositeCube cube, std::vector<RegionCoefficients> regions, int components,
                               double lambda, double Lambda, double mu)
    : cube_(std::move(cube)), regions_(std::move(regions)), components_(components), lambda_(lambda),
      Lambda_(Lambda), mu_(mu) {
  if (static_cast<int>(regions_.size()) != cube_.region_count())
    throw Error("piecewise field needs one coefficient set per region");
  const int w = components_ * cube_.dim();
  for (const auto& r : regions_) {
    if (r.A_base.rows() != w || r.A_base.cols() != w) throw Error("region tensor has the wrong shape");
    if (r.F_base.size() != w) throw Error("region load has the wrong length");
  }
  if (!(lambda_ > 0.0) || !(Lambda_ >= lambda_)) throw Error("ellipticity constants need 0 < lambda <= Lambda");
}

int PiecewiseField::region_of(const Point& x) const { return classify_against_graphs(cube_.graphs(), x); }

Tensor PiecewiseField::A(const Point& x) const { return regions_[static_cast<std::size_t>(region_of(x))].A(x); }

Vec PiecewiseField::F(const Point& x) const { return regions_[static_cast<std::size_t>(region_of(x))].F(x); }

bool PiecewiseField::is_piecewise_constant() const {
  return std::all_of(regions_.begin(), regions_.end(), [](const auto& r) { return r.is_constant(); });
}

namespace {
double cube_diameter(const CompositeCube& c) { return 2.0 * c.halfwidth() * std::sqrt(double(c.dim())); }
}  // namespace

double PiecewiseField::A_seminorm(int k) const {
  const auto& r = region(k);
  return r.A_base.cwiseAbs().maxCoeff() * r.A_profile.seminorm(mu_, cube_diameter(cube_));
}

double PiecewiseField::F_seminorm(int k) const {
  const auto& r = region(k);
  if (r.F_base.size() == 0) return 0.0;
  return r.F_base.cwiseAbs().maxCoeff() * r.F_profile.seminorm(mu_, cube_diameter(cube_));
}

double PiecewiseField::A_seminorm_sup() const {
  double s = 0.0;
  for (int k = 0; k < cube_.region_count(); ++k) s = std::max(s, A_seminorm(k));
  return s;
}

double PiecewiseField::F_seminorm_sup() const {
  double s = 0.0;
  for (int k = 0; k < cube_.region_count(); ++k) s = std::max(s, F_seminorm(k));
  return s;
}

LaminateField::LaminateField(int dim, int components, std::vector<double> breakpoints, std::vector<Tensor> A,
                             std::vector<Vec> F, double lambda, double Lambda, DomainBox domain)
    : dim_(dim), components_(components), breakpoints_(std::move(breakpoints)), A_(std::move(A)),
      F_(std::move(F)), lambda_(lambda), Lambda_(Lambda), domain_(std::move(domain)) {
  if (A_.empty() || A_.size() != F_.size() || breakpoints_.size() != A_.size() + 1)
    throw Error("laminate needs layers+1 breakpoints and one A, F per layer");
  for (std::size_t k = 0; k + 1 < breakpoints_.size(); ++k)
    if (breakpoints_[k] > breakpoints_[k + 1]) throw OrderingViolation("laminate breakpoints must be ordered");
  const int w = components_ * dim_;
  for (std::size_t k = 0; k < A_.size(); ++k)
    if (A_[k].rows() != w || A_[k].cols() != w || F_[k].size() != w)
      throw Error("laminate layer has the wrong tensor shape");
}

int LaminateField::layer_of(double x1) const {
  const int layers = layer_count();
  for (int k = 0; k < layers; ++k)
    if (x1 <= breakpoints_[static_cast<std::size_t>(k + 1)]) return k;
  return layers - 1;
}

double min_rayleigh_quotient(const Tensor& A) {
  const Tensor sym = 0.5 * (A + A.transpose());
  Eigen::SelfAdjointEigenSolver<Tensor> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

EllipticityReport ellipticity_check(const CoefficientField& field, std::size_t num_samples, std::uint64_t seed) {
  const DomainBox box = field.domain();
  const int n = field.dim();
  std::vector<Point> pts;
  pts.push_back(box.center);
  for (int mask = 0; mask < (1 << n); ++mask) {
    Point c = box.center;
    for (int a = 0; a < n; ++a) c(a) += ((mask >> a) & 1) ? box.halfwidth : -box.halfwidth;
    pts.push_back(c);
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (std::size_t s = 0; s < num_samples; ++s) {
    Point x(n);
    for (int a = 0; a < n; ++a) x(a) = box.center(a) + box.halfwidth * unit(rng);
    pts.push_back(x);
  }

  EllipticityReport rep;
  rep.min_rayleigh = std::numeric_limits<double>::infinity();
  for (const Point& x : pts) {
    const Tensor A = field.A(x);
    const double ray = min_rayleigh_quotient(A);
    const double mx = A.cwiseAbs().maxCoeff();
    if (ray < rep.min_rayleigh) {
      rep.min_rayleigh = ray;
      rep.argmin = x;
    }
    if (mx > rep.max_abs_entry || rep.argmax.size() == 0) {
      rep.max_abs_entry = std::max(rep.max_abs_entry, mx);
      rep.argmax = x;
    }
    ++rep.samples;
  }
  const double tol = 1e-12;
  if (rep.min_rayleigh < field.lambda() * (1.0 - tol))
    throw EllipticityViolation("Legendre ellipticity fails: min Rayleigh quotient " +
                                   std::to_string(rep.min_rayleigh) + " < lambda at " + format_point(rep.argmin),
                               rep.argmin);
  if (rep.max_abs_entry > field.Lambda() * (1.0 + tol))
    throw EllipticityViolation("coefficient bound fails: |A| = " + std::to_string(rep.max_abs_entry) +
                                   " > Lambda at " + format_point(rep.argmax),
                               rep.argmax);
  return rep;
}

namespace {

std::vector<Point> nodal_cube_grid(const Point& center, double halfwidth, int points_per_axis) {
  const int n = static_cast<int>(center.size());
  const int p = std::max(points_per_axis, 2);
  std::size_t total = 1;
  for (int a = 0; a < n; ++a) total *= static_cast<std::size_t>(p);
  std::vector<Point> out;
  out.reserve(total);
  for (std::size_t idx = 0; idx < total; ++idx) {
    Point x(n);
    std::size_t rest = idx;
    for (int a = 0; a < n; ++a) {
      const auto i = static_cast<double>(rest % static_cast<std::size_t>(p));
      rest /= static_cast<std::size_t>(p);
      x(a) = center(a) - halfwidth + 2.0 * halfwidth * i / (p - 1);
    }
    out.push_back(std::move(x));
  }
  return out;
}

}  // namespace

PiecewiseField freeze_piecewise(const PiecewiseField& field, const std::vector<std::optional<Point>>& anchors) {
  const CompositeCube& cube = field.cube();
  if (static_cast<int>(anchors.size()) != cube.region_count())
    throw Error("freeze_piecewise needs one anchor slot per region");
  std::vector<RegionCoefficients> frozen;
  for (int k = 0; k < cube.region_count(); ++k) {
    const auto& anchor = anchors[static_cast<std::size_t>(k)];
    Point z = cube.center();
    if (anchor) {
      z = *anchor;
      if (!cube.contains(z) || classify_region(cube, z) != k)
        throw DomainError("anchor " + format_point(z) + " is not in region " + std::to_string(k));
    } else {
      for (const Point& x : nodal_cube_grid(cube.center(), cube.halfwidth(), 33))
        if (field.region_of(x) == k)
          throw DomainError("region " + std::to_string(k) + " is nonempty but has no anchor");
    }
    const auto& r = field.region(k);
    RegionCoefficients f;
    f.A_base = r.A(z);
    f.F_base = r.F(z);
    frozen.push_back(std::move(f));
  }
  return PiecewiseField(cube, std::move(frozen), field.components(), field.lambda(), field.Lambda(), field.mu());
}

CoefficientDefect coefficient_defect(const PiecewiseField& a, const PiecewiseField& b, int points_per_axis) {
  const CompositeCube& cube = a.cube();
  CoefficientDefect d;
  d.A_sup.assign(static_cast<std::size_t>(cube.region_count()), 0.0);
  d.F_sup.assign(static_cast<std::size_t>(cube.region_count()), 0.0);
  for (const Point& x : nodal_cube_grid(cube.center(), cube.halfwidth(), points_per_axis)) {
    const auto k = static_cast<std::size_t>(a.region_of(x));
    d.A_sup[k] = std::max(d.A_sup[k], (a.A(x) - b.A(x)).cwiseAbs().maxCoeff());
    const Vec df = a.F(x) - b.F(x);
    if (df.size()) d.F_sup[k] = std::max(d.F_sup[k], df.cwiseAbs().maxCoeff());
  }
  return d;
}

LaminateSubstitution laminate_substitute(const PiecewiseField& field, const Point& center, double theta, double nu,
                                         double R, int cells_per_axis) {
  if (!field.is_piecewise_constant()) throw Error("laminate_substitute needs a piecewise-constant field");
  const CompositeCube& cube = field.cube();
  const int n = cube.dim();
  const Vec ct = tangential(center);
  const TangentialBox tbox{ct, theta};
  const int scan = n == 3 ? std::min(cells_per_axis, 128) + 1 : cells_per_axis + 1;
  const auto tgrid = tangential_grid(tbox, scan);

  std::vector<Point> anchors;
  for (const auto& g : cube.graphs()) {
    Point z(n);
    z.tail(n - 1) = ct;
    z(0) = g.value(ct);
    if (std::abs(z(0) - center(0)) > theta) {
      double best = std::numeric_limits<double>::infinity();
      for (const Vec& xt : tgrid) {
        const double v = g.value(xt);
        const double d = (xt - ct).norm();
        if (std::abs(v - center(0)) <= theta && d < best) {
          best = d;
          z(0) = v;
          z.tail(n - 1) = xt;
        }
      }
    }
    if (!anchors.empty()) z(0) = std::max(z(0), anchors.back()(0));
    anchors.push_back(z);
  }

  const int layers = cube.region_count();
  std::vector<double> breaks(static_cast<std::size_t>(layers + 1));
  breaks.front() = -std::numeric_limits<double>::infinity();
  breaks.back() = std::numeric_limits<double>::infinity();
  for (int k = 1; k < layers; ++k) breaks[static_cast<std::size_t>(k)] = anchors[static_cast<std::size_t>(k)](0);
  std::vector<Tensor> As;
  std::vector<Vec> Fs;
  for (int k = 0; k < layers; ++k) {
    As.push_back(field.region(k).A_base);
    Fs.push_back(field.region(k).F_base);
  }
  LaminateField lam(n, field.components(), breaks, As, Fs, field.lambda(), field.Lambda(), {center, theta});

  const int m = n == 3 ? std::min(cells_per_axis, 64) : cells_per_axis;
  const double h = 2.0 * theta / m;
  std::size_t total = 1;
  for (int a = 0; a < n; ++a) total *= static_cast<std::size_t>(m);
  std::size_t mismatched = 0;
  for (std::size_t idx = 0; idx < total; ++idx) {
    Point x(n);
    std::size_t rest = idx;
    for (int a = 0; a < n; ++a) {
      x(a) = center(a) - theta + h * (static_cast<double>(rest % static_cast<std::size_t>(m)) + 0.5);
      rest /= static_cast<std::size_t>(m);
    }
    if (field.A(x) != lam.A(x) || field.F(x) != lam.F(x)) ++mismatched;
  }

  LaminateSubstitution out{std::move(lam), std::move(anchors), 0.0, 0.0, 0.0};
  out.mismatch_measure = static_cast<double>(mismatched) * std::pow(h, n);
  out.bound_scale = nu * std::pow(theta / R, 2.0 * field.mu()) * std::pow(theta, n);
  out.ratio = out.bound_scale > 0 ? out.mismatch_measure / out.bound_scale : 0.0;
  return out;
}

double holder_seminorm_estimate(const std::vector<Point>& points, const std::vector<Vec>& values,
                                const std::vector<int>& region_mask, int region, double mu) {
  if (points.size() != values.size() || points.size() != region_mask.size())
    throw Error("holder_seminorm_estimate: sample arrays differ in length");
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < points.size(); ++i)
    if (region_mask[i] == region) idx.push_back(i);
  if (idx.size() < 2) throw Error("holder_seminorm_estimate needs at least two samples in the region");
  double best = 0.0;
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = a + 1; b < idx.size(); ++b) {
      const double d = (points[idx[a]] - points[idx[b]]).norm();
      if (d == 0.0) continue;
      best = std::max(best, (values[idx[a]] - values[idx[b]]).norm() / std::pow(d, mu));
    }
  return best;
}

}  // namespace complab
