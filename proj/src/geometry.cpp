#include "complab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace complab {

std::string format_point(const Point& x) {
  std::ostringstream os;
  os << '(';
  for (Eigen::Index i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x(i);
  os << ')';
  return os.str();
}

double TangentialBox::diameter() const { return 2.0 * halfwidth * std::sqrt(static_cast<double>(dim())); }

namespace {

void check_gamma(double gamma) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw Error("Hoelder exponent gamma must lie in (0, 1]");
}

std::vector<Vec> box_corners(const TangentialBox& box) {
  const int d = box.dim();
  std::vector<Vec> corners;
  for (int mask = 0; mask < (1 << d); ++mask) {
    Vec c = box.center;
    for (int a = 0; a < d; ++a) c(a) += ((mask >> a) & 1) ? box.halfwidth : -box.halfwidth;
    corners.push_back(c);
  }
  return corners;
}

// Range of sin over [lo, hi].
std::pair<double, double> sin_range(double lo, double hi) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  if (hi - lo >= two_pi) return {-1.0, 1.0};
  double mn = std::min(std::sin(lo), std::sin(hi));
  double mx = std::max(std::sin(lo), std::sin(hi));
  auto contains_phase = [&](double phase) {
    const double k = std::ceil((lo - phase) / two_pi);
    return phase + k * two_pi <= hi;
  };
  if (contains_phase(std::numbers::pi / 2)) mx = 1.0;
  if (contains_phase(-std::numbers::pi / 2)) mn = -1.0;
  return {mn, mx};
}

// sup over 0 < d <= dmax of 2|sin(w d / 2)| / d^g, by dense scan plus golden refinement.
double sine_quotient_sup(double w, double g, double dmax) {
  if (g >= 1.0) return w;
  auto f = [&](double d) { return 2.0 * std::abs(std::sin(0.5 * w * d)) / std::pow(d, g); };
  const int n = 20000;
  double best = 0.0;
  int best_i = 1;
  for (int i = 1; i <= n; ++i) {
    const double v = f(dmax * i / n);
    if (v > best) {
      best = v;
      best_i = i;
    }
  }
  double a = dmax * (best_i - 1) / n;
  double b = std::min(dmax, dmax * (best_i + 1) / n);
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 100; ++it) {
    const double c = b - phi * (b - a);
    const double d = a + phi * (b - a);
    if (c > 0 && f(c) > f(d)) b = d; else a = c;
  }
  const double mid = 0.5 * (a + b);
  if (mid > 0) best = std::max(best, f(mid));
  return best;
}

// Range of t*s + a cos(w (s - s0)) for s in [lo, hi], dense scan.
std::pair<double, double> tilted_cosine_range(double t, double a, double w, double s0, double lo, double hi) {
  const int n = 10000;
  double mn = std::numeric_limits<double>::infinity();
  double mx = -mn;
  for (int i = 0; i <= n; ++i) {
    const double s = lo + (hi - lo) * i / n;
    const double v = t * s + a * std::cos(w * (s - s0));
    mn = std::min(mn, v);
    mx = std::max(mx, v);
  }
  return {mn, mx};
}

}  // namespace

GraphFunction GraphFunction::constant(int tangential_dim, double value, double gamma, double halfwidth) {
  check_gamma(gamma);
  GraphFunction g;
  g.kind_ = Kind::constant;
  g.offset_ = value;
  g.tilt_ = Vec::Zero(tangential_dim);
  g.anchor_ = Vec::Zero(tangential_dim);
  g.gamma_ = gamma;
  g.halfwidth_ = halfwidth;
  return g;
}

GraphFunction GraphFunction::affine(double value, const Vec& slope, double gamma, double halfwidth) {
  GraphFunction g = constant(static_cast<int>(slope.size()), value, gamma, halfwidth);
  g.kind_ = Kind::affine;
  g.tilt_ = slope;
  return g;
}

GraphFunction GraphFunction::parabola(int tangential_dim, double value, double amplitude, const Vec& vertex,
                                      double gamma, double halfwidth) {
  GraphFunction g = constant(tangential_dim, value, gamma, halfwidth);
  g.kind_ = Kind::parabola;
  g.amplitude_ = amplitude;
  g.anchor_ = vertex;
  return g;
}

GraphFunction GraphFunction::parabola(int tangential_dim, double value, double amplitude, double gamma,
                                      double halfwidth) {
  return parabola(tangential_dim, value, amplitude, Vec::Zero(tangential_dim), gamma, halfwidth);
}

GraphFunction GraphFunction::sinusoid(int tangential_dim, double value, double amplitude, double frequency,
                                      double shift, double gamma, double halfwidth) {
  GraphFunction g = constant(tangential_dim, value, gamma, halfwidth);
  g.kind_ = Kind::sinusoid;
  g.amplitude_ = amplitude;
  g.frequency_ = frequency;
  g.anchor_(0) = shift;
  return g;
}

std::string GraphFunction::kind_name() const {
  switch (kind_) {
    case Kind::constant: return "constant";
    case Kind::affine: return "affine";
    case Kind::parabola: return "parabola";
    case Kind::sinusoid: return "sinusoid";
  }
  return "unknown";
}

double GraphFunction::value(const Vec& xt) const {
  double v = offset_ + tilt_.dot(xt);
  switch (kind_) {
    case Kind::parabola: v += amplitude_ * (xt - anchor_).squaredNorm(); break;
    case Kind::sinusoid: v += amplitude_ * std::cos(frequency_ * (xt(0) - anchor_(0))); break;
    default: break;
  }
  return v;
}

Vec GraphFunction::gradient(const Vec& xt) const {
  Vec g = tilt_;
  switch (kind_) {
    case Kind::parabola: g += 2.0 * amplitude_ * (xt - anchor_); break;
    case Kind::sinusoid: g(0) -= amplitude_ * frequency_ * std::sin(frequency_ * (xt(0) - anchor_(0))); break;
    default: break;
  }
  return g;
}

double GraphFunction::gradient_seminorm(const TangentialBox& box, double gamma) const {
  check_gamma(gamma);
  switch (kind_) {
    case Kind::parabola: return 2.0 * std::abs(amplitude_) * std::pow(box.diameter(), 1.0 - gamma);
    case Kind::sinusoid:
      return std::abs(amplitude_) * frequency_ * sine_quotient_sup(frequency_, gamma, 2.0 * box.halfwidth);
    default: return 0.0;
  }
}

double GraphFunction::gradient_sup(const TangentialBox& box) const {
  switch (kind_) {
    case Kind::parabola: {
      double best = 0.0;
      for (const Vec& c : box_corners(box)) best = std::max(best, gradient(c).norm());
      return best;
    }
    case Kind::sinusoid: {
      const double lo = frequency_ * (box.center(0) - box.halfwidth - anchor_(0));
      const double hi = frequency_ * (box.center(0) + box.halfwidth - anchor_(0));
      const auto [smin, smax] = sin_range(lo, hi);
      double best = 0.0;
      for (double s : {smin, smax}) {
        Vec g = tilt_;
        g(0) -= amplitude_ * frequency_ * s;
        best = std::max(best, g.norm());
      }
      return best;
    }
    default: return tilt_.norm();
  }
}

double GraphFunction::sup_norm(const TangentialBox& box) const {
  const auto corners = box_corners(box);
  double mx = -std::numeric_limits<double>::infinity();
  double mn = std::numeric_limits<double>::infinity();
  switch (kind_) {
    case Kind::parabola: {
      for (const Vec& c : corners) {
        const double v = value(c);
        mx = std::max(mx, v);
        mn = std::min(mn, v);
      }
      if (amplitude_ != 0.0) {
        // The interior extremum of a separable quadratic sits at the clamped critical point.
        Vec s = anchor_ - tilt_ / (2.0 * amplitude_);
        for (int a = 0; a < s.size(); ++a)
          s(a) = std::clamp(s(a), box.center(a) - box.halfwidth, box.center(a) + box.halfwidth);
        const double v = value(s);
        mx = std::max(mx, v);
        mn = std::min(mn, v);
      }
      break;
    }
    case Kind::sinusoid: {
      const auto [gmin, gmax] = tilted_cosine_range(tilt_(0), amplitude_, frequency_, anchor_(0),
                                                    box.center(0) - box.halfwidth, box.center(0) + box.halfwidth);
      double rmin = offset_, rmax = offset_;
      for (int a = 1; a < box.dim(); ++a) {
        const double e1 = tilt_(a) * (box.center(a) - box.halfwidth);
        const double e2 = tilt_(a) * (box.center(a) + box.halfwidth);
        rmin += std::min(e1, e2);
        rmax += std::max(e1, e2);
      }
      mn = gmin + rmin;
      mx = gmax + rmax;
      break;
    }
    default:
      for (const Vec& c : corners) {
        const double v = value(c);
        mx = std::max(mx, v);
        mn = std::min(mn, v);
      }
  }
  return std::max(std::abs(mx), std::abs(mn));
}

GraphFunction GraphFunction::transformed(const Point& base, const Vec& slope) const {
  const Vec zt = tangential(base);
  GraphFunction g = *this;
  g.offset_ = offset_ + tilt_.dot(zt) - base(0);
  g.tilt_ = tilt_ - slope;
  g.anchor_ = anchor_ - zt;
  return g;
}

GraphFunction GraphFunction::scaled(double s) const {
  if (!(s > 0.0)) throw Error("scale factor must be positive");
  GraphFunction g = *this;
  g.offset_ = s * offset_;
  g.anchor_ = s * anchor_;
  g.halfwidth_ = s * halfwidth_;
  if (kind_ == Kind::parabola) g.amplitude_ = amplitude_ / s;
  if (kind_ == Kind::sinusoid) {
    g.amplitude_ = s * amplitude_;
    g.frequency_ = frequency_ / s;
  }
  return g;
}

TangentialBox GraphFunction::domain() const { return {Vec::Zero(tangential_dim()), halfwidth_}; }

std::vector<Vec> tangential_grid(const TangentialBox& box, int points_per_axis) {
  const int d = box.dim();
  const int p = std::max(points_per_axis, 2);
  std::size_t total = 1;
  for (int a = 0; a < d; ++a) total *= static_cast<std::size_t>(p);
  std::vector<Vec> out;
  out.reserve(total);
  for (std::size_t idx = 0; idx < total; ++idx) {
    Vec x(d);
    std::size_t rest = idx;
    for (int a = 0; a < d; ++a) {
      const auto i = static_cast<double>(rest % static_cast<std::size_t>(p));
      rest /= static_cast<std::size_t>(p);
      x(a) = box.center(a) - box.halfwidth + 2.0 * box.halfwidth * i / (p - 1);
    }
    out.push_back(std::move(x));
  }
  return out;
}

double sampled_gradient_seminorm(const GraphFunction& graph, const TangentialBox& box, double gamma,
                                 int points_per_axis) {
  const auto pts = tangential_grid(box, points_per_axis);
  std::vector<Vec> grads;
  grads.reserve(pts.size());
  for (const auto& p : pts) grads.push_back(graph.gradient(p));
  double best = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const double d = (pts[i] - pts[j]).norm();
      best = std::max(best, (grads[i] - grads[j]).norm() / std::pow(d, gamma));
    }
  return best;
}

CompositeCube::CompositeCube(Point center, double halfwidth, std::vector<GraphFunction> graphs, double gamma,
                             int check_points_per_axis)
    : center_(std::move(center)), halfwidth_(halfwidth), graphs_(std::move(graphs)), gamma_(gamma) {
  check_gamma(gamma_);
  if (dim() < 2 || dim() > 3) throw Error("composite cube dimension must be 2 or 3");
  if (!(halfwidth_ > 0.0)) throw Error("composite cube halfwidth must be positive");
  if (graphs_.size() < 2) throw Error("composite cube needs at least two graphs");
  for (const auto& g : graphs_)
    if (g.tangential_dim() != dim() - 1) throw Error("graph tangential dimension does not match the cube");
  if (check_points_per_axis > 0) {
    const int p = dim() == 3 ? std::min(check_points_per_axis, 256) : check_points_per_axis;
    for (const Vec& xt : tangential_grid(tangential_box(), p))
      for (std::size_t k = 0; k + 1 < graphs_.size(); ++k)
        if (graphs_[k].value(xt) > graphs_[k + 1].value(xt) + 1e-12)
          throw OrderingViolation("graphs " + std::to_string(k) + " and " + std::to_string(k + 1) +
                                  " cross at x' = " + format_point(xt));
  }
}

bool CompositeCube::contains(const Point& x, double slack) const {
  if (x.size() != center_.size()) return false;
  const double tol = halfwidth_ + slack * std::max(1.0, halfwidth_);
  return ((x - center_).cwiseAbs().array() <= tol).all();
}

TangentialBox CompositeCube::tangential_box(double halfwidth) const { return {tangential(center_), halfwidth}; }

bool CompositeCube::satisfies_minimum_condition(double R, int points_per_axis) const {
  const auto pts = tangential_grid(tangential_box(3.0 * R), dim() == 3 ? std::min(points_per_axis, 128)
                                                                        : points_per_axis);
  for (const auto& g : graphs_) {
    double inf = std::numeric_limits<double>::infinity();
    for (const auto& p : pts) inf = std::min(inf, std::abs(g.value(p)));
    if (!(inf < 4.0 * R)) return false;
  }
  return true;
}

CompositeCube CompositeCube::scaled(double s) const {
  std::vector<GraphFunction> g;
  g.reserve(graphs_.size());
  for (const auto& gr : graphs_) g.push_back(gr.scaled(s));
  return CompositeCube(s * center_, s * halfwidth_, std::move(g), gamma_, 0);
}

int classify_against_graphs(const std::vector<GraphFunction>& graphs, const Point& x) {
  const Vec xt = tangential(x);
  const int regions = static_cast<int>(graphs.size()) - 1;
  for (int k = 0; k < regions; ++k)
    if (x(0) <= graphs[static_cast<std::size_t>(k + 1)].value(xt)) return k;
  return regions - 1;
}

int classify_region(const CompositeCube& cube, const Point& x) {
  if (!cube.contains(x)) throw DomainError("point " + format_point(x) + " lies outside the composite cube");
  return classify_against_graphs(cube.graphs(), x);
}

namespace {

struct RegionInterpolation {
  int region;
  double t;
  Vec xt;
};

RegionInterpolation interpolate(const std::vector<GraphFunction>& graphs, const Point& x) {
  const int k = classify_against_graphs(graphs, x);
  Vec xt = tangential(x);
  const double lo = graphs[static_cast<std::size_t>(k)].value(xt);
  const double hi = graphs[static_cast<std::size_t>(k + 1)].value(xt);
  const double thickness = hi - lo;
  if (thickness < kDegenerateThickness)
    throw DegenerateThickness("graphs " + std::to_string(k) + " and " + std::to_string(k + 1) +
                              " touch at x' = " + format_point(xt));
  return {k, std::clamp((x(0) - lo) / thickness, 0.0, 1.0), std::move(xt)};
}

}  // namespace

double interpolation_parameter(const CompositeCube& cube, const Point& x) {
  if (!cube.contains(x)) throw DomainError("point " + format_point(x) + " lies outside the composite cube");
  return interpolate(cube.graphs(), x).t;
}

FlowDerivativeSample flow_derivative_unchecked(const std::vector<GraphFunction>& graphs, const Point& x) {
  const auto [k, t, xt] = interpolate(graphs, x);
  FlowDerivativeSample s;
  s.point = x;
  s.region = k;
  s.pi = Vec::Zero(x.size());
  s.pi(0) = -1.0;
  s.pi.tail(x.size() - 1) = graphs[static_cast<std::size_t>(k + 1)].gradient(xt) * t +
                            graphs[static_cast<std::size_t>(k)].gradient(xt) * (1.0 - t);
  return s;
}

FlowDerivativeSample flow_derivative(const CompositeCube& cube, const Point& x) {
  if (!cube.contains(x)) throw DomainError("point " + format_point(x) + " lies outside the composite cube");
  return flow_derivative_unchecked(cube.graphs(), x);
}

NoncrossReport noncross_bound_check(const GraphFunction& phi_k, const GraphFunction& phi_l, double rho, double r,
                                    double gamma, const Vec& center, int points_per_axis) {
  check_gamma(gamma);
  if (!(rho > 0.0 && r > 0.0)) throw Error("noncross_bound_check needs positive rho and r");
  const Vec c = center.size() ? center : Vec::Zero(phi_k.tangential_dim());
  const TangentialBox outer{c, r + rho};
  const TangentialBox inner{c, r};

  NoncrossReport rep;
  rep.c1 = std::max(phi_k.gradient_seminorm(outer, gamma), phi_l.gradient_seminorm(outer, gamma));
  rep.c2 = std::max(phi_k.sup_norm(outer), phi_l.sup_norm(outer));

  auto check_order = [&](const Vec& xt) {
    const double lo = phi_k.value(xt), hi = phi_l.value(xt);
    if (hi < lo - 1e-12 * std::max(1.0, std::abs(lo)))
      throw OrderingViolation("phi_l < phi_k at x' = " + format_point(xt));
    return std::max(hi - lo, 0.0);
  };
  const int outer_points = phi_k.tangential_dim() > 1 ? std::min(points_per_axis, 128) : points_per_axis;
  for (const Vec& xt : tangential_grid(outer, outer_points)) check_order(xt);

  const double coeff =
      3.0 / rho * std::pow(std::pow(rho, 1.0 + gamma) * rep.c1 + 2.0 * rep.c2, 1.0 / (gamma + 1.0));
  rep.max_violation = -std::numeric_limits<double>::infinity();
  for (const Vec& xt : tangential_grid(inner, points_per_axis)) {
    const double gap = check_order(xt);
    const double lhs = (phi_l.gradient(xt) - phi_k.gradient(xt)).norm();
    const double rhs = coeff * std::pow(gap, gamma / (gamma + 1.0));
    rep.max_violation = std::max(rep.max_violation, lhs - rhs);
    if (rhs > 0.0) rep.max_ratio = std::max(rep.max_ratio, lhs / rhs);
    ++rep.samples;
  }
  return rep;
}

double mu_of_gamma(double gamma) {
  check_gamma(gamma);
  return gamma / (2.0 * (gamma + 1.0));
}

double kappa_constant(const CompositeCube& cube, double coefficient_seminorm_sup, double R) {
  const double gamma = cube.gamma();
  const TangentialBox box = cube.tangential_box(3.0 * R);
  double seminorm = 0.0, grad = 0.0;
  for (const auto& g : cube.graphs()) {
    seminorm = std::max(seminorm, g.gradient_seminorm(box, gamma));
    grad = std::max(grad, g.gradient_sup(box));
  }
  const double n = cube.dim();
  return 18.0 * n * (1.0 + std::pow(R, gamma) * seminorm + grad) +
         std::pow(R, 2.0 * mu_of_gamma(gamma)) * coefficient_seminorm_sup * coefficient_seminorm_sup;
}

namespace {

struct PairSample {
  Vec u;  // unit coordinates in [-1, 1]^n
  Vec v;
  double ratio = 0.0;
};

class PiQuotient {
 public:
  PiQuotient(const CompositeCube& cube, double R)
      : cube_(cube), R_(R), exponent_(2.0 * mu_of_gamma(cube.gamma())) {}

  Point map(const Vec& u) const { return cube_.center() + cube_.halfwidth() * u; }

  double operator()(const Vec& u, const Vec& v) const {
    const Point y = map(u), z = map(v);
    const double d = (y - z).norm();
    if (d == 0.0) return 0.0;
    try {
      const Vec py = flow_derivative_unchecked(cube_.graphs(), y).tangential_part();
      const Vec pz = flow_derivative_unchecked(cube_.graphs(), z).tangential_part();
      return (py - pz).norm() / std::pow(d / R_, exponent_);
    } catch (const DegenerateThickness&) {
      return 0.0;
    }
  }

 private:
  const CompositeCube& cube_;
  double R_;
  double exponent_;
};

// Local random search around the best pairs; works in unit coordinates so the
// result is invariant under rescaling of the cube.
double refine(const PiQuotient& q, std::vector<PairSample> pairs, std::uint64_t seed) {
  if (pairs.empty()) return 0.0;
  const std::size_t keep = std::min<std::size_t>(8, pairs.size());
  std::partial_sort(pairs.begin(), pairs.begin() + static_cast<std::ptrdiff_t>(keep), pairs.end(),
                    [](const PairSample& a, const PairSample& b) { return a.ratio > b.ratio; });
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  double best = pairs.front().ratio;
  for (std::size_t p = 0; p < keep; ++p) {
    PairSample cur = pairs[p];
    double step = 0.25 * std::max((cur.u - cur.v).norm(), 1e-6);
    int failures = 0;
    for (int it = 0; it < 120; ++it) {
      PairSample cand = cur;
      for (Eigen::Index a = 0; a < cand.u.size(); ++a) {
        cand.u(a) = std::clamp(cand.u(a) + step * normal(rng), -1.0, 1.0);
        cand.v(a) = std::clamp(cand.v(a) + step * normal(rng), -1.0, 1.0);
      }
      cand.ratio = q(cand.u, cand.v);
      if (cand.ratio > cur.ratio) {
        cur = cand;
        failures = 0;
      } else if (++failures >= 6) {
        step *= 0.5;
        failures = 0;
      }
    }
    best = std::max(best, cur.ratio);
  }
  return best;
}

}  // namespace

PiHolderReport pi_holder_check(const CompositeCube& cube, double kappa, double R, std::size_t num_pairs,
                               std::uint64_t seed, double stability_tolerance) {
  const int n = cube.dim();
  const PiQuotient q(cube, R);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> log_scale(-4.0, 0.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<PairSample> pairs;
  pairs.reserve(num_pairs);
  for (std::size_t i = 0; i < num_pairs; ++i) {
    PairSample s;
    s.u = Vec(n);
    for (int a = 0; a < n; ++a) s.u(a) = unit(rng);
    s.v = Vec(n);
    if (i % 2 == 0) {
      for (int a = 0; a < n; ++a) s.v(a) = unit(rng);
    } else {
      Vec dir(n);
      for (int a = 0; a < n; ++a) dir(a) = normal(rng);
      dir.normalize();
      const double dist = std::pow(10.0, log_scale(rng));
      for (int a = 0; a < n; ++a) s.v(a) = std::clamp(s.u(a) + dist * dir(a), -1.0, 1.0);
    }
    s.ratio = q(s.u, s.v);
    pairs.push_back(std::move(s));
  }

  PiHolderReport rep;
  rep.pairs = num_pairs;
  for (const auto& p : pairs) rep.ratios.push_back(p.ratio);
  const std::size_t coarse_count = std::max<std::size_t>(1, num_pairs / 10);
  rep.coarse_constant =
      refine(q, std::vector<PairSample>(pairs.begin(), pairs.begin() + static_cast<std::ptrdiff_t>(coarse_count)),
             seed + 1);
  rep.fitted_constant = std::max(rep.coarse_constant, refine(q, pairs, seed + 2));
  rep.fitted_over_kappa = kappa > 0 ? rep.fitted_constant / kappa : 0.0;
  const double scale = std::max(rep.fitted_constant, 1e-300);
  rep.stable = rep.fitted_constant == 0.0 ||
               std::abs(rep.fitted_constant - rep.coarse_constant) <= stability_tolerance * scale;
  rep.exponent_ok = std::isfinite(rep.fitted_constant) && rep.stable;
  return rep;
}

}  // namespace complab
