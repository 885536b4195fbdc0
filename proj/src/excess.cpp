#include "complab/excess.hpp"

#include <algorithm>
#include <cmath>

namespace complab {

MidpointField::MidpointField(StructuredGrid grid, std::vector<Vec> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.element_count()) throw Error("midpoint field does not match the grid");
}

MidpointField MidpointField::sample(const StructuredGrid& grid, const std::function<Vec(std::size_t)>& g) {
  std::vector<Vec> values(grid.element_count());
  for (std::size_t e = 0; e < values.size(); ++e) values[e] = g(e);
  return MidpointField(grid, std::move(values));
}

SnappedCube snap_cube(const StructuredGrid& grid, const Point& center, double rho) {
  SnappedCube c;
  c.center_node = grid.nearest_node(center);
  c.cells = std::max(1, static_cast<int>(std::lround(rho / grid.spacing())));
  c.rho = c.cells * grid.spacing();
  for (int a = 0; a < grid.dim(); ++a) {
    const int lo = c.center_node[static_cast<std::size_t>(a)] - c.cells;
    const int hi = c.center_node[static_cast<std::size_t>(a)] + c.cells;
    if (lo < 0 || hi > grid.cells()) throw DomainError("cube of radius " + std::to_string(rho) + " around " +
                                                       format_point(center) + " leaves the grid");
  }
  return c;
}

namespace {

template <class Visit>
void for_each_element(const StructuredGrid& grid, const SnappedCube& c, Visit&& visit) {
  const int n = grid.dim();
  std::array<int, 3> lo{0, 0, 0}, idx{0, 0, 0};
  for (int a = 0; a < n; ++a) lo[static_cast<std::size_t>(a)] = c.center_node[static_cast<std::size_t>(a)] - c.cells;
  const int side = 2 * c.cells;
  long total = 1;
  for (int a = 0; a < n; ++a) total *= side;
  for (long q = 0; q < total; ++q) {
    long rest = q;
    for (int a = 0; a < n; ++a) {
      idx[static_cast<std::size_t>(a)] = lo[static_cast<std::size_t>(a)] + static_cast<int>(rest % side);
      rest /= side;
    }
    visit(grid.element_index(idx));
  }
}

struct Moments {
  double mean_sq = 0.0;  // mean |g - mean|^2
  Vec mean;
  long count = 0;
};

Moments moments(const MidpointField& field, const Point& center, double rho) {
  const SnappedCube c = snap_cube(field.grid(), center, rho);
  Moments m;
  for_each_element(field.grid(), c, [&](std::size_t e) {
    if (m.count == 0) m.mean = Vec::Zero(field.at(e).size());
    m.mean += field.at(e);
    ++m.count;
  });
  m.mean /= static_cast<double>(m.count);
  for_each_element(field.grid(), c, [&](std::size_t e) { m.mean_sq += (field.at(e) - m.mean).squaredNorm(); });
  m.mean_sq /= static_cast<double>(m.count);
  return m;
}

}  // namespace

double excess(const MidpointField& field, const Point& center, double rho) {
  return moments(field, center, rho).mean_sq;
}

double excess_integral(const MidpointField& field, const Point& center, double rho) {
  const Moments m = moments(field, center, rho);
  return m.mean_sq * static_cast<double>(m.count) * std::pow(field.grid().spacing(), field.grid().dim());
}

double excess(const std::vector<Vec>& samples) {
  if (samples.size() < 8) throw Error("excess needs at least 8 samples");
  Vec mean = Vec::Zero(samples.front().size());
  for (const Vec& s : samples) mean += s;
  mean /= static_cast<double>(samples.size());
  double e = 0.0;
  for (const Vec& s : samples) e += (s - mean).squaredNorm();
  return e / static_cast<double>(samples.size());
}

DecayFit decay_fit(const std::vector<double>& radii, const std::vector<double>& values, double zero_threshold) {
  if (radii.size() != values.size()) throw Error("decay_fit: radii and values differ in length");
  DecayFit fit;
  std::vector<double> lx, ly;
  bool any_positive = false;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (values[i] > zero_threshold) {
      any_positive = true;
      lx.push_back(std::log(radii[i]));
      ly.push_back(std::log(values[i]));
    }
  }
  fit.used = lx.size();
  if (!any_positive) {
    fit.status = "exact";
    fit.slope = std::numeric_limits<double>::infinity();
    return fit;
  }
  if (lx.size() < 3) {
    fit.status = "insufficient";
    fit.slope = std::numeric_limits<double>::quiet_NaN();
    return fit;
  }
  const double k = static_cast<double>(lx.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
  }
  const double mx = sx / k, my = sy / k;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
    rss += r * r;
  }
  fit.residual = std::sqrt(rss / k);
  fit.status = "fit";
  return fit;
}

std::vector<double> dyadic_radii(const StructuredGrid& grid, double min_cells) {
  std::vector<double> radii;
  for (double rho = grid.halfwidth() / 2.0; rho >= min_cells * grid.spacing() * (1.0 - 1e-12); rho /= 2.0)
    radii.push_back(rho);
  return radii;
}

ExcessReport excess_scan(const MidpointField& field, const Point& center, const std::vector<double>& radii,
                         const std::string& tag) {
  if (radii.size() < 3) throw Error("excess_scan needs at least 3 radii");
  ExcessReport rep;
  rep.center = center;
  rep.tag = tag;
  rep.radii = radii;
  std::sort(rep.radii.begin(), rep.radii.end(), std::greater<>());
  double scale = 1.0;
  for (double rho : rep.radii) {
    const Moments m = moments(field, center, rho);
    rep.values.push_back(m.mean_sq);
    scale = std::max(scale, m.mean.norm());
  }
  const double threshold = 1e-18 * scale * scale;
  rep.fit = decay_fit(rep.radii, rep.values, threshold);
  return rep;
}

}  // namespace complab
