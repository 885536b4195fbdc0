#pragma once

#include "complab/grid.hpp"

#include <functional>
#include <string>
#include <vector>

namespace complab {

/// A vector field sampled once per element midpoint of a structured grid.
class MidpointField {
 public:
  MidpointField(StructuredGrid grid, std::vector<Vec> values);
  static MidpointField sample(const StructuredGrid& grid, const std::function<Vec(std::size_t element)>& g);

  const StructuredGrid& grid() const { return grid_; }
  const Vec& at(std::size_t element) const { return values_[element]; }
  std::size_t size() const { return values_.size(); }

 private:
  StructuredGrid grid_;
  std::vector<Vec> values_;
};

/// Cube snapped to the grid: center at the nearest node, halfwidth a whole
/// number of cells (at least one).
struct SnappedCube {
  std::array<int, 3> center_node{0, 0, 0};
  int cells = 1;
  double rho = 0.0;
};

SnappedCube snap_cube(const StructuredGrid& grid, const Point& center, double rho);

/// Mean of |g - mean g|^2 over the midpoints inside the snapped cube Q_rho(center).
double excess(const MidpointField& field, const Point& center, double rho);
/// Same on raw samples (at least 8).
double excess(const std::vector<Vec>& samples);
/// Integral of |g - mean g|^2 over the snapped cube.
double excess_integral(const MidpointField& field, const Point& center, double rho);

struct DecayFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // root mean square residual of the log-log fit
  std::string status;     // "fit", "exact" or "insufficient"
  std::size_t used = 0;
};

/// Least-squares slope of log E against log rho. Values at or below
/// zero_threshold are treated as exact zeros.
DecayFit decay_fit(const std::vector<double>& radii, const std::vector<double>& values, double zero_threshold = 0.0);

struct ExcessReport {
  Point center;
  std::string tag;
  std::vector<double> radii;   // descending
  std::vector<double> values;
  DecayFit fit;
};

/// Dyadic radii r/2, r/4, ... down to 8h, where r is the grid halfwidth.
std::vector<double> dyadic_radii(const StructuredGrid& grid, double min_cells = 8.0);

/// Excess at each radius plus the decay fit. Zero excess is relative to the
/// field magnitude: E <= (1e-9 max(1, |mean g|))^2 counts as exact.
ExcessReport excess_scan(const MidpointField& field, const Point& center, const std::vector<double>& radii,
                         const std::string& tag);

}  // namespace complab
