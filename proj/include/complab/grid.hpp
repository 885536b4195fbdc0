#pragma once

#include "complab/types.hpp"

#include <array>
#include <cstddef>
#include <vector>

namespace complab {

/// Uniform tensor grid over the cube center + [-r, r]^n with m cells per axis.
/// Nodes and elements are numbered with axis 0 fastest.
class StructuredGrid {
 public:
  StructuredGrid(Point center, double halfwidth, int cells_per_axis);

  int dim() const { return static_cast<int>(center_.size()); }
  int cells() const { return m_; }
  double spacing() const { return h_; }
  double halfwidth() const { return r_; }
  const Point& center() const { return center_; }
  Point lower_corner() const { return center_.array() - r_; }

  std::size_t node_count() const;
  std::size_t element_count() const;
  Point node_point(std::size_t node) const;
  std::array<int, 3> node_multi(std::size_t node) const;
  std::size_t node_index(const std::array<int, 3>& multi) const;
  bool is_boundary_node(std::size_t node) const;

  std::array<int, 3> element_multi(std::size_t element) const;
  std::size_t element_index(const std::array<int, 3>& multi) const;
  Point element_midpoint(std::size_t element) const;
  /// Element nodes ordered by local bit pattern (bit a set = upper side along axis a).
  std::vector<std::size_t> element_nodes(std::size_t element) const;

  /// Element containing x; points on a face go to the lower-index element.
  std::size_t locate(const Point& x) const;
  bool contains(const Point& x, double slack = 1e-12) const;

  /// Index of the node nearest to x along each axis.
  std::array<int, 3> nearest_node(const Point& x) const;

 private:
  Point center_;
  double r_;
  int m_;
  double h_;
};

/// Q1 shape-function gradients at local coordinates xi in [0,1]^n, scaled by 1/h.
/// Row a holds the gradient of local node a.
Eigen::MatrixXd q1_gradients(const Vec& xi, double h);
Vec q1_values(const Vec& xi);

}  // namespace complab
