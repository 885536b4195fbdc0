#include "complab/grid.hpp"

#include <algorithm>
#include <cmath>

namespace complab {

StructuredGrid::StructuredGrid(Point center, double halfwidth, int cells_per_axis)
    : center_(std::move(center)), r_(halfwidth), m_(cells_per_axis), h_(2.0 * halfwidth / cells_per_axis) {
  if (m_ < 2) throw Error("structured grid needs at least 2 cells per axis");
  if (dim() < 1 || dim() > 3) throw Error("structured grid dimension must be 1, 2 or 3");
  if (!(r_ > 0.0)) throw Error("structured grid halfwidth must be positive");
}

std::size_t StructuredGrid::node_count() const {
  std::size_t c = 1;
  for (int a = 0; a < dim(); ++a) c *= static_cast<std::size_t>(m_ + 1);
  return c;
}

std::size_t StructuredGrid::element_count() const {
  std::size_t c = 1;
  for (int a = 0; a < dim(); ++a) c *= static_cast<std::size_t>(m_);
  return c;
}

std::array<int, 3> StructuredGrid::node_multi(std::size_t node) const {
  std::array<int, 3> idx{0, 0, 0};
  for (int a = 0; a < dim(); ++a) {
    idx[static_cast<std::size_t>(a)] = static_cast<int>(node % static_cast<std::size_t>(m_ + 1));
    node /= static_cast<std::size_t>(m_ + 1);
  }
  return idx;
}

std::size_t StructuredGrid::node_index(const std::array<int, 3>& multi) const {
  std::size_t idx = 0;
  for (int a = dim() - 1; a >= 0; --a)
    idx = idx * static_cast<std::size_t>(m_ + 1) + static_cast<std::size_t>(multi[static_cast<std::size_t>(a)]);
  return idx;
}

Point StructuredGrid::node_point(std::size_t node) const {
  const auto idx = node_multi(node);
  Point x(dim());
  for (int a = 0; a < dim(); ++a) x(a) = center_(a) - r_ + h_ * idx[static_cast<std::size_t>(a)];
  return x;
}

bool StructuredGrid::is_boundary_node(std::size_t node) const {
  const auto idx = node_multi(node);
  for (int a = 0; a < dim(); ++a)
    if (idx[static_cast<std::size_t>(a)] == 0 || idx[static_cast<std::size_t>(a)] == m_) return true;
  return false;
}

std::array<int, 3> StructuredGrid::element_multi(std::size_t element) const {
  std::array<int, 3> idx{0, 0, 0};
  for (int a = 0; a < dim(); ++a) {
    idx[static_cast<std::size_t>(a)] = static_cast<int>(element % static_cast<std::size_t>(m_));
    element /= static_cast<std::size_t>(m_);
  }
  return idx;
}

std::size_t StructuredGrid::element_index(const std::array<int, 3>& multi) const {
  std::size_t idx = 0;
  for (int a = dim() - 1; a >= 0; --a)
    idx = idx * static_cast<std::size_t>(m_) + static_cast<std::size_t>(multi[static_cast<std::size_t>(a)]);
  return idx;
}

Point StructuredGrid::element_midpoint(std::size_t element) const {
  const auto idx = element_multi(element);
  Point x(dim());
  for (int a = 0; a < dim(); ++a) x(a) = center_(a) - r_ + h_ * (idx[static_cast<std::size_t>(a)] + 0.5);
  return x;
}

std::vector<std::size_t> StructuredGrid::element_nodes(std::size_t element) const {
  const auto e = element_multi(element);
  std::vector<std::size_t> nodes(static_cast<std::size_t>(1 << dim()));
  for (int local = 0; local < (1 << dim()); ++local) {
    std::array<int, 3> n = e;
    for (int a = 0; a < dim(); ++a) n[static_cast<std::size_t>(a)] += (local >> a) & 1;
    nodes[static_cast<std::size_t>(local)] = node_index(n);
  }
  return nodes;
}

bool StructuredGrid::contains(const Point& x, double slack) const {
  if (x.size() != center_.size()) return false;
  return ((x - center_).cwiseAbs().array() <= r_ + slack * std::max(1.0, r_)).all();
}

std::size_t StructuredGrid::locate(const Point& x) const {
  if (!contains(x)) throw DomainError("point " + format_point(x) + " lies outside the grid");
  std::array<int, 3> e{0, 0, 0};
  for (int a = 0; a < dim(); ++a) {
    const double s = (x(a) - (center_(a) - r_)) / h_;
    e[static_cast<std::size_t>(a)] = std::clamp(static_cast<int>(std::ceil(s)) - 1, 0, m_ - 1);
  }
  return element_index(e);
}

std::array<int, 3> StructuredGrid::nearest_node(const Point& x) const {
  std::array<int, 3> n{0, 0, 0};
  for (int a = 0; a < dim(); ++a)
    n[static_cast<std::size_t>(a)] =
        std::clamp(static_cast<int>(std::lround((x(a) - (center_(a) - r_)) / h_)), 0, m_);
  return n;
}

Vec q1_values(const Vec& xi) {
  const int n = static_cast<int>(xi.size());
  Vec v(1 << n);
  for (int local = 0; local < (1 << n); ++local) {
    double p = 1.0;
    for (int a = 0; a < n; ++a) p *= ((local >> a) & 1) ? xi(a) : 1.0 - xi(a);
    v(local) = p;
  }
  return v;
}

Eigen::MatrixXd q1_gradients(const Vec& xi, double h) {
  const int n = static_cast<int>(xi.size());
  Eigen::MatrixXd g(1 << n, n);
  for (int local = 0; local < (1 << n); ++local)
    for (int d = 0; d < n; ++d) {
      double p = ((local >> d) & 1) ? 1.0 : -1.0;
      for (int a = 0; a < n; ++a)
        if (a != d) p *= ((local >> a) & 1) ? xi(a) : 1.0 - xi(a);
      g(local, d) = p / h;
    }
  return g;
}

}  // namespace complab
