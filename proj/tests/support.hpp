#pragma once

#include "complab/fields.hpp"
#include "complab/geometry.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace complab::testing {

// Small seeded generators for the property tests.
struct Gen {
  explicit Gen(std::uint64_t seed) : rng(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

  Vec vec(int size, double lo, double hi) {
    Vec v(size);
    for (int i = 0; i < size; ++i) v(i) = uniform(lo, hi);
    return v;
  }

  Point point_in(const Point& center, double halfwidth) {
    return center + vec(static_cast<int>(center.size()), -halfwidth, halfwidth);
  }

  // Legendre-elliptic tensor: lambda I plus a random positive semidefinite part
  // plus a random skew part.
  Tensor elliptic_tensor(int components, int dim, double lambda = 0.5) {
    const int s = components * dim;
    Eigen::MatrixXd B(s, s), K(s, s);
    for (int i = 0; i < s; ++i)
      for (int j = 0; j < s; ++j) {
        B(i, j) = uniform(-1.0, 1.0);
        K(i, j) = uniform(-1.0, 1.0);
      }
    return lambda * Eigen::MatrixXd::Identity(s, s) + B * B.transpose() + 0.5 * (K - K.transpose());
  }

  std::mt19937_64 rng;
};

inline Point pt(std::initializer_list<double> v) {
  Point p(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) p(i++) = x;
  return p;
}

inline Vec vt(std::initializer_list<double> v) { return pt(v); }

inline CompositeCube flat_two_layer(double interface = 0.0) {
  return CompositeCube(pt({0.0, 0.0}), 1.0,
                       {GraphFunction::constant(1, -2.0), GraphFunction::constant(1, interface),
                        GraphFunction::constant(1, 2.0)},
                       1.0);
}

inline CompositeCube parabola_cube(double amplitude = 1.0) {
  return CompositeCube(pt({0.0, 0.0}), 1.0,
                       {GraphFunction::constant(1, -2.0), GraphFunction::parabola(1, 0.0, amplitude),
                        GraphFunction::constant(1, 2.0)},
                       1.0);
}

}  // namespace complab::testing
