#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace complab {

/// A point in R^n. Index 0 is the normal coordinate x^1, indices 1..n-1 are
/// the tangential coordinates x'.
using Point = Eigen::VectorXd;
using Vec = Eigen::VectorXd;

/// Coefficient tensor A_{ij}^{ab} stored as an (N n) x (N n) matrix with row
/// index i*n + a and column index j*n + b. Gradients and fluxes use the same
/// flattening (component-major), so a gradient Du is a vector of length N n
/// with entry i*n + b holding D_b u^i.
using Tensor = Eigen::MatrixXd;

inline int flat_index(int component, int direction, int dim) { return component * dim + direction; }

inline Vec tangential(const Point& x) { return x.tail(x.size() - 1); }

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point was given outside the domain an operation is defined on.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Two consecutive graphs are closer than the degenerate-thickness tolerance.
class DegenerateThickness : public Error {
 public:
  using Error::Error;
};

/// Graphs that should be ordered cross each other.
class OrderingViolation : public Error {
 public:
  using Error::Error;
};

class EllipticityViolation : public Error {
 public:
  EllipticityViolation(const std::string& what, Point where) : Error(what), point(std::move(where)) {}
  Point point;
};

class SolverDivergence : public Error {
 public:
  SolverDivergence(const std::string& what, std::vector<double> history)
      : Error(what), residual_history(std::move(history)) {}
  std::vector<double> residual_history;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

std::string format_point(const Point& x);

}  // namespace complab
