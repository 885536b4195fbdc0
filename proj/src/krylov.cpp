#include "complab/solver.hpp"

#include <cmath>

namespace complab {

KrylovResult bicgstab(const SparseMatrix& A, const Vec& b, Vec& x, double tol, int max_iter) {
  KrylovResult res;
  const double bnorm = b.norm();
  if (x.size() != b.size()) x = Vec::Zero(b.size());
  if (bnorm == 0.0) {
    x.setZero();
    res.converged = true;
    return res;
  }

  Vec inv_diag = A.diagonal();
  for (Eigen::Index i = 0; i < inv_diag.size(); ++i) inv_diag(i) = inv_diag(i) != 0.0 ? 1.0 / inv_diag(i) : 1.0;

  Vec r = b - A * x;
  res.relative_residual = r.norm() / bnorm;
  res.history.push_back(res.relative_residual);
  if (res.relative_residual <= tol) {
    res.converged = true;
    return res;
  }

  // Restart from the true residual whenever the recursive one claims convergence
  // but the true one does not, or when the shadow residual breaks down.
  for (int restart = 0; restart < 8 && res.iterations < max_iter; ++restart) {
    Vec r_hat = r;
    double rho = 1.0, alpha = 1.0, omega = 1.0;
    Vec v = Vec::Zero(b.size()), p = Vec::Zero(b.size());
    bool breakdown = false;
    while (res.iterations < max_iter) {
      ++res.iterations;
      const double rho_new = r_hat.dot(r);
      if (rho_new == 0.0 || !std::isfinite(rho_new)) {
        breakdown = true;
        break;
      }
      const double beta = (rho_new / rho) * (alpha / omega);
      rho = rho_new;
      p = r + beta * (p - omega * v);
      const Vec y = inv_diag.cwiseProduct(p);
      v = A * y;
      const double rv = r_hat.dot(v);
      if (rv == 0.0) {
        breakdown = true;
        break;
      }
      alpha = rho / rv;
      const Vec s = r - alpha * v;
      if (s.norm() / bnorm <= tol) {
        x += alpha * y;
        r = s;
        res.history.push_back(s.norm() / bnorm);
        break;
      }
      const Vec z = inv_diag.cwiseProduct(s);
      const Vec t = A * z;
      const double tt = t.squaredNorm();
      omega = tt > 0.0 ? t.dot(s) / tt : 0.0;
      x += alpha * y + omega * z;
      r = s - omega * t;
      res.history.push_back(r.norm() / bnorm);
      if (res.history.back() <= tol) break;
      if (omega == 0.0) {
        breakdown = true;
        break;
      }
    }
    r = b - A * x;
    res.relative_residual = r.norm() / bnorm;
    if (res.relative_residual <= tol) {
      res.converged = true;
      return res;
    }
    (void)breakdown;
  }
  return res;
}

}  // namespace complab
