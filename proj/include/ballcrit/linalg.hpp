#pragma once

#include <cmath>
#include <cstddef>

#include <Eigen/Dense>

namespace ballcrit {

struct IterativeResult {
  int iterations = 0;
  double residual = 0.0;  // final |b - A x|
  bool converged = false;
};

/// Conjugate gradients for SPD `apply`; stops when |r| <= tol * max(1, |b|).
template <class Apply>
IterativeResult conjugate_gradient(const Apply& apply, const Eigen::VectorXd& b, Eigen::VectorXd& x,
                                   double tol, int max_iter) {
  if (x.size() != b.size()) x = Eigen::VectorXd::Zero(b.size());
  Eigen::VectorXd r = b - apply(x);
  const double target = tol * std::max(1.0, b.norm());
  double rr = r.squaredNorm();
  IterativeResult res;
  if (std::sqrt(rr) <= target) {
    res.residual = std::sqrt(rr);
    res.converged = true;
    return res;
  }
  Eigen::VectorXd p = r;
  for (int it = 1; it <= max_iter; ++it) {
    const Eigen::VectorXd q = apply(p);
    const double pq = p.dot(q);
    if (!(pq > 0.0)) break;  // operator not positive definite along p
    const double alpha = rr / pq;
    x += alpha * p;
    r -= alpha * q;
    const double rr_new = r.squaredNorm();
    res.iterations = it;
    if (std::sqrt(rr_new) <= target) {
      // recompute the true residual; the recurrence drifts on long runs
      r = b - apply(x);
      rr = r.squaredNorm();
      if (std::sqrt(rr) <= target) {
        res.converged = true;
        break;
      }
      p = r;
      continue;
    }
    p = r + (rr_new / rr) * p;
    rr = rr_new;
  }
  res.residual = (b - apply(x)).norm();
  res.converged = res.converged || res.residual <= target;
  return res;
}

/// MINRES (Paige-Saunders) for symmetric, possibly indefinite `apply`.
template <class Apply>
IterativeResult minres(const Apply& apply, const Eigen::VectorXd& b, Eigen::VectorXd& x, double tol,
                       int max_iter) {
  const Eigen::Index n = b.size();
  x = Eigen::VectorXd::Zero(n);
  IterativeResult res;
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    res.converged = true;
    return res;
  }
  const double target = tol * std::max(1.0, bnorm);
  Eigen::VectorXd v_old = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd v = b / bnorm;
  Eigen::VectorXd w_old = Eigen::VectorXd::Zero(n), w_older = Eigen::VectorXd::Zero(n);
  double beta_prev = 0.0;  // coupling of v to the previous Lanczos vector
  double c_old = 1.0, s_old = 0.0, c = 1.0, s = 0.0;
  double eta = bnorm;
  for (int it = 1; it <= max_iter; ++it) {
    Eigen::VectorXd av = apply(v);
    const double alpha = v.dot(av);
    av -= alpha * v + beta_prev * v_old;
    const double beta_next = av.norm();

    const double rho0 = c * alpha - c_old * s * beta_prev;
    const double rho1 = std::hypot(rho0, beta_next);
    const double rho2 = s * alpha + c_old * c * beta_prev;
    const double rho3 = s_old * beta_prev;

    const double c_new = rho0 / rho1;
    const double s_new = beta_next / rho1;
    Eigen::VectorXd w = (v - rho3 * w_older - rho2 * w_old) / rho1;
    x += c_new * eta * w;
    eta = -s_new * eta;

    w_older = w_old;
    w_old = w;
    v_old = v;
    if (beta_next > 0.0) v = av / beta_next;
    beta_prev = beta_next;
    c_old = c;
    s_old = s;
    c = c_new;
    s = s_new;
    res.iterations = it;
    if (std::abs(eta) <= target || beta_next == 0.0) break;
  }
  res.residual = (b - apply(x)).norm();
  res.converged = res.residual <= target * 10.0;
  return res;
}

}  // namespace ballcrit
