#pragma once

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace ballcrit::detail {

inline bool lexicographically_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

/// Deterministic reduction for minimization: lower value wins, ties go to the
/// lexicographically smaller vector.
inline bool better_min(double va, const Eigen::VectorXd& xa, double vb, const Eigen::VectorXd& xb) {
  if (va != vb) return va < vb;
  return lexicographically_less(xa, xb);
}

inline bool better_max(double va, const Eigen::VectorXd& xa, double vb, const Eigen::VectorXd& xb) {
  if (va != vb) return va > vb;
  return lexicographically_less(xa, xb);
}

inline Eigen::VectorXd project_to_ball(const Eigen::VectorXd& x, double rho) {
  const double nx = x.norm();
  return nx > rho ? Eigen::VectorXd(x * (rho / nx)) : x;
}

}  // namespace ballcrit::detail
