#pragma once

// Test-only oracles, written independently of the library code paths.

#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace oracle {

/// Five-point Dirichlet Laplacian assembled entry by entry.
inline Eigen::MatrixXd laplacian(std::size_t m, std::size_t n) {
  const auto N = static_cast<Eigen::Index>(m * n);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(N, N);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < m; ++i) {
      const auto k = static_cast<Eigen::Index>(i + j * m);
      a(k, k) = 4.0;
      if (i > 0) a(k, k - 1) = -1.0;
      if (i + 1 < m) a(k, k + 1) = -1.0;
      if (j > 0) a(k, k - static_cast<Eigen::Index>(m)) = -1.0;
      if (j + 1 < n) a(k, k + static_cast<Eigen::Index>(m)) = -1.0;
    }
  return a;
}

struct Critical {
  Eigen::VectorXd x;
  double value = 0.0;
  int negative = 0;  // Morse index
  int positive = 0;
};

/// Plain Newton from every node of a uniform grid of starts on [-box, box]^N
/// for A x = lambda * 4 x^3 (F = x^4), deduplicated at 1e-8.
inline std::vector<Critical> enumerate_quartic(const Eigen::MatrixXd& a, double lambda, double box, int per_dim) {
  const auto N = a.rows();
  const auto energy = [&](const Eigen::VectorXd& x) {
    return 0.5 * x.dot(a * x) - lambda * x.array().pow(4).sum();
  };
  std::vector<Critical> found;
  std::vector<int> idx(static_cast<std::size_t>(N), 0);
  while (true) {
    Eigen::VectorXd x(N);
    for (Eigen::Index k = 0; k < N; ++k)
      x[k] = -box + 2.0 * box * idx[static_cast<std::size_t>(k)] / (per_dim - 1);
    bool ok = false;
    for (int it = 0; it < 100; ++it) {
      const Eigen::VectorXd g = a * x - 4.0 * lambda * x.array().cube().matrix();
      if (g.norm() < 1e-13 * (1.0 + x.norm())) {
        ok = true;
        break;
      }
      Eigen::MatrixXd jac = a;
      jac.diagonal() -= 12.0 * lambda * x.array().square().matrix();
      const Eigen::VectorXd step = jac.fullPivLu().solve(-g);
      if (!step.allFinite()) break;
      x += step;
      if (x.norm() > 1e6) break;
    }
    if (ok) {
      bool dup = false;
      for (const auto& c : found) dup = dup || (c.x - x).norm() < 1e-8;
      if (!dup) {
        Eigen::MatrixXd jac = a;
        jac.diagonal() -= 12.0 * lambda * x.array().square().matrix();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
        Critical c{x, energy(x), 0, 0};
        for (Eigen::Index k = 0; k < N; ++k) {
          if (es.eigenvalues()[k] < -1e-9) ++c.negative;
          if (es.eigenvalues()[k] > 1e-9) ++c.positive;
        }
        found.push_back(c);
      }
    }
    Eigen::Index k = 0;
    while (k < N && ++idx[static_cast<std::size_t>(k)] == per_dim) idx[static_cast<std::size_t>(k++)] = 0;
    if (k == N) break;
  }
  return found;
}

/// Minimum distance from x to any enumerated critical point.
inline double distance_to(const std::vector<Critical>& set, const Eigen::VectorXd& x) {
  double best = INFINITY;
  for (const auto& c : set) best = std::min(best, (c.x - x).norm());
  return best;
}

/// Dense grid search of min over the circle |x| = r in R^2.
inline double circle_min(const std::function<double(const Eigen::Vector2d&)>& f, double r, int samples = 200000) {
  double best = INFINITY;
  for (int k = 0; k < samples; ++k) {
    const double t = 2.0 * M_PI * k / samples;
    best = std::min(best, f(Eigen::Vector2d(r * std::cos(t), r * std::sin(t))));
  }
  return best;
}

}  // namespace oracle
