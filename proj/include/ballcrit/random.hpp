#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include <Eigen/Dense>

namespace ballcrit {

/// Derives an independent stream seed from a master seed and a fixed label,
/// so stages and sweep points never share random streams.
std::uint64_t derive_seed(std::uint64_t master, std::string_view label, std::uint64_t index = 0);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  double normal() { return normal_(engine_); }

  Eigen::VectorXd gaussian(Eigen::Index n);
  /// Uniform direction scaled to `radius`.
  Eigen::VectorXd on_sphere(Eigen::Index n, double radius);
  /// Uniform in the closed ball of `radius`.
  Eigen::VectorXd in_ball(Eigen::Index n, double radius);

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace ballcrit
