#include "ballcrit/random.hpp"

#include <cmath>

namespace ballcrit {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::string_view label, std::uint64_t index) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char ch : label) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return splitmix64(splitmix64(master ^ h) + index);
}

Eigen::VectorXd Rng::gaussian(Eigen::Index n) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = normal();
  return v;
}

Eigen::VectorXd Rng::on_sphere(Eigen::Index n, double radius) {
  Eigen::VectorXd v = gaussian(n);
  double norm = v.norm();
  while (norm == 0.0) {
    v = gaussian(n);
    norm = v.norm();
  }
  return v * (radius / norm);
}

Eigen::VectorXd Rng::in_ball(Eigen::Index n, double radius) {
  const double r = radius * std::pow(uniform(0.0, 1.0), 1.0 / static_cast<double>(n));
  return on_sphere(n, r);
}

}  // namespace ballcrit
