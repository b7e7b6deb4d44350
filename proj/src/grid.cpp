#include "ballcrit/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ballcrit {

GridShape::GridShape(std::size_t m_, std::size_t n_) : m(m_), n(n_) {
  if (m == 0 || n == 0) throw std::invalid_argument("grid shape needs m >= 1 and n >= 1");
}

std::string to_string(const GridShape& shape) {
  return std::to_string(shape.m) + "x" + std::to_string(shape.n);
}

GridVector::GridVector(GridShape s) : shape(s), values(Eigen::VectorXd::Zero(s.size())) {}

GridVector::GridVector(GridShape s, Eigen::VectorXd v) : shape(s), values(std::move(v)) {
  if (static_cast<std::size_t>(values.size()) != shape.size())
    throw ShapeMismatch("grid vector length " + std::to_string(values.size()) +
                        " does not match shape " + to_string(shape));
}

GridVector GridVector::unit(GridShape s, std::size_t k) {
  GridVector e(s);
  e.values[k] = 1.0;
  return e;
}

void require_same_shape(const GridShape& a, const GridShape& b, const char* what) {
  if (!(a == b))
    throw ShapeMismatch(std::string(what) + ": shape " + to_string(a) + " vs " + to_string(b));
}

OperatorA::OperatorA(GridShape shape, double scale)
    : shape_(shape), scale_(scale), cache_(std::make_shared<DenseCache>()) {
  if (!(scale > 0.0) || !std::isfinite(scale))
    throw std::invalid_argument("operator scale must be positive and finite");
}

const Eigen::MatrixXd& OperatorA::dense(std::size_t cap) const {
  if (shape_.size() > cap)
    throw DenseCapExceeded("dense assembly of " + std::to_string(shape_.size()) +
                           " unknowns exceeds cap " + std::to_string(cap) +
                           "; use the matrix-free operator");
  std::call_once(cache_->once, [this] {
    cache_->matrix = assemble_dense(shape_, scale_, shape_.size());
    cache_->ready = true;
  });
  return cache_->matrix;
}

void OperatorA::apply(const Eigen::VectorXd& u, Eigen::VectorXd& out) const {
  const std::size_t m = shape_.m, n = shape_.n;
  if (static_cast<std::size_t>(u.size()) != shape_.size())
    throw ShapeMismatch("operator apply: vector length does not match " + to_string(shape_));
  out.resize(u.size());
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t k = i + j * m;
      double acc = 4.0 * u[k];
      if (i > 0) acc -= u[k - 1];
      if (i + 1 < m) acc -= u[k + 1];
      if (j > 0) acc -= u[k - m];
      if (j + 1 < n) acc -= u[k + m];
      out[k] = scale_ * acc;
    }
  }
}

Eigen::VectorXd OperatorA::apply(const Eigen::VectorXd& u) const {
  Eigen::VectorXd out;
  apply(u, out);
  return out;
}

double OperatorA::min_eigenvalue() const {
  using std::numbers::pi;
  return scale_ * (4.0 - 2.0 * std::cos(pi / static_cast<double>(shape_.m + 1)) -
                   2.0 * std::cos(pi / static_cast<double>(shape_.n + 1)));
}

double OperatorA::max_eigenvalue() const {
  using std::numbers::pi;
  const double m = static_cast<double>(shape_.m), n = static_cast<double>(shape_.n);
  return scale_ * (4.0 - 2.0 * std::cos(m * pi / (m + 1.0)) - 2.0 * std::cos(n * pi / (n + 1.0)));
}

Eigen::MatrixXd assemble_dense(GridShape shape, double scale, std::size_t cap) {
  const std::size_t N = shape.size();
  if (N > cap)
    throw DenseCapExceeded("dense assembly of " + std::to_string(N) + " unknowns exceeds cap " +
                           std::to_string(cap) + "; use the matrix-free operator");
  const auto m = static_cast<Eigen::Index>(shape.m);
  const auto n = static_cast<Eigen::Index>(shape.n);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m * n, m * n);
  for (Eigen::Index b = 0; b < n; ++b) {
    const Eigen::Index off = b * m;
    for (Eigen::Index i = 0; i < m; ++i) {
      a(off + i, off + i) = 4.0;
      if (i + 1 < m) a(off + i, off + i + 1) = a(off + i + 1, off + i) = -1.0;
    }
    if (b + 1 < n)
      for (Eigen::Index i = 0; i < m; ++i) a(off + i, off + m + i) = a(off + m + i, off + i) = -1.0;
  }
  return scale * a;
}

GridVector apply_operator(const OperatorA& op, const GridVector& u) {
  require_same_shape(op.shape(), u.shape, "apply_operator");
  return GridVector(u.shape, op.apply(u.values));
}

std::vector<double> eigen_analytic(GridShape shape, double scale) {
  using std::numbers::pi;
  std::vector<double> out;
  out.reserve(shape.size());
  const double m1 = static_cast<double>(shape.m + 1), n1 = static_cast<double>(shape.n + 1);
  for (std::size_t j = 1; j <= shape.n; ++j)
    for (std::size_t i = 1; i <= shape.m; ++i)
      out.push_back(scale * (4.0 - 2.0 * std::cos(static_cast<double>(i) * pi / m1) -
                             2.0 * std::cos(static_cast<double>(j) * pi / n1)));
  std::sort(out.begin(), out.end());
  return out;
}

Eigen::VectorXd eigenvector_analytic(GridShape shape, std::size_t p, std::size_t q) {
  using std::numbers::pi;
  Eigen::VectorXd v(shape.size());
  const double m1 = static_cast<double>(shape.m + 1), n1 = static_cast<double>(shape.n + 1);
  for (std::size_t j = 1; j <= shape.n; ++j)
    for (std::size_t i = 1; i <= shape.m; ++i)
      v[shape.index(i, j)] = std::sin(static_cast<double>(p * i) * pi / m1) *
                             std::sin(static_cast<double>(q * j) * pi / n1);
  return v / v.norm();
}

}  // namespace ballcrit
