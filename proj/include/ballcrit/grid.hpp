#pragma once

#include <cstddef>
#include <atomic>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ballcrit {

/// Dense assembly is refused above this many unknowns; callers fall back to
/// the matrix-free stencil.
inline constexpr std::size_t kDefaultDenseCap = 4096;

class ShapeMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DenseCapExceeded : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Interior grid of m columns (index i) by n rows (index j).
struct GridShape {
  std::size_t m = 1;
  std::size_t n = 1;

  GridShape() = default;
  GridShape(std::size_t m_, std::size_t n_);

  std::size_t size() const { return m * n; }

  /// Column-block flattening: u(1,1),...,u(m,1); u(1,2),...  (1-based i, j).
  std::size_t index(std::size_t i, std::size_t j) const { return (i - 1) + (j - 1) * m; }

  bool operator==(const GridShape&) const = default;
};

std::string to_string(const GridShape& shape);

/// Values on the interior nodes, flattened in the canonical column-block order.
struct GridVector {
  GridShape shape;
  Eigen::VectorXd values;

  GridVector() = default;
  explicit GridVector(GridShape s);
  GridVector(GridShape s, Eigen::VectorXd v);

  static GridVector zeros(GridShape s) { return GridVector(s); }
  static GridVector unit(GridShape s, std::size_t k);

  double& at(std::size_t i, std::size_t j) { return values[shape.index(i, j)]; }
  double at(std::size_t i, std::size_t j) const { return values[shape.index(i, j)]; }
  double norm() const { return values.norm(); }
};

void require_same_shape(const GridShape& a, const GridShape& b, const char* what);

/// Five-point Dirichlet Laplacian A = scale * blocktridiag(-I_m, L, -I_m) with
/// L = tridiag(-1, 4, -1). The dense matrix is only materialized on request.
class OperatorA {
 public:
  explicit OperatorA(GridShape shape, double scale = 1.0);

  const GridShape& shape() const { return shape_; }
  double scale() const { return scale_; }

  /// Builds and caches the dense matrix; throws DenseCapExceeded above `cap`.
  const Eigen::MatrixXd& dense(std::size_t cap = kDefaultDenseCap) const;
  bool has_dense() const { return cache_->ready; }

  void apply(const Eigen::VectorXd& u, Eigen::VectorXd& out) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& u) const;

  double min_eigenvalue() const;
  double max_eigenvalue() const;

 private:
  GridShape shape_;
  double scale_;
  struct DenseCache {
    std::once_flag once;
    std::atomic<bool> ready{false};
    Eigen::MatrixXd matrix;
  };
  std::shared_ptr<DenseCache> cache_;
};

Eigen::MatrixXd assemble_dense(GridShape shape, double scale = 1.0,
                               std::size_t cap = kDefaultDenseCap);

GridVector apply_operator(const OperatorA& op, const GridVector& u);

/// All m*n eigenvalues of A in ascending order, repeated by multiplicity.
std::vector<double> eigen_analytic(GridShape shape, double scale = 1.0);

/// Eigenvector of A for the pair of mode numbers (p, q), unit Euclidean norm.
Eigen::VectorXd eigenvector_analytic(GridShape shape, std::size_t p, std::size_t q);

}  // namespace ballcrit
