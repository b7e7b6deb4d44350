#pragma once

#include <Eigen/Dense>

#include "ballcrit/grid.hpp"
#include "ballcrit/nonlinearity.hpp"

namespace ballcrit {

/// The discrete variational problem
///
///   J(u) = w * ( 1/2 (u, A u) - lambda * sum_k F(k, u_k) ),
///   grad J(u) = w * ( A u - lambda f(u) ),
///
/// where w is a positive cell measure (1 on the plain grid, h^2 when the grid
/// discretizes a domain so that J approximates the continuous energy).
class GridProblem {
 public:
  GridProblem(OperatorA op, Nonlinearity nl, double lambda, double measure = 1.0);

  const GridShape& shape() const { return op_.shape(); }
  std::size_t size() const { return op_.shape().size(); }
  const OperatorA& op() const { return op_; }
  const Nonlinearity& nonlinearity() const { return nl_; }
  double lambda() const { return lambda_; }
  double measure() const { return measure_; }

  GridProblem with_lambda(double lambda) const;

  double energy(const Eigen::VectorXd& u) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& u) const;
  /// f(u) site by site.
  Eigen::VectorXd f_vector(const Eigen::VectorXd& u) const;
  /// f'(u) site by site (closed form or finite-difference fallback).
  Eigen::VectorXd df_vector(const Eigen::VectorXd& u) const;
  Eigen::VectorXd hessian_apply(const Eigen::VectorXd& u, const Eigen::VectorXd& w) const;
  Eigen::MatrixXd dense_hessian(const Eigen::VectorXd& u, std::size_t cap = kDefaultDenseCap) const;

  /// J(0) = -w * lambda * sum F(k, 0); nonzero only for offset families.
  double energy_at_zero() const;

 private:
  void check(const Eigen::VectorXd& u) const;

  OperatorA op_;
  Nonlinearity nl_;
  double lambda_;
  double measure_;
};

double energy(const GridProblem& p, const GridVector& u);
GridVector gradient(const GridProblem& p, const GridVector& u);
GridVector hessian_apply(const GridProblem& p, const GridVector& u, const GridVector& w);

}  // namespace ballcrit
