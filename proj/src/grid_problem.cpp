#include "ballcrit/grid_problem.hpp"

#include <cmath>

namespace ballcrit {

GridProblem::GridProblem(OperatorA op, Nonlinearity nl, double lambda, double measure)
    : op_(std::move(op)), nl_(std::move(nl)), lambda_(lambda), measure_(measure) {
  if (!nl_.is_uniform() && nl_.site_count() != op_.shape().size())
    throw ShapeMismatch("site table has " + std::to_string(nl_.site_count()) +
                        " entries but grid " + to_string(op_.shape()) + " has " +
                        std::to_string(op_.shape().size()) + " sites");
  if (!(lambda_ > 0.0) || !std::isfinite(lambda_))
    throw std::invalid_argument("lambda must be positive and finite");
  if (!(measure_ > 0.0) || !std::isfinite(measure_))
    throw std::invalid_argument("cell measure must be positive and finite");
}

GridProblem GridProblem::with_lambda(double lambda) const {
  return GridProblem(op_, nl_, lambda, measure_);
}

void GridProblem::check(const Eigen::VectorXd& u) const {
  if (static_cast<std::size_t>(u.size()) != size())
    throw ShapeMismatch("vector of length " + std::to_string(u.size()) + " on grid " +
                        to_string(shape()));
}

double GridProblem::energy(const Eigen::VectorXd& u) const {
  check(u);
  double potential = 0.0;
  for (Eigen::Index k = 0; k < u.size(); ++k) potential += nl_.F(static_cast<std::size_t>(k), u[k]);
  return measure_ * (0.5 * u.dot(op_.apply(u)) - lambda_ * potential);
}

Eigen::VectorXd GridProblem::f_vector(const Eigen::VectorXd& u) const {
  check(u);
  Eigen::VectorXd out(u.size());
  for (Eigen::Index k = 0; k < u.size(); ++k) out[k] = nl_.f(static_cast<std::size_t>(k), u[k]);
  return out;
}

Eigen::VectorXd GridProblem::df_vector(const Eigen::VectorXd& u) const {
  check(u);
  Eigen::VectorXd out(u.size());
  for (Eigen::Index k = 0; k < u.size(); ++k) out[k] = nl_.df(static_cast<std::size_t>(k), u[k]);
  return out;
}

Eigen::VectorXd GridProblem::gradient(const Eigen::VectorXd& u) const {
  return measure_ * (op_.apply(u) - lambda_ * f_vector(u));
}

Eigen::VectorXd GridProblem::hessian_apply(const Eigen::VectorXd& u, const Eigen::VectorXd& w) const {
  check(w);
  return measure_ * (op_.apply(w) - lambda_ * df_vector(u).cwiseProduct(w));
}

Eigen::MatrixXd GridProblem::dense_hessian(const Eigen::VectorXd& u, std::size_t cap) const {
  Eigen::MatrixXd h = op_.dense(cap);
  h.diagonal() -= lambda_ * df_vector(u);
  return measure_ * h;
}

double GridProblem::energy_at_zero() const {
  return energy(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(size())));
}

double energy(const GridProblem& p, const GridVector& u) {
  require_same_shape(p.shape(), u.shape, "energy");
  return p.energy(u.values);
}

GridVector gradient(const GridProblem& p, const GridVector& u) {
  require_same_shape(p.shape(), u.shape, "gradient");
  return GridVector(u.shape, p.gradient(u.values));
}

GridVector hessian_apply(const GridProblem& p, const GridVector& u, const GridVector& w) {
  require_same_shape(p.shape(), u.shape, "hessian_apply");
  require_same_shape(p.shape(), w.shape, "hessian_apply");
  return GridVector(u.shape, p.hessian_apply(u.values, w.values));
}

}  // namespace ballcrit
