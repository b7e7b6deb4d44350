#include "ballcrit/dc_framework.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <variant>

#include "ballcrit/linalg.hpp"
#include "ballcrit/random.hpp"
#include "ordering.hpp"

namespace ballcrit {

void StructureConstants::validate() const {
  if (!(alpha > 1.0) || !std::isfinite(alpha)) throw std::invalid_argument("alpha must exceed 1");
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw std::invalid_argument("gamma must be positive");
  if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("c must be positive");
  if (!(rho > 0.0) || !std::isfinite(rho)) throw std::invalid_argument("rho must be positive");
}

StructureConstants discrete_constants(const OperatorA& op, double rho) {
  StructureConstants k{2.0, op.min_eigenvalue(), 1.0, rho};
  k.validate();
  return k;
}

std::string to_string(BetaMethod m) {
  return m == BetaMethod::closed_form ? "closed-form" : "multistart-ascent";
}

std::string to_string(Verdict v) { return v == Verdict::certified ? "certified" : "inconclusive"; }

namespace {

bool family_admits_closed_form(const ScalarFamily& fam) {
  if (const auto* p = std::get_if<PowerLaw>(&fam)) return p->c1 == 0.0 || p->mu >= 2.0;
  if (const auto* p = std::get_if<OddPower>(&fam)) return p->k >= 0;
  if (const auto* p = std::get_if<PolynomialPotential>(&fam)) {
    // a single monomial c_k x^k with k >= 2 (the constant term does not enter f)
    int terms = 0;
    for (std::size_t k = 1; k < p->coefficients.size(); ++k) {
      if (p->coefficients[k] == 0.0) continue;
      if (k < 2) return false;
      ++terms;
    }
    return terms <= 1;
  }
  return false;
}

double slope(const ScalarFamily& fam, double x) {
  if (auto d = family_derivative(fam, x)) return *d;
  return finite_difference_derivative(fam, x);
}

double f_norm(const Nonlinearity& nl, const Eigen::VectorXd& x) {
  double acc = 0.0;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    const double v = nl.f(static_cast<std::size_t>(k), x[k]);
    acc += v * v;
  }
  return std::sqrt(acc);
}

/// Projected gradient ascent of |f(x)|^2 on the ball.
Eigen::VectorXd ascend(const Nonlinearity& nl, Eigen::VectorXd x, double rho, int max_iter) {
  auto objective = [&](const Eigen::VectorXd& y) {
    const double n = f_norm(nl, y);
    return n * n;
  };
  double val = objective(x);
  double step = 1.0;
  for (int it = 0; it < max_iter; ++it) {
    Eigen::VectorXd g(x.size());
    for (Eigen::Index k = 0; k < x.size(); ++k) {
      const auto site = static_cast<std::size_t>(k);
      g[k] = 2.0 * nl.f(site, x[k]) * slope(nl.family(site), x[k]);
    }
    const double gn = g.norm();
    if (gn == 0.0 || !std::isfinite(gn)) break;
    bool moved = false;
    while (step * gn > 1e-16 * (1.0 + rho)) {
      Eigen::VectorXd y = detail::project_to_ball(x + step * g, rho);
      const double vy = objective(y);
      // sufficient increase, else steps that overshoot the peak stall the ascent
      if (vy > val && vy - val >= 0.3 * g.dot(y - x)) {
        const double change = (y - x).norm();
        x = std::move(y);
        val = vy;
        step *= 2.0;
        moved = change > 1e-15 * (1.0 + rho);
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }
  return x;
}

}  // namespace

bool closed_form_beta_applicable(const Nonlinearity& nl) {
  const auto& fams = nl.families();
  return std::all_of(fams.begin(), fams.end(), family_admits_closed_form);
}

BetaEstimate beta_sup(const Nonlinearity& nl, GridShape shape, const StructureConstants& constants,
                      const BetaOptions& opts) {
  constants.validate();
  const double rho = constants.rho;
  const auto N = static_cast<Eigen::Index>(shape.size());
  if (!nl.is_uniform() && nl.site_count() != shape.size())
    throw ShapeMismatch("site table does not match grid " + to_string(shape));

  const bool closed = closed_form_beta_applicable(nl);
  if (opts.mode == BetaOptions::Mode::closed_form && !closed)
    throw std::invalid_argument("closed-form beta does not apply to this nonlinearity");

  if (closed && opts.mode != BetaOptions::Mode::multistart) {
    BetaEstimate best;
    best.method = BetaMethod::closed_form;
    best.heuristic = false;
    Eigen::VectorXd best_x = Eigen::VectorXd::Zero(N);
    double best_val = -1.0;
    for (Eigen::Index k = 0; k < N; ++k) {
      for (double sign : {-1.0, 1.0}) {
        Eigen::VectorXd x = Eigen::VectorXd::Zero(N);
        x[k] = sign * rho;
        const double v = std::abs(nl.f(static_cast<std::size_t>(k), x[k]));
        if (best_val < 0.0 || detail::better_max(v, x, best_val, best_x)) {
          best_val = v;
          best_x = x;
        }
      }
    }
    best.beta = best_val;
    best.maximizer = GridVector(shape, best_x);
    return best;
  }

  Rng rng(derive_seed(opts.seed, "beta_sup"));
  Eigen::VectorXd best_x;
  double best_val = -1.0;
  for (int s = 0; s < std::max(1, opts.starts); ++s) {
    Eigen::VectorXd x = ascend(nl, rng.on_sphere(N, rho), rho, opts.max_iter);
    const double v = f_norm(nl, x);
    if (best_val < 0.0 || detail::better_max(v, x, best_val, best_x)) {
      best_val = v;
      best_x = std::move(x);
    }
  }
  BetaEstimate out;
  out.beta = best_val;
  out.maximizer = GridVector(shape, best_x);
  out.method = BetaMethod::multistart_ascent;
  out.heuristic = true;
  return out;
}

double lambda_star(const StructureConstants& constants, double beta) {
  constants.validate();
  if (beta < 0.0 || !std::isfinite(beta)) throw std::invalid_argument("beta must be finite and >= 0");
  if (beta == 0.0) return std::numeric_limits<double>::infinity();
  return constants.gamma * std::pow(constants.rho, constants.alpha - 1.0) / (beta * constants.c);
}

LambdaStarResult compute_lambda_star(const Nonlinearity& nl, GridShape shape,
                                     const StructureConstants& constants, const BetaOptions& opts) {
  BetaEstimate b = beta_sup(nl, shape, constants, opts);
  LambdaStarResult r;
  r.beta = b.beta;
  r.lambda_star = lambda_star(constants, b.beta);
  r.maximizer = std::move(b.maximizer);
  r.method = b.method;
  r.estimate = b.heuristic;
  return r;
}

CertificateReport certify(const GridProblem& p, const GridVector& u, const CertifyOptions& opts) {
  require_same_shape(p.shape(), u.shape, "certify");
  if (!u.values.allFinite()) throw std::invalid_argument("certify: candidate has non-finite entries");

  CertificateReport rep;
  rep.candidate = u;
  const Eigen::VectorXd rhs = p.lambda() * p.f_vector(u.values);
  rep.residual = (p.op().apply(u.values) - rhs).norm();

  Eigen::VectorXd v = u.values;  // warm start; exact at critical points
  const auto apply = [&](const Eigen::VectorXd& x) { return p.op().apply(x); };
  const IterativeResult cg = conjugate_gradient(apply, rhs, v, opts.tol_linear * 1e-2, opts.max_iter);
  rep.companion = GridVector(u.shape, v);
  rep.linear_iterations = cg.iterations;
  rep.companion_residual = cg.residual;

  rep.j_u = p.energy(u.values);
  rep.j_v = p.energy(v);
  rep.energy_gap = rep.j_v - rep.j_u;

  if (opts.rho) {
    rep.ball_margin = *opts.rho - v.norm();
    rep.companion_in_ball = *rep.ball_margin >= -1e-8;
  }

  const double energy_tol = opts.tol_energy * std::max(1.0, std::abs(rep.j_u));
  const double linear_tol = opts.tol_linear * std::max(1.0, rhs.norm());
  if (rep.companion_residual > linear_tol) {
    rep.verdict = Verdict::inconclusive;
    rep.diagnostic = "companion solve did not reach tolerance (residual " +
                     std::to_string(rep.companion_residual) + " after " +
                     std::to_string(cg.iterations) + " iterations)";
  } else if (rep.energy_gap >= -energy_tol) {
    rep.verdict = Verdict::certified;
  } else {
    rep.verdict = Verdict::inconclusive;
    rep.diagnostic = "J(u) exceeds J(v): candidate is not a critical point";
  }
  return rep;
}

H3Report h3_check(const OperatorA& op, const StructureConstants& constants, int samples,
                  std::uint64_t seed) {
  constants.validate();
  H3Report rep;
  rep.samples = std::max(0, samples);
  if (rep.samples == 0) {
    rep.passed = true;
    rep.degenerate = true;
    return rep;
  }
  Rng rng(derive_seed(seed, "h3_check"));
  const auto N = static_cast<Eigen::Index>(op.shape().size());
  rep.passed = true;
  rep.worst_ratio = std::numeric_limits<double>::infinity();
  for (int s = 0; s < rep.samples; ++s) {
    const Eigen::VectorXd v = rng.gaussian(N);
    const double quad = v.dot(op.apply(v));
    const double nv = v.norm();
    rep.worst_ratio = std::min(rep.worst_ratio, quad / (nv * nv));
    if (quad < constants.gamma * std::pow(nv, constants.alpha) * (1.0 - 1e-12)) rep.passed = false;
  }
  return rep;
}

}  // namespace ballcrit
