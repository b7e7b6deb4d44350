#include "ballcrit/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "ballcrit/linalg.hpp"
#include "ballcrit/random.hpp"
#include "ordering.hpp"

namespace ballcrit {

std::string to_string(PointKind k) {
  switch (k) {
    case PointKind::ball_min: return "ball_min";
    case PointKind::mountain_pass: return "mountain_pass";
    case PointKind::global_max: return "global_max";
    case PointKind::other: return "other";
  }
  return "other";
}

std::string to_string(PointClass c) {
  switch (c) {
    case PointClass::local_min: return "local_min";
    case PointClass::saddle: return "saddle";
    case PointClass::local_max: return "local_max";
    case PointClass::degenerate: return "degenerate";
  }
  return "degenerate";
}

bool PipelineResult::has_issue(std::string_view code) const {
  return std::any_of(issues.begin(), issues.end(), [&](const StageIssue& i) { return i.code == code; });
}

namespace {

void emit(const SolverOptions& opts, std::string_view stage, int start, int it, double value,
          double residual, double norm) {
  if (opts.trace) opts.trace(TraceRecord{stage, start, it, value, residual, norm});
}

/// Upper bound on the Hessian norm along the given points.
double curvature_bound(const GridProblem& p, const std::vector<const Eigen::VectorXd*>& xs) {
  double fmax = 0.0;
  for (const auto* x : xs) {
    const Eigen::VectorXd d = p.df_vector(*x);
    if (d.size() > 0) fmax = std::max(fmax, d.cwiseAbs().maxCoeff());
  }
  return p.measure() * (p.op().max_eigenvalue() + p.lambda() * fmax);
}

std::pair<double, double> extreme_eigenvalues(const GridProblem& p, const Eigen::VectorXd& x,
                                              std::size_t dense_cap) {
  if (p.size() <= dense_cap) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(p.dense_hessian(x, dense_cap),
                                                      Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    return {ev.minCoeff(), ev.maxCoeff()};
  }
  // power iteration for the dominant eigenvalue, then on the shifted operator
  const auto n = static_cast<Eigen::Index>(p.size());
  auto power = [&](double shift) {
    Rng rng(derive_seed(0, "classify", static_cast<std::uint64_t>(shift != 0.0)));
    Eigen::VectorXd v = rng.on_sphere(n, 1.0);
    double mu = 0.0;
    for (int it = 0; it < 500; ++it) {
      Eigen::VectorXd w = p.hessian_apply(x, v) - shift * v;
      mu = v.dot(w);
      const double nw = w.norm();
      if (nw == 0.0) break;
      v = w / nw;
    }
    return mu + shift;
  };
  const double dominant = power(0.0);
  const double other = power(dominant);
  return {std::min(dominant, other), std::max(dominant, other)};
}

}  // namespace

PointClass classify(const GridProblem& p, const Eigen::VectorXd& x, std::size_t dense_cap) {
  const auto [lo, hi] = extreme_eigenvalues(p, x, dense_cap);
  const double scale = std::max(std::abs(lo), std::abs(hi));
  if (!(scale > 0.0)) return PointClass::degenerate;
  const double tol = 1e-8 * scale;
  if (lo > tol) return PointClass::local_min;
  if (hi < -tol) return PointClass::local_max;
  if (lo < -tol && hi > tol) return PointClass::saddle;
  return PointClass::degenerate;
}

std::optional<Eigen::VectorXd> newton_polish(const GridProblem& p, const Eigen::VectorXd& x, double tol,
                                             double max_shift, std::size_t dense_cap, int max_iter) {
  Eigen::VectorXd y = x;
  Eigen::VectorXd g = p.gradient(y);
  const double r0 = g.norm();
  double r = r0;
  for (int it = 0; it < max_iter; ++it) {
    if (r <= tol * (1.0 + y.norm())) break;
    Eigen::VectorXd step;
    if (p.size() <= dense_cap) {
      step = p.dense_hessian(y, dense_cap).partialPivLu().solve(-g);
    } else {
      const auto apply = [&](const Eigen::VectorXd& w) { return p.hessian_apply(y, w); };
      minres(apply, -g, step, 1e-13, 20 * static_cast<int>(p.size()));
    }
    if (!step.allFinite()) break;
    bool accepted = false;
    for (double t = 1.0; t >= 1.0 / 1024.0; t *= 0.5) {
      Eigen::VectorXd trial = y + t * step;
      Eigen::VectorXd gt = p.gradient(trial);
      const double rt = gt.norm();
      if (std::isfinite(rt) && rt < r * (1.0 - 1e-4 * t)) {
        y = std::move(trial);
        g = std::move(gt);
        r = rt;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    if ((y - x).norm() > max_shift) return std::nullopt;
  }
  if (r <= r0) return y;
  return std::nullopt;
}

CriticalPoint make_critical_point(const GridProblem& p, const Eigen::VectorXd& x, PointKind kind,
                                  double tol, std::size_t dense_cap) {
  CriticalPoint cp;
  cp.point = GridVector(p.shape(), x);
  cp.value = p.energy(x);
  cp.residual = p.gradient(x).norm();
  cp.kind = kind;
  cp.classification = classify(p, x, dense_cap);
  cp.converged = cp.residual <= tol * (1.0 + x.norm());
  return cp;
}

// ---------------------------------------------------------------------------
// ball minimization

namespace {

struct DescentRun {
  Eigen::VectorXd x;
  double value = 0.0;
  int iterations = 0;
};

DescentRun projected_descent(const GridProblem& p, Eigen::VectorXd x, double rho, const SolverOptions& opts,
                             int start) {
  x = detail::project_to_ball(x, rho);
  double J = p.energy(x);
  Eigen::VectorXd g = p.gradient(x);
  double t = 1.0 / std::max(curvature_bound(p, {&x}), 1e-300);
  DescentRun run;
  for (int it = 1; it <= opts.max_iter; ++it) {
    Eigen::VectorXd y, d;
    double Jy = 0.0;
    bool accepted = false;
    while (t > 1e-300) {
      y = detail::project_to_ball(x - t * g, rho);
      d = y - x;
      Jy = p.energy(y);
      if (Jy <= J + g.dot(d) + d.squaredNorm() / (2.0 * t)) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;
    const double mapping = d.norm() / t;
    x = std::move(y);
    J = Jy;
    g = p.gradient(x);
    run.iterations = it;
    emit(opts, "ball_minimize", start, it, J, mapping, x.norm());
    if (mapping <= 1e-9 * (1.0 + x.norm()) || d.norm() <= 1e-15 * (1.0 + x.norm())) break;
    t *= 2.0;
  }
  run.x = std::move(x);
  run.value = J;
  return run;
}

}  // namespace

CriticalPoint ball_minimize(const GridProblem& p, double rho, const SolverOptions& opts) {
  if (!(rho > 0.0)) throw std::invalid_argument("ball radius rho must be positive");
  const auto N = static_cast<Eigen::Index>(p.size());
  Rng rng(derive_seed(opts.seed, "ball_minimize"));

  DescentRun best;
  bool have = false;
  for (int s = 0; s <= std::max(0, opts.starts); ++s) {
    Eigen::VectorXd x0 = s == 0 ? Eigen::VectorXd::Zero(N) : rng.in_ball(N, rho);
    DescentRun run = projected_descent(p, std::move(x0), rho, opts, s);
    if (!have || detail::better_min(run.value, run.x, best.value, best.x)) {
      best = std::move(run);
      have = true;
    }
  }

  Eigen::VectorXd x = best.x;
  const bool interior = x.norm() < rho * (1.0 - 1e-8);
  if (interior) {
    if (auto polished = newton_polish(p, x, opts.tol * 1e-2, 1e-2 * (1.0 + x.norm()), opts.dense_cap)) {
      if (polished->norm() <= rho && p.energy(*polished) <= best.value + 1e-12 * (1.0 + std::abs(best.value)))
        x = *polished;
    }
  }
  CriticalPoint cp = make_critical_point(p, x, PointKind::ball_min, opts.tol, opts.dense_cap);
  cp.iterations = best.iterations;
  cp.on_boundary = !interior;
  if (cp.on_boundary) {
    const Eigen::VectorXd g = p.gradient(x);
    const double gn = g.norm();
    cp.kkt_satisfied = gn <= opts.tol * (1.0 + x.norm()) || (-g.dot(x)) / (gn * x.norm()) >= 1.0 - 1e-8;
  } else {
    cp.kkt_satisfied = cp.converged;
  }
  return cp;
}

GridVector convex_subproblem(const GridProblem& p, const GridVector& u, double tol, int max_iter) {
  require_same_shape(p.shape(), u.shape, "convex_subproblem");
  const Eigen::VectorXd rhs = p.lambda() * p.f_vector(u.values);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(rhs.size());
  const auto apply = [&](const Eigen::VectorXd& x) { return p.op().apply(x); };
  const IterativeResult res = conjugate_gradient(apply, rhs, v, tol, max_iter);
  if (!res.converged)
    throw ConvergenceFailure("conjugate gradients stalled at residual " + std::to_string(res.residual) +
                             " after " + std::to_string(res.iterations) + " iterations");
  return GridVector(u.shape, std::move(v));
}

// ---------------------------------------------------------------------------
// mountain pass

Path straight_path(const Eigen::VectorXd& x0, const Eigen::VectorXd& x1, int nodes) {
  const int K = std::max(3, nodes);
  Path path;
  path.nodes.reserve(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) {
    const double s = static_cast<double>(k) / static_cast<double>(K - 1);
    path.nodes.push_back((1.0 - s) * x0 + s * x1);
  }
  path.nodes.front() = x0;
  path.nodes.back() = x1;
  return path;
}

namespace {

std::vector<double> arclength(const std::vector<Eigen::VectorXd>& nodes) {
  std::vector<double> s(nodes.size(), 0.0);
  for (std::size_t i = 1; i < nodes.size(); ++i) s[i] = s[i - 1] + (nodes[i] - nodes[i - 1]).norm();
  return s;
}

Eigen::VectorXd point_at(const std::vector<Eigen::VectorXd>& nodes, const std::vector<double>& s,
                         double target) {
  auto it = std::upper_bound(s.begin(), s.end(), target);
  if (it == s.begin()) return nodes.front();
  if (it == s.end()) return nodes.back();
  const auto i = static_cast<std::size_t>(it - s.begin());
  const double span = s[i] - s[i - 1];
  const double w = span > 0.0 ? (target - s[i - 1]) / span : 0.0;
  return (1.0 - w) * nodes[i - 1] + w * nodes[i];
}

/// Re-spaces the nodes uniformly by arclength on each side of the climbing
/// node, which is kept exactly. Returns its new index.
std::size_t redistribute(std::vector<Eigen::VectorXd>& nodes, std::size_t top) {
  const std::size_t K = nodes.size();
  const std::vector<double> s = arclength(nodes);
  const double total = s.back();
  if (!(total > 0.0)) return top;
  const double s_top = s[top];
  auto k = static_cast<std::size_t>(std::lround(s_top / total * static_cast<double>(K - 1)));
  k = std::clamp<std::size_t>(k, 1, K - 2);

  std::vector<Eigen::VectorXd> out(K);
  out.front() = nodes.front();
  out.back() = nodes.back();
  out[k] = nodes[top];
  for (std::size_t i = 1; i < k; ++i)
    out[i] = point_at(nodes, s, s_top * static_cast<double>(i) / static_cast<double>(k));
  for (std::size_t i = k + 1; i + 1 < K; ++i)
    out[i] = point_at(nodes, s,
                      s_top + (total - s_top) * static_cast<double>(i - k) / static_cast<double>(K - 1 - k));
  nodes = std::move(out);
  return k;
}

Eigen::VectorXd unit_tangent(const std::vector<Eigen::VectorXd>& nodes, std::size_t i) {
  Eigen::VectorXd t = nodes[i + 1] - nodes[i - 1];
  const double n = t.norm();
  return n > 0.0 ? Eigen::VectorXd(t / n) : t;
}

}  // namespace

CriticalPoint mountain_pass(const GridProblem& p, const GridVector& x0, const GridVector& x1,
                            const SolverOptions& opts) {
  require_same_shape(p.shape(), x0.shape, "mountain_pass");
  require_same_shape(p.shape(), x1.shape, "mountain_pass");
  Path path = straight_path(x0.values, x1.values, opts.path_nodes);
  auto& nodes = path.nodes;
  const std::size_t K = nodes.size();
  const double end_max = std::max(p.energy(nodes.front()), p.energy(nodes.back()));

  std::vector<double> E(K);
  auto refresh = [&] {
    for (std::size_t i = 0; i < K; ++i) E[i] = p.energy(nodes[i]);
  };
  refresh();

  auto top_node = [&] {
    const auto it = std::max_element(E.begin(), E.end());
    return static_cast<std::size_t>(it - E.begin());
  };

  std::size_t top = top_node();
  int iterations = 0;
  for (int it = 1; it <= opts.max_iter; ++it) {
    top = top_node();
    if (top == 0 || top + 1 == K)
      throw GeometryViolated("path maximum sits at an endpoint; no mountain separates x0 and x1");
    const Eigen::VectorXd g_top = p.gradient(nodes[top]);
    const double r = g_top.norm();
    iterations = it;
    emit(opts, "mountain_pass", 0, it, E[top], r, nodes[top].norm());
    if (r <= 1e-7 * (1.0 + nodes[top].norm())) break;

    std::vector<const Eigen::VectorXd*> ptrs;
    for (const auto& n : nodes) ptrs.push_back(&n);
    const double dt = opts.damping / std::max(curvature_bound(p, ptrs), 1e-300);

    // descend across the path, climb along it
    const Eigen::VectorXd tau = unit_tangent(nodes, top);
    nodes[top] -= dt * (g_top - 2.0 * g_top.dot(tau) * tau);
    top = redistribute(nodes, top);
    refresh();
  }

  Eigen::VectorXd z = nodes[top];
  if (auto polished = newton_polish(p, z, opts.tol * 1e-2, 0.1 * (1.0 + z.norm()), opts.dense_cap))
    z = *polished;
  CriticalPoint cp = make_critical_point(p, z, PointKind::mountain_pass, opts.tol, opts.dense_cap);
  cp.iterations = iterations;
  if (cp.value < end_max - 1e-10) cp.converged = false;
  return cp;
}

// ---------------------------------------------------------------------------
// global maximization

RayReport anti_coercivity_check(const GridProblem& p, int rays, std::uint64_t seed) {
  const auto N = static_cast<Eigen::Index>(p.size());
  Rng rng(derive_seed(seed, "anti_coercivity"));
  const double J0 = p.energy_at_zero();
  RayReport rep;
  rep.anti_coercive = true;
  for (int r = 0; r < std::max(1, rays); ++r) {
    const Eigen::VectorXd e = rng.on_sphere(N, 1.0);
    bool ok = false;
    for (int k = -20; k <= 60 && !ok; ++k) {
      const double t = std::ldexp(1.0, k);
      const double j1 = p.energy(t * e);
      if (!(j1 < J0)) continue;
      const double j2 = p.energy(2.0 * t * e);
      const double j3 = p.energy(4.0 * t * e);
      if (j2 < j1 && j3 < j2) {
        ok = true;
        rep.crossing_radius = std::max(rep.crossing_radius, t);
      }
    }
    if (!ok) {
      rep.anti_coercive = false;
      return rep;
    }
  }
  return rep;
}

CriticalPoint global_maximize(const GridProblem& p, const SolverOptions& opts) {
  const RayReport rays = anti_coercivity_check(p, 16, derive_seed(opts.seed, "global_maximize.rays"));
  if (!rays.anti_coercive)
    throw NotAntiCoercive("energy does not decrease along every sampled ray; no global maximizer");
  const auto N = static_cast<Eigen::Index>(p.size());
  const double R = std::max(rays.crossing_radius, 1e-3);
  Rng rng(derive_seed(opts.seed, "global_maximize"));

  std::optional<CriticalPoint> best, best_any;
  for (int s = 0; s < std::max(1, opts.starts); ++s) {
    Eigen::VectorXd x = rng.in_ball(N, R);
    double J = p.energy(x);
    Eigen::VectorXd g = p.gradient(x);
    double t = 1.0 / std::max(curvature_bound(p, {&x}), 1e-300);
    int it = 0;
    for (it = 1; it <= opts.max_iter; ++it) {
      const double gn = g.norm();
      if (gn <= 1e-6 * (1.0 + x.norm())) break;
      bool accepted = false;
      while (t * gn > 1e-16 * (1.0 + x.norm())) {
        Eigen::VectorXd y = x + t * g;
        const double Jy = p.energy(y);
        if (Jy >= J + 1e-4 * t * gn * gn) {
          x = std::move(y);
          J = Jy;
          accepted = true;
          break;
        }
        t *= 0.5;
      }
      if (!accepted) break;
      if (!(x.norm() <= 1e6 * (1.0 + R)))
        throw NotAntiCoercive("gradient ascent diverged; energy appears unbounded above");
      g = p.gradient(x);
      emit(opts, "global_maximize", s, it, J, g.norm(), x.norm());
      t *= 2.0;
    }
    if (auto polished = newton_polish(p, x, opts.tol * 1e-2, 0.1 * (1.0 + x.norm()), opts.dense_cap))
      x = *polished;
    CriticalPoint cp = make_critical_point(p, x, PointKind::global_max, opts.tol, opts.dense_cap);
    cp.iterations = it;
    auto& slot = cp.converged ? best : best_any;
    if (!slot || detail::better_max(cp.value, cp.point.values, slot->value, slot->point.values))
      slot = std::move(cp);
  }
  return best ? *best : *best_any;
}

// ---------------------------------------------------------------------------
// mountain geometry

namespace {

/// Projected descent restricted to the sphere |x| = r.
Eigen::VectorXd sphere_descent(const GridProblem& p, Eigen::VectorXd x, double r, int max_iter) {
  double J = p.energy(x);
  double t = 1.0 / std::max(curvature_bound(p, {&x}), 1e-300);
  for (int it = 0; it < max_iter; ++it) {
    const Eigen::VectorXd g = p.gradient(x);
    const Eigen::VectorXd xhat = x / x.norm();
    const Eigen::VectorXd gt = g - g.dot(xhat) * xhat;
    if (gt.norm() <= 1e-12 * (1.0 + g.norm())) break;
    bool accepted = false;
    while (t * gt.norm() > 1e-16 * r) {
      Eigen::VectorXd y = x - t * gt;
      y *= r / y.norm();
      const double Jy = p.energy(y);
      if (Jy < J) {
        x = std::move(y);
        J = Jy;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;
    t *= 2.0;
  }
  return x;
}

struct SphereInf {
  double value = std::numeric_limits<double>::infinity();
  Eigen::VectorXd argmin;
};

SphereInf sphere_infimum(const GridProblem& p, double r, int samples, Rng& rng) {
  const auto N = static_cast<Eigen::Index>(p.size());
  std::vector<std::pair<double, Eigen::VectorXd>> pts;
  pts.reserve(static_cast<std::size_t>(samples));
  for (int s = 0; s < samples; ++s) {
    Eigen::VectorXd x = rng.on_sphere(N, r);
    pts.emplace_back(p.energy(x), std::move(x));
  }
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    return detail::better_min(a.first, a.second, b.first, b.second);
  });
  SphereInf out;
  const std::size_t refine = std::min<std::size_t>(8, pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    Eigen::VectorXd x = i < refine ? sphere_descent(p, pts[i].second, r, 500) : pts[i].second;
    const double v = i < refine ? p.energy(x) : pts[i].first;
    if (out.argmin.size() == 0 || detail::better_min(v, x, out.value, out.argmin)) {
      out.value = v;
      out.argmin = std::move(x);
    }
  }
  return out;
}

}  // namespace

MountainGeometryReport mountain_geometry_check(const GridProblem& p, double rho1, const GridVector& x0,
                                               const GridVector& x1, int samples, std::uint64_t seed) {
  require_same_shape(p.shape(), x0.shape, "mountain_geometry_check");
  require_same_shape(p.shape(), x1.shape, "mountain_geometry_check");
  if (!(x0.norm() < rho1 && rho1 < x1.norm()))
    throw std::invalid_argument("mountain geometry needs |x0| < rho1 < |x1|");

  MountainGeometryReport rep;
  rep.rho1 = rho1;
  rep.samples = std::max(0, samples);
  rep.endpoint_max = std::max(p.energy(x0.values), p.energy(x1.values));
  rep.sphere_argmin = GridVector(p.shape());
  if (rep.samples == 0) {
    rep.degenerate = true;
    rep.inf_sphere_estimate = rep.endpoint_max;
    rep.margin = 0.0;
    rep.positive = false;
    return rep;
  }

  Rng rng(derive_seed(seed, "mountain_geometry"));
  const SphereInf inf = sphere_infimum(p, rho1, rep.samples, rng);
  rep.inf_sphere_estimate = inf.value;
  rep.sphere_argmin = GridVector(p.shape(), inf.argmin);
  rep.margin = rep.inf_sphere_estimate - rep.endpoint_max;
  rep.positive = rep.margin > 0.0;

  // radius scan for a sphere on which J stays above a positive level
  const int per_radius = std::max(1, rep.samples / 4);
  for (int k = 1; k <= 16; ++k) {
    const double r = rho1 * static_cast<double>(k) / 8.0;
    const SphereInf s = sphere_infimum(p, r, per_radius, rng);
    if (s.value > rep.xi) {
      rep.xi = s.value;
      rep.kappa = r;
    }
  }
  rep.separation_pair_found = rep.xi > 0.0;
  return rep;
}

// ---------------------------------------------------------------------------
// pipeline

PipelineResult three_point_pipeline(const GridProblem& p, const StructureConstants& constants,
                                    const PipelineOptions& opts) {
  constants.validate();
  PipelineResult res;
  res.rho = constants.rho;
  const SolverOptions& so = opts.solver;

  BetaOptions beta_opts = opts.beta;
  beta_opts.seed = derive_seed(so.seed, "pipeline.beta");
  res.lambda_star = compute_lambda_star(p.nonlinearity(), p.shape(), constants, beta_opts);
  res.lambda_admissible = p.lambda() <= res.lambda_star.lambda_star;

  SolverOptions stage = so;
  stage.seed = derive_seed(so.seed, "pipeline.ball_min");
  res.ball_min = ball_minimize(p, constants.rho, stage);
  CertifyOptions cert = opts.certify;
  cert.rho = constants.rho;
  res.ball_min.certificate = certify(p, res.ball_min.point, cert);
  if (!res.ball_min.converged)
    res.issues.push_back({"ball_minimize", "unconverged",
                          res.ball_min.on_boundary ? "ball minimizer lies on the sphere and is not critical"
                                                   : "ball minimizer residual above tolerance"});

  const Eigen::VectorXd& u = res.ball_min.point.values;
  const double Ju = res.ball_min.value;
  res.rho1 = opts.rho1 ? *opts.rho1 : std::max(constants.rho, 2.0 * u.norm());
  res.rho1_exceeds_minimizer = res.rho1 > u.norm();
  res.rho1_covers_ball = res.rho1 >= constants.rho;

  // a far point below J(u) along the lowest mode of A
  const Eigen::VectorXd mode = eigenvector_analytic(p.shape(), 1, 1);
  for (int k = 0; k <= 60; ++k) {
    const double t = res.rho1 * std::ldexp(1.0, k);
    const Eigen::VectorXd x1 = t * mode;
    if (x1.norm() > res.rho1 && p.energy(x1) < Ju) {
      res.far_point = GridVector(p.shape(), x1);
      break;
    }
  }

  if (!res.far_point) {
    res.issues.push_back({"mountain_geometry", "geometry_violated",
                          "no point beyond rho1 with energy below J(u) along the lowest mode"});
  } else if (!res.rho1_exceeds_minimizer) {
    res.issues.push_back({"mountain_geometry", "error", "rho1 does not exceed |u|"});
  } else {
    res.geometry = mountain_geometry_check(p, res.rho1, res.ball_min.point, *res.far_point,
                                           opts.geometry_samples, derive_seed(so.seed, "pipeline.geometry"));
    if (!res.geometry->positive) {
      res.issues.push_back({"mountain_geometry", "geometry_violated",
                            "inf over the sphere does not exceed the endpoint energies"});
    } else {
      stage.seed = derive_seed(so.seed, "pipeline.mountain_pass");
      try {
        res.mountain_pass = mountain_pass(p, res.ball_min.point, *res.far_point, stage);
        if (!res.mountain_pass->converged)
          res.issues.push_back({"mountain_pass", "unconverged", "mountain-pass residual above tolerance"});
      } catch (const GeometryViolated& e) {
        res.issues.push_back({"mountain_pass", "geometry_violated", e.what()});
      }
    }
  }

  stage.seed = derive_seed(so.seed, "pipeline.global_max");
  try {
    res.global_max = global_maximize(p, stage);
    if (!res.global_max->converged)
      res.issues.push_back({"global_maximize", "unconverged", "maximizer residual above tolerance"});
  } catch (const NotAntiCoercive& e) {
    res.issues.push_back({"global_maximize", "not_anti_coercive", e.what()});
  }

  std::vector<const CriticalPoint*> pts;
  if (res.ball_min.converged) pts.push_back(&res.ball_min);
  if (res.mountain_pass && res.mountain_pass->converged) pts.push_back(&*res.mountain_pass);
  if (res.global_max && res.global_max->converged) pts.push_back(&*res.global_max);

  double max_norm = 0.0;
  for (const auto* cp : pts) {
    max_norm = std::max(max_norm, cp->point.norm());
    res.point_labels.push_back(to_string(cp->kind));
  }
  const double threshold = 1e-4 * (1.0 + max_norm);
  const std::size_t n = pts.size();
  res.distances.assign(n, std::vector<double>(n, 0.0));
  std::vector<std::size_t> cluster(n);
  for (std::size_t i = 0; i < n; ++i) cluster[i] = i;
  std::vector<std::string> notes;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = (pts[i]->point.values - pts[j]->point.values).norm();
      res.distances[i][j] = res.distances[j][i] = d;
      if (d <= threshold) {
        const std::size_t from = cluster[j], to = cluster[i];
        for (auto& c : cluster)
          if (c == from) c = to;
        const bool mp_max = (pts[i]->kind == PointKind::mountain_pass && pts[j]->kind == PointKind::global_max);
        notes.push_back(mp_max ? "mountain-pass point coincides with the global maximizer; a third point is "
                                 "not resolved (a continuum at that energy level is possible)"
                               : res.point_labels[i] + " and " + res.point_labels[j] + " coincide");
      }
    }
  }
  std::sort(cluster.begin(), cluster.end());
  res.distinct_count = static_cast<int>(std::unique(cluster.begin(), cluster.end()) - cluster.begin());
  if (!notes.empty()) {
    std::string joined;
    for (const auto& s : notes) joined += (joined.empty() ? "" : "; ") + s;
    res.coincidence_note = joined;
  }
  return res;
}

}  // namespace ballcrit
