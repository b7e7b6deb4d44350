#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ballcrit/dc_framework.hpp"
#include "ballcrit/grid_problem.hpp"

namespace ballcrit {

class GeometryViolated : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConvergenceFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotAntiCoercive : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class PointKind { ball_min, mountain_pass, global_max, other };
enum class PointClass { local_min, saddle, local_max, degenerate };

std::string to_string(PointKind k);
std::string to_string(PointClass c);

struct CriticalPoint {
  GridVector point;
  double value = 0.0;     // J
  double residual = 0.0;  // |grad J|
  PointKind kind = PointKind::other;
  PointClass classification = PointClass::degenerate;
  std::optional<CertificateReport> certificate;
  /// Residual reached opts.tol * (1 + |point|).
  bool converged = false;
  /// Ball minimizer sitting on the sphere |x| = rho (KKT point).
  bool on_boundary = false;
  bool kkt_satisfied = false;
  int iterations = 0;
};

struct TraceRecord {
  std::string_view stage;
  int start = 0;
  int iteration = 0;
  double value = 0.0;
  double residual = 0.0;
  double norm = 0.0;
};

using TraceSink = std::function<void(const TraceRecord&)>;

struct SolverOptions {
  double tol = 1e-10;
  int max_iter = 20000;
  int starts = 8;
  int path_nodes = 41;
  double damping = 0.5;
  std::uint64_t seed = 0;
  std::size_t dense_cap = kDefaultDenseCap;
  TraceSink trace;
};

/// Hessian spectrum sign test with relative tolerance 1e-8.
PointClass classify(const GridProblem& p, const Eigen::VectorXd& x, std::size_t dense_cap = kDefaultDenseCap);

/// Damped Newton on grad J = 0 from `x`. Returns the polished point when the
/// residual improved and the iterate stayed within `max_shift` of `x`.
std::optional<Eigen::VectorXd> newton_polish(const GridProblem& p, const Eigen::VectorXd& x,
                                             double tol, double max_shift,
                                             std::size_t dense_cap = kDefaultDenseCap,
                                             int max_iter = 60);

CriticalPoint make_critical_point(const GridProblem& p, const Eigen::VectorXd& x, PointKind kind,
                                  double tol, std::size_t dense_cap = kDefaultDenseCap);

/// Projected gradient descent with backtracking on the ball |x| <= rho,
/// multistarted from 0 and opts.starts random points.
CriticalPoint ball_minimize(const GridProblem& p, double rho, const SolverOptions& opts = {});

/// argmin Phi(x) - lambda <f(u), x>, i.e. the solution of A v = lambda f(u).
GridVector convex_subproblem(const GridProblem& p, const GridVector& u, double tol = 1e-12,
                             int max_iter = 10000);

struct Path {
  std::vector<Eigen::VectorXd> nodes;
};

/// Straight segment x0 -> x1 sampled at K equally spaced nodes.
Path straight_path(const Eigen::VectorXd& x0, const Eigen::VectorXd& x1, int nodes);

/// Numerical mountain pass: the highest node of a discretized path climbs
/// along the path tangent and descends across it, the remaining nodes are
/// redistributed by arclength, and the limit is Newton-polished.
CriticalPoint mountain_pass(const GridProblem& p, const GridVector& x0, const GridVector& x1,
                            const SolverOptions& opts = {});

/// Multistart gradient ascent with Newton polish. Throws NotAntiCoercive when
/// sampled rays do not decrease or the ascent diverges.
CriticalPoint global_maximize(const GridProblem& p, const SolverOptions& opts = {});

struct RayReport {
  bool anti_coercive = false;
  /// Largest radius at which a sampled ray first dropped below J(0).
  double crossing_radius = 0.0;
};

RayReport anti_coercivity_check(const GridProblem& p, int rays, std::uint64_t seed);

struct MountainGeometryReport {
  double rho1 = 0.0;
  double inf_sphere_estimate = 0.0;  // b
  GridVector sphere_argmin;
  double endpoint_max = 0.0;
  double margin = 0.0;
  double kappa = 0.0;
  double xi = 0.0;
  bool separation_pair_found = false;
  int samples = 0;
  bool degenerate = false;
  bool positive = false;
};

MountainGeometryReport mountain_geometry_check(const GridProblem& p, double rho1, const GridVector& x0,
                                               const GridVector& x1, int samples,
                                               std::uint64_t seed = 0);

struct PipelineOptions {
  SolverOptions solver;
  std::optional<double> rho1;
  BetaOptions beta;
  CertifyOptions certify;
  int geometry_samples = 256;
};

struct StageIssue {
  std::string stage;
  std::string code;  // geometry_violated, unconverged, not_anti_coercive, error
  std::string message;
};

struct PipelineResult {
  LambdaStarResult lambda_star;
  bool lambda_admissible = false;
  double rho = 0.0;
  double rho1 = 0.0;
  bool rho1_exceeds_minimizer = false;  // rho1 > |u|
  bool rho1_covers_ball = false;        // rho1 >= rho
  CriticalPoint ball_min;
  std::optional<GridVector> far_point;  // x1 used for the mountain pass
  std::optional<MountainGeometryReport> geometry;
  std::optional<CriticalPoint> mountain_pass;
  std::optional<CriticalPoint> global_max;
  std::vector<StageIssue> issues;
  std::vector<std::vector<double>> distances;  // over `points`
  std::vector<std::string> point_labels;
  int distinct_count = 0;
  std::optional<std::string> coincidence_note;

  bool has_issue(std::string_view code) const;
};

/// Distinctness threshold 1e-4 (1 + max norm).
PipelineResult three_point_pipeline(const GridProblem& p, const StructureConstants& constants,
                                    const PipelineOptions& opts = {});

}  // namespace ballcrit
