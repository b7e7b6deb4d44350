#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ballcrit/solvers.hpp"

namespace ballcrit {

/// Rectangle (0, a) x (0, b) with Dirichlet data, meshed at width h.
struct RectDomain {
  double a = 1.0;
  double b = 1.0;
  double h = 0.125;

  /// Interior grid (a/h - 1) x (b/h - 1). Throws std::invalid_argument when
  /// a/h or b/h is not integral or the interior is empty.
  GridShape shape() const;
  RectDomain with_h(double h_) const { return RectDomain{a, b, h_}; }
};

/// Nonlinearity family at the point (x, y).
using FieldFamily = std::function<ScalarFamily(double x, double y)>;

/// Operator scale 1/h^2, cell measure h^2, nonlinearity sampled at the nodes.
GridProblem discretize(const RectDomain& dom, const FieldFamily& field, double lambda);
GridProblem discretize(const RectDomain& dom, const ScalarFamily& uniform, double lambda);

struct PoincareEstimate {
  double c = 0.0;
  double lambda1 = 0.0;               // extrapolated when possible
  std::vector<double> level_values;   // alpha_1 / h^2 per ladder level
  bool monotone = true;
  bool extrapolated = false;
};

/// c = 1/sqrt(lambda_1) with lambda_1 Richardson-extrapolated (order 2) from
/// the two finest levels. A single level gives the raw value, unextrapolated.
PoincareEstimate poincare_estimate(const RectDomain& dom, const std::vector<double>& ladder);

/// Throws std::invalid_argument unless the ladder halves at every step.
void validate_ladder(const std::vector<double>& ladder);

/// Bilinear interpolation of a grid function from mesh h to mesh h/2 with
/// zero boundary values.
GridVector prolong(const RectDomain& coarse, const GridVector& u);

/// Injection of a fine-level grid function onto the nodes of a coarser mesh.
GridVector restrict_to(const RectDomain& fine, const GridVector& u, const RectDomain& coarse);

struct BranchTrack {
  std::string label;  // ball_min, mountain_pass, global_max
  std::vector<GridVector> levels;  // solutions, one per level reached
  std::vector<double> energies;
  std::vector<double> residuals;
  std::vector<double> differences;  // discrete L2 on the coarsest grid
  std::vector<double> ratios;       // differences[k] / differences[k+1]
  std::optional<double> order;      // log2 of the last ratio
  bool lost = false;
  std::optional<std::size_t> lost_at_level;
  std::string note;
};

struct RefinementOptions {
  PipelineOptions pipeline;
  double rho = 1.0;
  double newton_tol = 1e-11;
  /// When non-empty, per-level snapshots are written as x,y,u CSV files here.
  std::string csv_dir;
};

struct RefinementReport {
  RectDomain domain;
  std::vector<double> ladder;
  PoincareEstimate poincare;
  StructureConstants constants;
  double lambda = 0.0;
  std::vector<BranchTrack> branches;
  std::vector<StageIssue> issues;
  std::vector<std::string> snapshot_files;
};

RefinementReport refinement_study(const RectDomain& dom, const FieldFamily& field, double lambda,
                                  const std::vector<double>& ladder, const RefinementOptions& opts = {});

/// Discrete L2 norm sqrt(h^2 sum u^2).
double discrete_l2(const RectDomain& dom, const Eigen::VectorXd& u);

/// Writes "x,y,u" rows in the canonical flattening order.
void export_snapshot_csv(const RectDomain& dom, const GridVector& u, const std::string& path);

}  // namespace ballcrit
