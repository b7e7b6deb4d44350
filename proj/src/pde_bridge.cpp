#include "ballcrit/pde_bridge.hpp"

#include <cmath>
#include <filesystem>
#include <stdexcept>

#include "ballcrit/solution_io.hpp"

namespace ballcrit {

namespace {

std::size_t integral_ratio(double len, double h, const char* field) {
  const double q = len / h;
  const double r = std::round(q);
  if (!(h > 0.0) || !std::isfinite(q) || std::abs(q - r) > 1e-9 * std::max(1.0, q))
    throw std::invalid_argument(std::string("domain.") + field + " / h must be a positive integer");
  return static_cast<std::size_t>(r);
}

}  // namespace

GridShape RectDomain::shape() const {
  if (!(a > 0.0)) throw std::invalid_argument("domain.a must be positive");
  if (!(b > 0.0)) throw std::invalid_argument("domain.b must be positive");
  if (!(h > 0.0)) throw std::invalid_argument("domain.h must be positive");
  const std::size_t na = integral_ratio(a, h, "a");
  const std::size_t nb = integral_ratio(b, h, "b");
  if (na < 2 || nb < 2) throw std::invalid_argument("mesh too coarse: interior grid is empty");
  return GridShape(na - 1, nb - 1);
}

GridProblem discretize(const RectDomain& dom, const FieldFamily& field, double lambda) {
  const GridShape s = dom.shape();
  std::vector<ScalarFamily> sites;
  sites.reserve(s.size());
  for (std::size_t j = 1; j <= s.n; ++j)
    for (std::size_t i = 1; i <= s.m; ++i)
      sites.push_back(field(static_cast<double>(i) * dom.h, static_cast<double>(j) * dom.h));
  return GridProblem(OperatorA(s, 1.0 / (dom.h * dom.h)), Nonlinearity(std::move(sites)), lambda,
                     dom.h * dom.h);
}

GridProblem discretize(const RectDomain& dom, const ScalarFamily& uniform, double lambda) {
  const GridShape s = dom.shape();
  return GridProblem(OperatorA(s, 1.0 / (dom.h * dom.h)), Nonlinearity(uniform), lambda, dom.h * dom.h);
}

void validate_ladder(const std::vector<double>& ladder) {
  if (ladder.empty()) throw std::invalid_argument("ladder must contain at least one mesh width");
  for (double h : ladder)
    if (!(h > 0.0)) throw std::invalid_argument("ladder entries must be positive");
  for (std::size_t k = 1; k < ladder.size(); ++k)
    if (std::abs(ladder[k - 1] / ladder[k] - 2.0) > 1e-9)
      throw std::invalid_argument("ladder must halve at every step");
}

PoincareEstimate poincare_estimate(const RectDomain& dom, const std::vector<double>& ladder) {
  validate_ladder(ladder);
  PoincareEstimate est;
  for (double h : ladder) {
    const RectDomain level = dom.with_h(h);
    est.level_values.push_back(OperatorA(level.shape(), 1.0 / (h * h)).min_eigenvalue());
  }
  for (std::size_t k = 1; k < est.level_values.size(); ++k)
    if (!(est.level_values[k] > est.level_values[k - 1])) est.monotone = false;
  const std::size_t n = est.level_values.size();
  if (n >= 2) {
    est.lambda1 = (4.0 * est.level_values[n - 1] - est.level_values[n - 2]) / 3.0;
    est.extrapolated = true;
  } else {
    est.lambda1 = est.level_values.back();
  }
  est.c = 1.0 / std::sqrt(est.lambda1);
  return est;
}

GridVector prolong(const RectDomain& coarse, const GridVector& u) {
  const GridShape cs = coarse.shape();
  require_same_shape(cs, u.shape, "prolong");
  const GridShape fs = coarse.with_h(coarse.h / 2.0).shape();
  const auto value = [&](std::size_t i, std::size_t j) {
    if (i == 0 || j == 0 || i > cs.m || j > cs.n) return 0.0;
    return u.at(i, j);
  };
  GridVector out(fs);
  for (std::size_t J = 1; J <= fs.n; ++J) {
    for (std::size_t I = 1; I <= fs.m; ++I) {
      const std::size_t i0 = I / 2, i1 = (I + 1) / 2;
      const std::size_t j0 = J / 2, j1 = (J + 1) / 2;
      out.at(I, J) = 0.25 * (value(i0, j0) + value(i1, j0) + value(i0, j1) + value(i1, j1));
    }
  }
  return out;
}

GridVector restrict_to(const RectDomain& fine, const GridVector& u, const RectDomain& coarse) {
  require_same_shape(fine.shape(), u.shape, "restrict_to");
  const double q = coarse.h / fine.h;
  const auto f = static_cast<std::size_t>(std::llround(q));
  if (f < 1 || std::abs(q - static_cast<double>(f)) > 1e-9)
    throw std::invalid_argument("restrict_to: coarse mesh is not nested in the fine mesh");
  const GridShape cs = coarse.shape();
  GridVector out(cs);
  for (std::size_t j = 1; j <= cs.n; ++j)
    for (std::size_t i = 1; i <= cs.m; ++i) out.at(i, j) = u.at(i * f, j * f);
  return out;
}

double discrete_l2(const RectDomain& dom, const Eigen::VectorXd& u) { return dom.h * u.norm(); }

void export_snapshot_csv(const RectDomain& dom, const GridVector& u, const std::string& path) {
  require_same_shape(dom.shape(), u.shape, "export_snapshot_csv");
  std::string out = "x,y,u\n";
  for (std::size_t j = 1; j <= u.shape.n; ++j)
    for (std::size_t i = 1; i <= u.shape.m; ++i)
      out += format_double(static_cast<double>(i) * dom.h) + "," + format_double(static_cast<double>(j) * dom.h) +
             "," + format_double(u.at(i, j)) + "\n";
  write_file_atomic(path, out);
}

RefinementReport refinement_study(const RectDomain& dom, const FieldFamily& field, double lambda,
                                  const std::vector<double>& ladder, const RefinementOptions& opts) {
  validate_ladder(ladder);
  RefinementReport rep;
  rep.domain = dom.with_h(ladder.front());
  rep.ladder = ladder;
  rep.lambda = lambda;
  rep.poincare = poincare_estimate(dom, ladder);
  if (!rep.poincare.monotone)
    rep.issues.push_back({"poincare_estimate", "non_monotone", "alpha_1/h^2 is not increasing along the ladder"});
  rep.constants = StructureConstants{2.0, 1.0, rep.poincare.c, opts.rho};

  std::vector<RectDomain> levels;
  std::vector<GridProblem> problems;
  for (double h : ladder) {
    levels.push_back(dom.with_h(h));
    problems.push_back(discretize(levels.back(), field, lambda));
  }

  const PipelineResult pr = three_point_pipeline(problems.front(), rep.constants, opts.pipeline);
  for (const auto& issue : pr.issues) rep.issues.push_back(issue);

  std::vector<const CriticalPoint*> seeds;
  if (pr.ball_min.converged) seeds.push_back(&pr.ball_min);
  if (pr.mountain_pass && pr.mountain_pass->converged) seeds.push_back(&*pr.mountain_pass);
  if (pr.global_max && pr.global_max->converged) seeds.push_back(&*pr.global_max);

  const double accept = std::max(opts.newton_tol, 1e-8);
  for (const CriticalPoint* seed : seeds) {
    BranchTrack br;
    br.label = to_string(seed->kind);
    br.levels.push_back(seed->point);
    br.energies.push_back(seed->value);
    br.residuals.push_back(seed->residual);
    for (std::size_t k = 1; k < levels.size(); ++k) {
      const GridProblem& p = problems[k];
      const GridVector warm = prolong(levels[k - 1], br.levels.back());
      const auto polished = newton_polish(p, warm.values, opts.newton_tol, 0.5 * (1.0 + warm.norm()),
                                          opts.pipeline.solver.dense_cap, 100);
      const double r = polished ? p.gradient(*polished).norm() : INFINITY;
      if (!polished || !(r <= accept * (1.0 + polished->norm()))) {
        br.lost = true;
        br.lost_at_level = k;
        br.note = "Newton continuation from the interpolated branch did not converge";
        break;
      }
      br.levels.emplace_back(p.shape(), *polished);
      br.energies.push_back(p.energy(*polished));
      br.residuals.push_back(r);
    }
    std::vector<GridVector> on_coarse;
    for (std::size_t k = 0; k < br.levels.size(); ++k)
      on_coarse.push_back(restrict_to(levels[k], br.levels[k], levels.front()));
    for (std::size_t k = 0; k + 1 < on_coarse.size(); ++k)
      br.differences.push_back(discrete_l2(levels.front(), on_coarse[k].values - on_coarse[k + 1].values));
    for (std::size_t k = 0; k + 1 < br.differences.size(); ++k)
      if (br.differences[k + 1] > 0.0) br.ratios.push_back(br.differences[k] / br.differences[k + 1]);
    if (!br.ratios.empty()) br.order = std::log2(br.ratios.back());
    if (br.note.empty() && !br.differences.empty() && br.ratios.empty()) br.note = "differences vanish";

    if (!opts.csv_dir.empty()) {
      std::filesystem::create_directories(opts.csv_dir);
      for (std::size_t k = 0; k < br.levels.size(); ++k) {
        const std::string path =
            (std::filesystem::path(opts.csv_dir) / (br.label + "_level" + std::to_string(k) + ".csv")).string();
        export_snapshot_csv(levels[k], br.levels[k], path);
        rep.snapshot_files.push_back(path);
      }
    }
    rep.branches.push_back(std::move(br));
  }
  return rep;
}

}  // namespace ballcrit
