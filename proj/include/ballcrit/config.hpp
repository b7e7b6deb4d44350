#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "ballcrit/hypothesis_checks.hpp"
#include "ballcrit/pde_bridge.hpp"

namespace ballcrit {

/// Validation failure; the message starts with the dotted path of the field.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct LambdaMode {
  enum class Kind { fixed, sweep, auto_fraction };
  Kind kind = Kind::fixed;
  double value = 0.0;     // fixed
  double from = 0.0;      // sweep
  double to = 0.0;
  int steps = 0;
  double fraction = 1.0;  // auto: lambda = fraction * lambda*
};

struct RunConfig {
  std::string command;  // optional default when --command is absent

  // problem
  std::optional<GridShape> shape;
  std::optional<RectDomain> domain;
  std::vector<double> ladder;  // refine only; defaults to {h, h/2, h/4}
  ScalarFamily family = PowerLaw{1.0, 4.0, 0.0};
  LambdaMode lambda;

  // ball
  double rho = 1.0;
  std::optional<double> rho1;

  // structure constant overrides
  double alpha = 2.0;
  std::optional<double> gamma;
  std::optional<double> c;

  // solver
  SolverOptions solver;
  CertifyOptions certify;
  BetaOptions beta;
  int geometry_samples = 256;

  HypothesisParams hypotheses;
  bool hypotheses_range_set = false;

  // output
  std::string report_path;
  std::string trace_path;
  std::string csv_dir;
  std::string vector_path;  // certify input

  nlohmann::json source;  // the parsed document, echoed into reports
};

/// Parses and validates. Unknown keys are rejected so typos do not pass silently.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);

/// The lambda values of the configured mode; auto mode needs lambda*.
std::vector<double> lambda_values(const LambdaMode& mode, double lambda_star);

/// Structure constants for the configured problem: the discrete choice
/// (gamma = alpha_1, c = 1) on plain grids, gamma = 1 and the Poincare
/// estimate on domains, each overridable.
StructureConstants structure_for(const RunConfig& cfg);

/// The problem at a given lambda (grid or discretized domain).
GridProblem build_problem(const RunConfig& cfg, double lambda);

ScalarFamily parse_family(const nlohmann::json& j, const std::string& where);

}  // namespace ballcrit
