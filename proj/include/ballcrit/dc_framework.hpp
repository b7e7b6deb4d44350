#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "ballcrit/grid_problem.hpp"

namespace ballcrit {

/// Growth exponent alpha, coercivity constant gamma, embedding constant c and
/// ball radius rho of the structure gamma |v|^alpha <= <phi(v), v>.
struct StructureConstants {
  double alpha = 2.0;
  double gamma = 1.0;
  double c = 1.0;
  double rho = 1.0;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

/// Discrete instantiation: alpha = 2, gamma = smallest eigenvalue of A, c = 1.
StructureConstants discrete_constants(const OperatorA& op, double rho);

enum class BetaMethod { closed_form, multistart_ascent };
std::string to_string(BetaMethod m);

struct BetaOptions {
  enum class Mode { automatic, closed_form, multistart };
  Mode mode = Mode::automatic;
  int starts = 16;
  int max_iter = 2000;
  std::uint64_t seed = 0;
};

struct BetaEstimate {
  double beta = 0.0;
  GridVector maximizer;
  BetaMethod method = BetaMethod::closed_form;
  /// False only when the closed-form branch applied.
  bool heuristic = false;
};

struct LambdaStarResult {
  double beta = 0.0;
  double lambda_star = 0.0;  // +infinity when beta == 0
  GridVector maximizer;
  BetaMethod method = BetaMethod::closed_form;
  bool estimate = false;
};

/// True when every site family has f(0) = 0 and f^2 convex nondecreasing in
/// x^2, so the sup of |f(x)| over the ball sits at rho times a coordinate.
bool closed_form_beta_applicable(const Nonlinearity& nl);

/// sup over |x| <= rho of |f(x)|_2. `rho` is taken from `constants`.
BetaEstimate beta_sup(const Nonlinearity& nl, GridShape shape, const StructureConstants& constants,
                      const BetaOptions& opts = {});

/// gamma rho^(alpha-1) / (beta c); +infinity when beta == 0.
double lambda_star(const StructureConstants& constants, double beta);

LambdaStarResult compute_lambda_star(const Nonlinearity& nl, GridShape shape,
                                     const StructureConstants& constants,
                                     const BetaOptions& opts = {});

enum class Verdict { certified, inconclusive };
std::string to_string(Verdict v);

struct CertifyOptions {
  double tol_energy = 1e-10;  // relative to max(1, |J(u)|)
  double tol_linear = 1e-10;  // relative to max(1, |lambda f(u)|)
  int max_iter = 10000;
  std::optional<double> rho;
};

struct CertificateReport {
  GridVector candidate;
  GridVector companion;
  double j_u = 0.0;
  double j_v = 0.0;
  double energy_gap = 0.0;          // j_v - j_u
  double residual = 0.0;            // |A u - lambda f(u)|
  double companion_residual = 0.0;  // |A v - lambda f(u)|
  int linear_iterations = 0;
  std::optional<bool> companion_in_ball;
  std::optional<double> ball_margin;  // rho - |v|
  Verdict verdict = Verdict::inconclusive;
  std::string diagnostic;
};

/// Solves the companion problem A v = lambda f(u) and certifies u as a
/// critical point when J(u) <= J(v) up to tolerance. Since J(u) >= J(v)
/// always holds for this companion, the test closes only at critical points.
CertificateReport certify(const GridProblem& p, const GridVector& u, const CertifyOptions& opts = {});

struct H3Report {
  bool passed = false;
  bool degenerate = false;  // no samples drawn
  double worst_ratio = 0.0; // min over samples of v'Av / |v|^2
  int samples = 0;
};

H3Report h3_check(const OperatorA& op, const StructureConstants& constants, int samples,
                  std::uint64_t seed = 0);

}  // namespace ballcrit
