#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace ballcrit {

/// F(x) = c1 |x|^mu + c2, f(x) = c1 mu |x|^(mu-2) x.
struct PowerLaw {
  double c1 = 1.0;
  double mu = 4.0;
  double c2 = 0.0;
};

/// f(x) = a x^(2k+1), F(x) = a x^(2k+2) / (2k+2).
struct OddPower {
  double a = 1.0;
  int k = 1;
};

/// F(x) = sum_k coefficients[k] x^k (ascending powers).
struct PolynomialPotential {
  std::vector<double> coefficients;
};

/// User-supplied pair (f, F). `df` may be empty; the Hessian then falls back
/// to central differences.
struct CustomFamily {
  std::string label;
  std::function<double(double)> f;
  std::function<double(double)> F;
  std::function<double(double)> df;
  bool odd = false;
};

using ScalarFamily = std::variant<PowerLaw, OddPower, PolynomialPotential, CustomFamily>;

double family_value(const ScalarFamily& fam, double x);      // f
double family_primitive(const ScalarFamily& fam, double x);  // F
std::optional<double> family_derivative(const ScalarFamily& fam, double x);  // f'
bool family_is_odd(const ScalarFamily& fam);
std::string family_name(const ScalarFamily& fam);

/// Central-difference f' with step max(1e-6, 1e-6|x|).
double finite_difference_derivative(const ScalarFamily& fam, double x);

class DerivativeUnavailable : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Site-wise nonlinearity f((i,j), .) with primitive F((i,j), .). Either one
/// family shared by every site or a table indexed by flattened site.
class Nonlinearity {
 public:
  explicit Nonlinearity(ScalarFamily uniform);
  explicit Nonlinearity(std::vector<ScalarFamily> per_site);

  static Nonlinearity zero() { return Nonlinearity(PolynomialPotential{}); }

  bool is_uniform() const { return families_.size() == 1 && uniform_; }
  /// Number of table entries; 0 when uniform.
  std::size_t site_count() const { return is_uniform() ? 0 : families_.size(); }
  const ScalarFamily& family(std::size_t site) const {
    return is_uniform() ? families_.front() : families_.at(site);
  }
  const std::vector<ScalarFamily>& families() const { return families_; }

  double f(std::size_t site, double x) const { return family_value(family(site), x); }
  double F(std::size_t site, double x) const { return family_primitive(family(site), x); }

  /// Closed-form f' when available, otherwise central differences if the
  /// fallback is enabled; throws DerivativeUnavailable when neither applies.
  double df(std::size_t site, double x) const;

  bool derivative_available() const;
  bool fd_fallback() const { return fd_fallback_; }
  Nonlinearity& set_fd_fallback(bool enabled) {
    fd_fallback_ = enabled;
    return *this;
  }

  bool is_odd() const;

 private:
  std::vector<ScalarFamily> families_;
  bool uniform_ = true;
  bool fd_fallback_ = true;
};

/// Named entries of the built-in catalog ("quartic", "sextic", "quadratic",
/// "cubic", "zero", "sublinear_power").
ScalarFamily catalog_family(const std::string& name);
std::vector<std::string> catalog_names();

}  // namespace ballcrit
