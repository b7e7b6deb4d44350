#include "ballcrit/nonlinearity.hpp"

#include <algorithm>
#include <cmath>

namespace ballcrit {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double signed_pow(double x, double p) { return std::copysign(std::pow(std::abs(x), p), x); }

double horner(const std::vector<double>& c, double x) {
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
  return acc;
}

}  // namespace

double family_value(const ScalarFamily& fam, double x) {
  return std::visit(
      overloaded{
          [x](const PowerLaw& p) {
            if (p.c1 == 0.0) return 0.0;
            return p.c1 * p.mu * signed_pow(x, p.mu - 1.0);
          },
          [x](const OddPower& p) { return p.a * std::pow(x, 2 * p.k + 1); },
          [x](const PolynomialPotential& p) {
            double acc = 0.0;
            for (std::size_t k = p.coefficients.size(); k-- > 1;)
              acc = acc * x + static_cast<double>(k) * p.coefficients[k];
            return acc;
          },
          [x](const CustomFamily& c) { return c.f(x); },
      },
      fam);
}

double family_primitive(const ScalarFamily& fam, double x) {
  return std::visit(
      overloaded{
          [x](const PowerLaw& p) { return p.c1 * std::pow(std::abs(x), p.mu) + p.c2; },
          [x](const OddPower& p) {
            const int e = 2 * p.k + 2;
            return p.a * std::pow(x, e) / static_cast<double>(e);
          },
          [x](const PolynomialPotential& p) { return horner(p.coefficients, x); },
          [x](const CustomFamily& c) { return c.F(x); },
      },
      fam);
}

std::optional<double> family_derivative(const ScalarFamily& fam, double x) {
  return std::visit(
      overloaded{
          [x](const PowerLaw& p) -> std::optional<double> {
            if (p.c1 == 0.0) return 0.0;
            return p.c1 * p.mu * (p.mu - 1.0) * std::pow(std::abs(x), p.mu - 2.0);
          },
          [x](const OddPower& p) -> std::optional<double> {
            return p.a * (2 * p.k + 1) * std::pow(x, 2 * p.k);
          },
          [x](const PolynomialPotential& p) -> std::optional<double> {
            double acc = 0.0;
            for (std::size_t k = p.coefficients.size(); k-- > 2;)
              acc = acc * x + static_cast<double>(k * (k - 1)) * p.coefficients[k];
            return acc;
          },
          [x](const CustomFamily& c) -> std::optional<double> {
            if (!c.df) return std::nullopt;
            return c.df(x);
          },
      },
      fam);
}

bool family_is_odd(const ScalarFamily& fam) {
  return std::visit(overloaded{
                        [](const PowerLaw&) { return true; },
                        [](const OddPower&) { return true; },
                        [](const PolynomialPotential& p) {
                          for (std::size_t k = 1; k < p.coefficients.size(); k += 2)
                            if (p.coefficients[k] != 0.0) return false;
                          return true;
                        },
                        [](const CustomFamily& c) { return c.odd; },
                    },
                    fam);
}

std::string family_name(const ScalarFamily& fam) {
  return std::visit(overloaded{
                        [](const PowerLaw&) { return std::string("power"); },
                        [](const OddPower&) { return std::string("odd_power"); },
                        [](const PolynomialPotential&) { return std::string("polynomial"); },
                        [](const CustomFamily& c) { return "custom:" + c.label; },
                    },
                    fam);
}

double finite_difference_derivative(const ScalarFamily& fam, double x) {
  const double h = std::max(1e-6, 1e-6 * std::abs(x));
  return (family_value(fam, x + h) - family_value(fam, x - h)) / (2.0 * h);
}

Nonlinearity::Nonlinearity(ScalarFamily uniform) : families_{std::move(uniform)}, uniform_(true) {}

Nonlinearity::Nonlinearity(std::vector<ScalarFamily> per_site)
    : families_(std::move(per_site)), uniform_(false) {
  if (families_.empty()) throw std::invalid_argument("site table must not be empty");
}

double Nonlinearity::df(std::size_t site, double x) const {
  const ScalarFamily& fam = family(site);
  if (auto d = family_derivative(fam, x)) return *d;
  if (!fd_fallback_)
    throw DerivativeUnavailable("no closed-form derivative for " + family_name(fam) +
                                " and finite-difference fallback is disabled");
  return finite_difference_derivative(fam, x);
}

bool Nonlinearity::derivative_available() const {
  return std::all_of(families_.begin(), families_.end(), [](const ScalarFamily& f) {
    const auto* c = std::get_if<CustomFamily>(&f);
    return c == nullptr || static_cast<bool>(c->df);
  });
}

bool Nonlinearity::is_odd() const {
  return std::all_of(families_.begin(), families_.end(), family_is_odd);
}

ScalarFamily catalog_family(const std::string& name) {
  if (name == "quartic") return PowerLaw{1.0, 4.0, 0.0};
  if (name == "sextic") return PowerLaw{1.0, 6.0, 0.0};
  if (name == "quadratic") return PowerLaw{1.0, 2.0, 0.0};
  if (name == "cubic") return OddPower{1.0, 1};
  if (name == "zero") return PolynomialPotential{};
  if (name == "sublinear_power") return PowerLaw{0.4, 2.5, 0.0};
  throw std::invalid_argument("unknown catalog family '" + name + "'");
}

std::vector<std::string> catalog_names() {
  return {"quartic", "sextic", "quadratic", "cubic", "zero", "sublinear_power"};
}

}  // namespace ballcrit
