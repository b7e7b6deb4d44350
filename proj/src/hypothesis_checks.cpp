#include "ballcrit/hypothesis_checks.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "ballcrit/random.hpp"

namespace ballcrit {

std::string to_string(HypothesisId id) {
  switch (id) {
    case HypothesisId::H4: return "H4";
    case HypothesisId::H5_H10: return "H5/H10";
    case HypothesisId::H7: return "H7";
    case HypothesisId::H8: return "H8";
    case HypothesisId::H9: return "H9";
  }
  return "?";
}

std::string to_string(CheckOutcome o) {
  return o == CheckOutcome::pass_sampled ? "pass_sampled" : "fail_witnessed";
}

const std::vector<Witness>& WitnessCache::get(HypothesisId id) const {
  static const std::vector<Witness> empty;
  const auto it = cache_.find(id);
  return it == cache_.end() ? empty : it->second;
}

namespace {

constexpr double kSlack = 1e-12;
constexpr double kVanishingThreshold = 1e-4;

double slack(double a, double b) { return kSlack * (1.0 + std::abs(a) + std::abs(b)); }

std::vector<std::size_t> site_list(const Nonlinearity& nl, std::size_t sites) {
  const std::size_t count = nl.is_uniform() ? 1 : std::min(sites, nl.site_count());
  std::vector<std::size_t> out(std::max<std::size_t>(count, 1));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = i;
  return out;
}

/// Log-spaced magnitudes in [lo, hi] of both signs plus uniform draws in [-hi, hi].
std::vector<double> sample_points(double lo, double hi, int count, std::uint64_t seed,
                                  std::string_view label, bool uniform_draws = true) {
  std::vector<double> xs;
  const int half = std::max(2, count / 2);
  const double a = std::log10(lo), b = std::log10(hi);
  for (int i = 0; i < half / 2 + 1; ++i) {
    const double t = half > 2 ? static_cast<double>(i) / static_cast<double>(half / 2) : 0.0;
    const double mag = std::pow(10.0, a + (b - a) * t);
    xs.push_back(mag);
    xs.push_back(-mag);
  }
  // integers inside the range make witnesses easy to read
  for (double k = std::ceil(lo); k <= hi && xs.size() < static_cast<std::size_t>(2 * count); k += 1.0) {
    if (k == 0.0) continue;
    xs.push_back(k);
    xs.push_back(-k);
  }
  if (uniform_draws) {
    Rng rng(derive_seed(seed, label));
    for (int i = 0; i < half; ++i) {
      double x = rng.uniform(-hi, hi);
      if (std::abs(x) < lo) x = std::copysign(lo, x);
      xs.push_back(x);
    }
  }
  return xs;
}

bool violates_h4(const Nonlinearity& nl, const HypothesisParams& p, std::size_t site, double x, double& lhs,
                 double& rhs) {
  lhs = nl.F(site, x);
  rhs = p.c1 * std::pow(std::abs(x), p.mu) + p.c2;
  return lhs < rhs - slack(lhs, rhs);
}

bool violates_h7(const Nonlinearity& nl, const HypothesisParams& p, std::size_t site, double v, double& lhs,
                 double& rhs) {
  lhs = p.theta * nl.F(site, v);
  rhs = v * nl.f(site, v);
  return !(lhs > 0.0) || lhs > rhs + slack(lhs, rhs);
}

bool violates_h8(const Nonlinearity& nl, const HypothesisParams& p, std::size_t site, double v, double& lhs,
                 double& rhs) {
  lhs = std::abs(nl.f(site, v));
  rhs = p.beta1 * std::pow(std::abs(v), p.eta - 1.0) + p.beta2;
  return lhs > rhs + slack(lhs, rhs);
}

double slope_ratio(const Nonlinearity& nl, std::size_t site, double v) {
  return std::abs(nl.f(site, v)) / std::abs(v);
}

bool violates_midpoint(const Nonlinearity& nl, std::size_t site, double x, double y, double& lhs,
                       double& rhs) {
  const double fx = nl.F(site, x), fy = nl.F(site, y);
  lhs = nl.F(site, 0.5 * (x + y));
  rhs = 0.5 * (fx + fy);
  return lhs > rhs + kSlack * (1.0 + std::abs(fx) + std::abs(fy));
}

/// Consults the cache, then scans `points` with `test`, stopping at the
/// first violation.
CheckVerdict scan(HypothesisId id, const Nonlinearity& nl, const HypothesisParams& params,
                  const std::vector<std::size_t>& sites, const std::vector<double>& points,
                  const std::function<bool(std::size_t, double, double&, double&)>& test, WitnessCache* cache) {
  CheckVerdict out;
  out.id = id;
  if (cache) {
    for (const Witness& w : cache->get(id)) {
      ++out.evaluated;
      if (witness_violates(nl, id, params, w)) {
        out.verdict = CheckOutcome::fail_witnessed;
        out.witness = w;
        out.note = "cached witness";
        return out;
      }
    }
  }
  for (std::size_t site : sites) {
    for (double x : points) {
      double lhs = 0.0, rhs = 0.0;
      ++out.evaluated;
      if (test(site, x, lhs, rhs)) {
        out.verdict = CheckOutcome::fail_witnessed;
        out.witness = Witness{site, x, 0.0, lhs, rhs};
        if (cache) cache->add(id, *out.witness);
        return out;
      }
    }
  }
  return out;
}

}  // namespace

bool witness_violates(const Nonlinearity& nl, HypothesisId id, const HypothesisParams& params,
                      const Witness& w) {
  double lhs = 0.0, rhs = 0.0;
  switch (id) {
    case HypothesisId::H4:
      return std::abs(w.x) >= params.d && violates_h4(nl, params, w.site, w.x, lhs, rhs);
    case HypothesisId::H7: return w.x != 0.0 && violates_h7(nl, params, w.site, w.x, lhs, rhs);
    case HypothesisId::H8: return violates_h8(nl, params, w.site, w.x, lhs, rhs);
    case HypothesisId::H5_H10: return violates_midpoint(nl, w.site, w.x, w.y, lhs, rhs);
    case HypothesisId::H9: {
      if (w.x == 0.0) return false;
      const double r = slope_ratio(nl, w.site, w.x);
      if (w.y == 0.0) return r > kVanishingThreshold;
      return r > slope_ratio(nl, w.site, w.y) * (1.0 + kSlack);
    }
  }
  return false;
}

CheckVerdict check_growth_H4(const Nonlinearity& nl, const HypothesisParams& params, std::size_t sites,
                             WitnessCache* cache) {
  const double hi = std::max(params.range, 10.0 * params.d);
  const auto pts = sample_points(params.d, hi, params.samples, params.seed, "H4");
  return scan(HypothesisId::H4, nl, params, site_list(nl, sites), pts,
              [&](std::size_t s, double x, double& l, double& r) { return violates_h4(nl, params, s, x, l, r); },
              cache);
}

CheckVerdict check_AR_H7(const Nonlinearity& nl, const HypothesisParams& params, std::size_t sites,
                         WitnessCache* cache) {
  const auto pts = sample_points(params.range * 1e-6, params.range, params.samples, params.seed, "H7");
  return scan(HypothesisId::H7, nl, params, site_list(nl, sites), pts,
              [&](std::size_t s, double x, double& l, double& r) { return violates_h7(nl, params, s, x, l, r); },
              cache);
}

CheckVerdict check_growth_H8(const Nonlinearity& nl, const HypothesisParams& params, std::size_t sites,
                             WitnessCache* cache) {
  auto pts = sample_points(params.range * 1e-6, params.range, params.samples, params.seed, "H8");
  pts.push_back(0.0);
  return scan(HypothesisId::H8, nl, params, site_list(nl, sites), pts,
              [&](std::size_t s, double x, double& l, double& r) { return violates_h8(nl, params, s, x, l, r); },
              cache);
}

CheckVerdict check_vanishing_H9(const Nonlinearity& nl, const HypothesisParams& params, std::size_t sites,
                                WitnessCache* cache) {
  CheckVerdict out;
  out.id = HypothesisId::H9;
  if (cache) {
    for (const Witness& w : cache->get(HypothesisId::H9)) {
      ++out.evaluated;
      if (witness_violates(nl, HypothesisId::H9, params, w)) {
        out.verdict = CheckOutcome::fail_witnessed;
        out.witness = w;
        out.note = "cached witness";
        return out;
      }
    }
  }
  const int rungs = std::max(2, params.ladder);
  const int tail = std::min(10, rungs - 1);
  for (std::size_t site : site_list(nl, sites)) {
    for (double sign : {1.0, -1.0}) {
      std::vector<double> ratio(static_cast<std::size_t>(rungs) + 1);
      for (int k = 1; k <= rungs; ++k) {
        ratio[static_cast<std::size_t>(k)] = slope_ratio(nl, site, sign * std::ldexp(1.0, -k));
        ++out.evaluated;
      }
      for (int k = rungs - tail + 1; k <= rungs; ++k) {
        const double prev = ratio[static_cast<std::size_t>(k - 1)];
        const double cur = ratio[static_cast<std::size_t>(k)];
        if (cur > prev * (1.0 + kSlack)) {
          out.verdict = CheckOutcome::fail_witnessed;
          out.witness = Witness{site, sign * std::ldexp(1.0, -k), sign * std::ldexp(1.0, -(k - 1)), cur, prev};
          out.note = "slope ratio increases toward 0";
        }
      }
      const double last = ratio[static_cast<std::size_t>(rungs)];
      if (!out.witness && !(last <= kVanishingThreshold)) {
        out.verdict = CheckOutcome::fail_witnessed;
        out.witness = Witness{site, sign * std::ldexp(1.0, -rungs), 0.0, last, kVanishingThreshold};
        out.note = "|f(v)|/|v| does not vanish at the smallest rung";
      }
      if (out.witness) {
        if (cache) cache->add(HypothesisId::H9, *out.witness);
        return out;
      }
    }
  }
  return out;
}

CheckVerdict check_convexity_H5_H10(const Nonlinearity& nl, const HypothesisParams& params,
                                    std::size_t sites, WitnessCache* cache) {
  CheckVerdict out;
  out.id = HypothesisId::H5_H10;
  if (cache) {
    for (const Witness& w : cache->get(out.id)) {
      ++out.evaluated;
      if (witness_violates(nl, out.id, params, w)) {
        out.verdict = CheckOutcome::fail_witnessed;
        out.witness = w;
        out.note = "cached witness";
        return out;
      }
    }
  }
  std::vector<double> pts = sample_points(params.range * 1e-6, params.range, params.samples, params.seed, "H5");
  std::sort(pts.begin(), pts.end());
  std::vector<std::pair<double, double>> pairs;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) pairs.emplace_back(pts[i], pts[i + 1]);
  for (double x : pts)
    if (x > 0.0) pairs.emplace_back(-x, x);
  Rng rng(derive_seed(params.seed, "H5.pairs"));
  for (int i = 0; i < params.samples; ++i)
    pairs.emplace_back(rng.uniform(-params.range, params.range), rng.uniform(-params.range, params.range));

  for (std::size_t site : site_list(nl, sites)) {
    for (const auto& [x, y] : pairs) {
      double lhs = 0.0, rhs = 0.0;
      ++out.evaluated;
      if (violates_midpoint(nl, site, x, y, lhs, rhs)) {
        out.verdict = CheckOutcome::fail_witnessed;
        out.witness = Witness{site, x, y, lhs, rhs};
        if (cache) cache->add(out.id, *out.witness);
        return out;
      }
    }
  }
  return out;
}

std::vector<CheckVerdict> check_all(const Nonlinearity& nl, const HypothesisParams& params, std::size_t sites,
                                    WitnessCache* cache) {
  return {check_growth_H4(nl, params, sites, cache), check_convexity_H5_H10(nl, params, sites, cache),
          check_AR_H7(nl, params, sites, cache), check_growth_H8(nl, params, sites, cache),
          check_vanishing_H9(nl, params, sites, cache)};
}

}  // namespace ballcrit
