#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ballcrit/nonlinearity.hpp"

namespace ballcrit {

/// Sampling verdicts for growth, convexity, Ambrosetti-Rabinowitz and
/// vanishing-slope conditions on a nonlinearity. A pass is only ever a
/// "passed on samples"; a failure always carries a concrete witness.
enum class HypothesisId { H4, H5_H10, H7, H8, H9 };
std::string to_string(HypothesisId id);

struct HypothesisParams {
  // H4: F(x) >= c1 |x|^mu + c2 for |x| >= d
  double mu = 4.0;
  double c1 = 1.0;
  double c2 = 0.0;
  double d = 1.0;
  // H7: 0 < theta F(v) <= v f(v)
  double theta = 4.0;
  // H8: |f(v)| <= beta1 |v|^(eta-1) + beta2
  double beta1 = 4.0;
  double eta = 4.0;
  double beta2 = 0.0;
  // sampling
  double range = 10.0;  // samples span [-range, range]
  int samples = 2000;
  int ladder = 40;      // H9 rungs v_k = 2^-k
  std::uint64_t seed = 0;
};

struct Witness {
  std::size_t site = 0;
  double x = 0.0;
  double y = 0.0;  // second point of the midpoint test (H5/H10 only)
  double lhs = 0.0;
  double rhs = 0.0;
};

enum class CheckOutcome { pass_sampled, fail_witnessed };

struct CheckVerdict {
  HypothesisId id = HypothesisId::H4;
  CheckOutcome verdict = CheckOutcome::pass_sampled;
  std::optional<Witness> witness;
  int evaluated = 0;
  std::string note;
};

std::string to_string(CheckOutcome o);

/// Witnesses found by earlier runs, re-tested first so a violation once seen
/// is never lost when the sample count changes.
class WitnessCache {
 public:
  void add(HypothesisId id, const Witness& w) { cache_[id].push_back(w); }
  const std::vector<Witness>& get(HypothesisId id) const;

 private:
  std::map<HypothesisId, std::vector<Witness>> cache_;
};

/// Re-evaluates a witness and reports whether it is a strict violation.
bool witness_violates(const Nonlinearity& nl, HypothesisId id, const HypothesisParams& params,
                      const Witness& w);

CheckVerdict check_growth_H4(const Nonlinearity& nl, const HypothesisParams& params, std::size_t sites,
                             WitnessCache* cache = nullptr);
CheckVerdict check_AR_H7(const Nonlinearity& nl, const HypothesisParams& params, std::size_t sites,
                         WitnessCache* cache = nullptr);
CheckVerdict check_growth_H8(const Nonlinearity& nl, const HypothesisParams& params, std::size_t sites,
                             WitnessCache* cache = nullptr);
CheckVerdict check_vanishing_H9(const Nonlinearity& nl, const HypothesisParams& params, std::size_t sites,
                                WitnessCache* cache = nullptr);
CheckVerdict check_convexity_H5_H10(const Nonlinearity& nl, const HypothesisParams& params,
                                    std::size_t sites, WitnessCache* cache = nullptr);

/// Runs all five checks; `params.range` defaults to 10 rho at the call site.
std::vector<CheckVerdict> check_all(const Nonlinearity& nl, const HypothesisParams& params,
                                    std::size_t sites, WitnessCache* cache = nullptr);

}  // namespace ballcrit
