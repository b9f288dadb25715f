#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "etlab/family.hpp"

namespace etlab {

inline constexpr int kDefaultExactCap = 26;
inline constexpr double kDefaultTol = 1e-12;
inline constexpr int kMaxBisectIters = 200;

// Probability with construction-time range check, so a swapped (p, tol)
// argument pair fails loudly instead of producing garbage thresholds.
class Probability {
 public:
  explicit Probability(double v) : v_(v) {
    if (!(v >= 0.0 && v <= 1.0))
      throw std::invalid_argument("Probability: value outside [0, 1]");
  }
  double value() const { return v_; }

 private:
  double v_;
};

// Product-measure weight of one set: p^|S| (1-p)^(N-|S|).
double mu_of_set(const GroundSet& g, Mask s, Probability p);

// E_p(|F|) = sum over members of p^|S|. The union-bound side of every
// threshold comparison here.
double expectation(const Family& f, Probability p);

// mu_p(<F>), exact: one pass over all 2^N masks against the up-closure
// table, accumulated pairwise. Requires N <= exact_cap.
double mu_upset_exact(const Family& f, Probability p, int exact_cap = kDefaultExactCap);

// Same value assembled level by level: sum over m of hits_m p^m (1-p)^(N-m)
// with exact integer level counts. Independent route used to cross-check
// mu_upset_exact; the two agree to 1e-12.
double mu_by_levels(const Family& f, Probability p, int exact_cap = kDefaultExactCap);

// Seeded Monte Carlo estimate of mu_p(<F>). ci_halfwidth is one standard
// error of the estimate.
struct McEstimate {
  double estimate = 0.0;
  double ci_halfwidth = 0.0;
  std::uint64_t samples = 0;
};
McEstimate mu_upset_mc(const Family& f, Probability p, std::uint64_t samples,
                       std::uint64_t seed);

// Degenerate inputs yield flagged results, not exceptions: thresholds of the
// empty family are undefined, and a family containing the empty set crosses
// every level at p = 0.
enum class RootStatus { ok, degenerate_zero, undefined };

const char* to_string(RootStatus s);

struct RootResult {
  double value = 0.0;
  RootStatus status = RootStatus::ok;
  int iterations = 0;

  bool defined() const { return status != RootStatus::undefined; }
};

// p_c: root of mu_p(<F>) = 1/2 by bisection on [0, 1].
RootResult p_critical(const Family& f, double tol = kDefaultTol,
                      int exact_cap = kDefaultExactCap);

// p_E: root of E_p(|F|) = 1/2 by bisection on [0, 1].
RootResult p_expectation(const Family& f, double tol = kDefaultTol);

// The three thresholds of one family; filled by full_thresholds in cover.hpp
// since q needs the cover optimizer. Invariant when all are defined:
// p_e <= q <= p_c up to tolerance.
struct ThresholdReport {
  RootResult p_e;
  RootResult q;
  RootResult p_c;
  double tolerance = kDefaultTol;
};

}  // namespace etlab
