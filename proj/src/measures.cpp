#include "etlab/measures.hpp"

#include <cmath>
#include <vector>

#include "etlab/numeric.hpp"

namespace etlab {

double mu_of_set(const GroundSet& g, Mask s, Probability p) {
  if (!g.valid_set(s))
    throw std::invalid_argument("mu_of_set: set outside the ground set");
  const int k = set_size(s);
  return pow_int(p.value(), k) * pow_int(1.0 - p.value(), g.size - k);
}

double expectation(const Family& f, Probability p) {
  return pairwise_sum(0, f.members.size(), [&](std::uint64_t i) {
    return pow_int(p.value(), set_size(f.members[i]));
  });
}

double mu_upset_exact(const Family& f, Probability p, int exact_cap) {
  const int n = f.ground.size;
  const auto table = up_closure_table(f, exact_cap);
  std::vector<double> weight(n + 1);
  for (int k = 0; k <= n; ++k)
    weight[k] = pow_int(p.value(), k) * pow_int(1.0 - p.value(), n - k);
  const std::uint64_t total = std::uint64_t(1) << n;
  return pairwise_sum(0, total, [&](std::uint64_t t) {
    return table_bit(table, t) ? weight[std::popcount(t)] : 0.0;
  });
}

double mu_by_levels(const Family& f, Probability p, int exact_cap) {
  const int n = f.ground.size;
  if (n > exact_cap)
    throw std::invalid_argument("mu_by_levels: ground size exceeds exact cap");
  // Exact level counts regardless of the default enumeration cap; the cap
  // only guards interactive use of level_stats on wide grounds.
  LevelOptions opt;
  opt.enumeration_cap = ~std::uint64_t(0);
  double total = 0.0;
  for (int m = 0; m <= n; ++m) {
    const LevelStats st = level_stats(f, m, opt);
    total += static_cast<double>(st.hits) * pow_int(p.value(), m) *
             pow_int(1.0 - p.value(), n - m);
  }
  return total;
}

McEstimate mu_upset_mc(const Family& f, Probability p, std::uint64_t samples,
                       std::uint64_t seed) {
  if (samples == 0) throw std::invalid_argument("mu_upset_mc: samples == 0");
  const int n = f.ground.size;
  std::mt19937_64 rng(seed);
  // One raw draw per element, included iff below p * 2^64; avoids
  // std::bernoulli_distribution which is not reproducible across libraries.
  const double scaled = std::ldexp(p.value(), 64);
  const std::uint64_t threshold =
      scaled >= 18446744073709551615.0 ? ~std::uint64_t(0)
                                       : static_cast<std::uint64_t>(scaled);
  std::uint64_t hits = 0;
  for (std::uint64_t i = 0; i < samples; ++i) {
    Mask t = 0;
    for (int b = 0; b < n; ++b) {
      if (rng() < threshold) t |= Mask(1) << b;
    }
    if (in_up_closure(f, t)) ++hits;
  }
  McEstimate est;
  est.samples = samples;
  est.estimate = static_cast<double>(hits) / static_cast<double>(samples);
  est.ci_halfwidth =
      std::sqrt(est.estimate * (1.0 - est.estimate) / static_cast<double>(samples));
  return est;
}

const char* to_string(RootStatus s) {
  switch (s) {
    case RootStatus::ok: return "ok";
    case RootStatus::degenerate_zero: return "degenerate_zero";
    case RootStatus::undefined: return "undefined";
  }
  return "?";
}

namespace {

// Bisection for the root of a nondecreasing g with g(0) < 0 < g(1).
template <class G>
RootResult bisect(G&& g, double tol) {
  RootResult r;
  double lo = 0.0, hi = 1.0;
  while (hi - lo > tol && r.iterations < kMaxBisectIters) {
    const double mid = 0.5 * (lo + hi);
    if (g(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
    ++r.iterations;
  }
  r.value = 0.5 * (lo + hi);
  return r;
}

}  // namespace

RootResult p_critical(const Family& f, double tol, int exact_cap) {
  if (f.empty()) return {0.0, RootStatus::undefined, 0};
  if (f.has_empty_member()) return {0.0, RootStatus::degenerate_zero, 0};
  // The up-closure indicator does not depend on p: collapse the table to
  // per-level hit counts once and bisect the level polynomial, which equals
  // mu_upset_exact(f, p) identically.
  const int n = f.ground.size;
  const auto table = up_closure_table(f, exact_cap);
  std::vector<double> hits(n + 1, 0.0);
  {
    std::vector<std::uint64_t> count(n + 1, 0);
    const std::uint64_t total = std::uint64_t(1) << n;
    for (std::uint64_t t = 0; t < total; ++t)
      if (table_bit(table, t)) ++count[std::popcount(t)];
    for (int k = 0; k <= n; ++k) hits[k] = static_cast<double>(count[k]);
  }
  auto mu = [&](double p) {
    double s = 0.0;
    for (int k = 0; k <= n; ++k)
      s += hits[k] * pow_int(p, k) * pow_int(1.0 - p, n - k);
    return s - 0.5;
  };
  return bisect(mu, tol);
}

RootResult p_expectation(const Family& f, double tol) {
  if (f.empty()) return {0.0, RootStatus::undefined, 0};
  if (f.has_empty_member()) return {0.0, RootStatus::degenerate_zero, 0};
  auto g = [&](double p) { return expectation(f, Probability(p)) - 0.5; };
  return bisect(g, tol);
}

}  // namespace etlab
