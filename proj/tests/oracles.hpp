#pragma once

// Slow reference implementations the tests trust instead of the library's
// optimized paths. Everything here is a plain loop over small state spaces.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "etlab/cover.hpp"
#include "etlab/family.hpp"
#include "etlab/generators.hpp"
#include "etlab/measures.hpp"
#include "etlab/numeric.hpp"

namespace oracle {

using etlab::Family;
using etlab::Mask;

// Up-closure membership by direct member scan.
inline bool in_upset(const Family& f, Mask t) {
  for (Mask s : f.members)
    if ((s & t) == s) return true;
  return false;
}

// mu_p(<F>) as a plain sum over all 2^N masks.
inline double mu_upset(const Family& f, double p) {
  const int n = f.ground.size;
  double acc = 0.0;
  for (Mask t = 0; t < (Mask(1) << n); ++t)
    if (in_upset(f, t))
      acc += std::pow(p, etlab::set_size(t)) * std::pow(1.0 - p, n - etlab::set_size(t));
  return acc;
}

// Root of sum over G of p^|T| = 1/2, the expectation threshold of a cover.
inline double p_expectation_of(const std::vector<Mask>& g) {
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    double e = 0.0;
    for (Mask t : g) e += std::pow(mid, etlab::set_size(t));
    (e < 0.5 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// max over covers G of p_E(G), by enumerating one chosen subset per member.
// Every minimal cover is the image of such an assignment, and p_E can only
// drop when extra sets join a cover, so the maximum over assignments is the
// maximum over all covers. The root only depends on the multiset of set
// sizes, so those are memoized.
inline double q_max_over_covers(const Family& f) {
  const std::size_t k = f.members.size();
  std::vector<std::vector<Mask>> choices(k);
  for (std::size_t i = 0; i < k; ++i) {
    const Mask s = f.members[i];
    for (Mask t = s;; t = (t - 1) & s) {
      choices[i].push_back(t);
      if (t == 0) break;
    }
  }
  std::vector<std::size_t> pick(k, 0);
  std::map<std::vector<int>, double> roots;
  double best = 0.0;
  for (;;) {
    std::vector<Mask> g;
    for (std::size_t i = 0; i < k; ++i) g.push_back(choices[i][pick[i]]);
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    std::vector<int> sizes;
    for (Mask t : g) sizes.push_back(etlab::set_size(t));
    std::sort(sizes.begin(), sizes.end());
    auto it = roots.find(sizes);
    if (it == roots.end()) it = roots.emplace(sizes, p_expectation_of(g)).first;
    best = std::max(best, it->second);
    std::size_t i = 0;
    while (i < k && ++pick[i] == choices[i].size()) pick[i++] = 0;
    if (i == k) break;
  }
  return best;
}

// Seeded random instance with bounded shape, for property sweeps. The member
// count is clamped to the number of distinct nonempty sets that exist at the
// drawn (n, l), which tiny grounds would otherwise run out of.
inline Family random_instance(std::mt19937_64& rng, int max_n, int max_l,
                              int max_count) {
  const int n = 2 + static_cast<int>(rng() % (max_n - 1));
  const int l = 1 + static_cast<int>(rng() % std::min(max_l, n));
  std::uint64_t available = 0;
  for (int k = 1; k <= l; ++k) available += etlab::binom(n, k);
  const auto cap = static_cast<int>(std::min<std::uint64_t>(available, 64));
  const int count = 1 + static_cast<int>(rng() % std::min(max_count, cap));
  return etlab::random_family(n, l, count, rng());
}

}  // namespace oracle
