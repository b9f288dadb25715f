#include "etlab/generators.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "etlab/numeric.hpp"

namespace etlab {

int edge_count(int n) { return n * (n - 1) / 2; }

int edge_index(int n, int i, int j) {
  if (i > j) std::swap(i, j);
  if (i < 0 || i == j || j >= n) throw std::invalid_argument("edge_index: bad pair");
  return i * n - i * (i + 1) / 2 + (j - i - 1);
}

Family hamiltonian_cycles(int n) {
  if (n < 3 || edge_count(n) > 63)
    throw std::invalid_argument("hamiltonian_cycles: need 3 <= n <= 11");
  std::vector<int> rest(n - 1);
  std::iota(rest.begin(), rest.end(), 1);
  std::vector<Mask> sets;
  do {
    // Start every tour at vertex 0 and keep one direction per cycle.
    if (rest.front() > rest.back()) continue;
    Mask edges = 0;
    int prev = 0;
    for (int v : rest) {
      edges |= Mask(1) << edge_index(n, prev, v);
      prev = v;
    }
    edges |= Mask(1) << edge_index(n, prev, 0);
    sets.push_back(edges);
  } while (std::next_permutation(rest.begin(), rest.end()));
  return Family::of(GroundSet{edge_count(n)}, std::move(sets));
}

Family cliques(int n, int k) {
  if (k < 2 || k > n || edge_count(n) > 63)
    throw std::invalid_argument("cliques: need 2 <= k <= n and C(n,2) <= 63");
  std::vector<Mask> sets;
  Mask vs = (Mask(1) << k) - 1;
  const Mask limit = Mask(1) << n;
  while (vs < limit) {
    Mask edges = 0;
    for (int i = 0; i < n; ++i) {
      if (!((vs >> i) & 1)) continue;
      for (int j = i + 1; j < n; ++j)
        if ((vs >> j) & 1) edges |= Mask(1) << edge_index(n, i, j);
    }
    sets.push_back(edges);
    const Mask c = vs & (0 - vs);
    const Mask r = vs + c;
    vs = r | (((vs ^ r) >> 2) / c);
  }
  return Family::of(GroundSet{edge_count(n)}, std::move(sets));
}

namespace {

void match_rest(int n, unsigned used, Mask edges, std::vector<Mask>& out) {
  if (used == (1u << n) - 1) {
    out.push_back(edges);
    return;
  }
  int i = 0;
  while ((used >> i) & 1) ++i;
  for (int j = i + 1; j < n; ++j) {
    if ((used >> j) & 1) continue;
    match_rest(n, used | (1u << i) | (1u << j),
               edges | (Mask(1) << edge_index(n, i, j)), out);
  }
}

}  // namespace

Family perfect_matchings(int n) {
  if (n < 2 || n % 2 != 0 || edge_count(n) > 63)
    throw std::invalid_argument("perfect_matchings: need even 2 <= n <= 11");
  std::vector<Mask> sets;
  match_rest(n, 0, 0, sets);
  return Family::of(GroundSet{edge_count(n)}, std::move(sets));
}

Family random_family(int ground, int l, int count, std::uint64_t seed) {
  if (ground < 1 || ground > 63) throw std::invalid_argument("random_family: ground");
  if (l < 1 || l > ground) throw std::invalid_argument("random_family: l");
  if (count < 0) throw std::invalid_argument("random_family: count");
  unsigned __int128 available = 0;
  for (int s = 1; s <= l; ++s) available += binom(ground, s);
  if (static_cast<unsigned __int128>(count) > available)
    throw std::invalid_argument("random_family: count exceeds distinct sets of size <= l");

  std::mt19937_64 rng(seed);
  std::unordered_set<Mask> chosen;
  std::vector<int> pool(ground);
  while (static_cast<int>(chosen.size()) < count) {
    const int size = 1 + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(l)));
    std::iota(pool.begin(), pool.end(), 0);
    Mask m = 0;
    for (int i = 0; i < size; ++i) {
      const auto j = i + uniform_below(rng, static_cast<std::uint64_t>(ground - i));
      std::swap(pool[i], pool[j]);
      m |= Mask(1) << pool[i];
    }
    chosen.insert(m);
  }
  return Family::of(GroundSet{ground}, std::vector<Mask>(chosen.begin(), chosen.end()));
}

}  // namespace etlab
