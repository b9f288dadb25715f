#pragma once

#include <bit>
#include <cstdint>
#include <vector>

namespace etlab {

// A subset of the ground set, one bit per element index 0..N-1.
using Mask = std::uint64_t;

inline int set_size(Mask m) { return std::popcount(m); }

// Ground set {0, ..., size-1}. Capped at 63 elements so every subset is a
// single Mask and exact 2^N enumeration stays addressable.
inline constexpr int kMaxGroundSize = 63;

struct GroundSet {
  int size = 0;

  Mask full_mask() const { return size == 0 ? 0 : (Mask(~0ULL) >> (64 - size)); }
  bool valid_set(Mask m) const { return (m & ~full_mask()) == 0; }
  friend bool operator==(const GroundSet&, const GroundSet&) = default;
};

// Deduplicated set family over one ground set. Members are kept in canonical
// order, cardinality first and mask value second, so serialized output and
// cover certificates are reproducible byte for byte.
struct Family {
  GroundSet ground;
  std::vector<Mask> members;
  int bound_l = 0;  // largest member cardinality, 0 for the empty family

  // Validates, deduplicates and sorts. Throws std::invalid_argument when a
  // set has bits outside the ground set or the ground size is out of range.
  static Family of(GroundSet ground, std::vector<Mask> sets);

  bool empty() const { return members.empty(); }
  std::size_t size() const { return members.size(); }
  bool has_empty_member() const { return !members.empty() && members.front() == 0; }
  friend bool operator==(const Family&, const Family&) = default;
};

// Canonical member order: cardinality, then mask value.
inline bool canonical_less(Mask a, Mask b) {
  const int sa = set_size(a), sb = set_size(b);
  return sa != sb ? sa < sb : a < b;
}

// Lexicographic comparison of whole families in canonical member order,
// used to pick a deterministic representative among equal-cost covers.
bool family_less(const Family& a, const Family& b);

// Membership of t in the up-closure <F>: does some member sit inside t?
bool in_up_closure(const Family& f, Mask t);

// The antichain of inclusion-minimal members. Same up-closure, no member
// strictly inside another.
Family minimal_sets(const Family& f);

// restrict_family grants the elements of w: each member S becomes S \ w on
// the compacted ground set X \ w. to_original maps new indices back, so
// traces can translate sets into root coordinates.
struct Restriction {
  Family family;
  std::vector<int> to_original;
  Mask removed = 0;

  Mask lift(Mask compact) const;  // map a compact-ground set back to X
};
Restriction restrict_family(const Family& h, Mask w);

bool is_l_bounded(const Family& f, int l);

// Share of the m-th level of the cube lying in <F>. Exact when C(N, m) fits
// under enumeration_cap, otherwise estimated from `samples` seeded draws.
struct LevelOptions {
  std::uint64_t enumeration_cap = 10'000'000;
  std::uint64_t samples = 1'000'000;
  std::uint64_t seed = 0;
};

struct LevelStats {
  int level = 0;
  std::uint64_t hits = 0;   // exact: hit count among all C(N,m) sets; sampled: hit count among samples
  std::uint64_t total = 0;  // C(N, m)
  double fraction = 0.0;    // exact: hits/total; sampled: hits/samples
  bool exact = true;
  std::uint64_t samples = 0;    // 0 when exact
  double ci_halfwidth = 0.0;    // one standard error of `fraction` when sampled
};

LevelStats level_stats(const Family& f, int m, const LevelOptions& opt = {});

// Up-closure membership table over all 2^N masks, bit t set iff t is in <F>.
// Requires N <= exact_cap.
std::vector<std::uint64_t> up_closure_table(const Family& f, int exact_cap = 26);

inline bool table_bit(const std::vector<std::uint64_t>& t, Mask i) {
  return (t[i >> 6] >> (i & 63)) & 1;
}

}  // namespace etlab
