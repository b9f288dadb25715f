#include "etlab/family.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "etlab/numeric.hpp"

namespace etlab {

Family Family::of(GroundSet ground, std::vector<Mask> sets) {
  if (ground.size < 0 || ground.size > kMaxGroundSize)
    throw std::invalid_argument("Family: ground size must be in [0, 63]");
  for (Mask m : sets) {
    if (!ground.valid_set(m))
      throw std::invalid_argument("Family: set uses elements outside the ground set");
  }
  std::sort(sets.begin(), sets.end(), canonical_less);
  sets.erase(std::unique(sets.begin(), sets.end()), sets.end());
  Family f;
  f.ground = ground;
  f.members = std::move(sets);
  f.bound_l = f.members.empty() ? 0 : set_size(f.members.back());
  return f;
}

bool family_less(const Family& a, const Family& b) {
  const std::size_t n = std::min(a.members.size(), b.members.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (a.members[i] != b.members[i])
      return canonical_less(a.members[i], b.members[i]);
  }
  return a.members.size() < b.members.size();
}

bool in_up_closure(const Family& f, Mask t) {
  if (!f.ground.valid_set(t))
    throw std::invalid_argument("in_up_closure: set outside the ground set");
  for (Mask s : f.members) {
    if ((s & t) == s) return true;
  }
  return false;
}

Family minimal_sets(const Family& f) {
  // Members are sorted by cardinality, so only smaller earlier members can
  // sit inside a later one.
  std::vector<Mask> keep;
  for (Mask s : f.members) {
    bool minimal = true;
    for (Mask t : keep) {
      if (set_size(t) >= set_size(s)) break;
      if ((t & s) == t) {
        minimal = false;
        break;
      }
    }
    if (minimal) keep.push_back(s);
  }
  return Family::of(f.ground, std::move(keep));
}

Mask Restriction::lift(Mask compact) const {
  Mask out = 0;
  for (int i = 0; i < static_cast<int>(to_original.size()); ++i) {
    if ((compact >> i) & 1) out |= Mask(1) << to_original[i];
  }
  return out;
}

Restriction restrict_family(const Family& h, Mask w) {
  if (!h.ground.valid_set(w))
    throw std::invalid_argument("restrict_family: W outside the ground set");
  Restriction r;
  r.removed = w;
  std::vector<int> new_index(h.ground.size, -1);
  for (int i = 0; i < h.ground.size; ++i) {
    if ((w >> i) & 1) continue;
    new_index[i] = static_cast<int>(r.to_original.size());
    r.to_original.push_back(i);
  }
  std::vector<Mask> sets;
  sets.reserve(h.members.size());
  for (Mask s : h.members) {
    Mask cut = s & ~w;
    Mask compact = 0;
    while (cut) {
      const int i = std::countr_zero(cut);
      compact |= Mask(1) << new_index[i];
      cut &= cut - 1;
    }
    sets.push_back(compact);
  }
  r.family = Family::of(GroundSet{static_cast<int>(r.to_original.size())}, std::move(sets));
  return r;
}

bool is_l_bounded(const Family& f, int l) { return f.bound_l <= l; }

std::vector<std::uint64_t> up_closure_table(const Family& f, int exact_cap) {
  const int n = f.ground.size;
  if (n > exact_cap)
    throw std::invalid_argument("up_closure_table: ground size exceeds exact cap");
  const std::uint64_t total = std::uint64_t(1) << n;
  std::vector<std::uint64_t> table((total + 63) / 64, 0);
  for (Mask s : f.members) table[s >> 6] |= std::uint64_t(1) << (s & 63);

  // Superset propagation, one element at a time: after pass b, bit t knows
  // whether t contains a member modulo elements 0..b. Low bits move inside a
  // word, high bits pair whole words.
  static constexpr std::uint64_t kLowPattern[6] = {
      0x5555555555555555ULL, 0x3333333333333333ULL, 0x0f0f0f0f0f0f0f0fULL,
      0x00ff00ff00ff00ffULL, 0x0000ffff0000ffffULL, 0x00000000ffffffffULL};
  for (int b = 0; b < n; ++b) {
    if (b < 6) {
      const int shift = 1 << b;
      for (auto& word : table) word |= (word & kLowPattern[b]) << shift;
    } else {
      const std::uint64_t stride = std::uint64_t(1) << (b - 6);
      for (std::uint64_t i = 0; i < table.size(); ++i) {
        if (i & stride) table[i] |= table[i ^ stride];
      }
    }
  }
  return table;
}

namespace {

LevelStats sampled_level_stats(const Family& f, int m, const LevelOptions& opt,
                               std::uint64_t total) {
  LevelStats st;
  st.level = m;
  st.total = total;
  st.exact = false;
  st.samples = opt.samples;
  const int n = f.ground.size;
  std::mt19937_64 rng(opt.seed);
  std::vector<int> pool(n);
  std::uint64_t hit = 0;
  for (std::uint64_t s = 0; s < opt.samples; ++s) {
    for (int i = 0; i < n; ++i) pool[i] = i;
    Mask t = 0;  // partial Fisher-Yates: uniform m-subset
    for (int i = 0; i < m; ++i) {
      const auto j = i + uniform_below(rng, static_cast<std::uint64_t>(n - i));
      std::swap(pool[i], pool[j]);
      t |= Mask(1) << pool[i];
    }
    if (in_up_closure(f, t)) ++hit;
  }
  st.hits = hit;
  st.fraction = static_cast<double>(hit) / static_cast<double>(opt.samples);
  st.ci_halfwidth = std::sqrt(st.fraction * (1.0 - st.fraction) /
                              static_cast<double>(opt.samples));
  return st;
}

}  // namespace

LevelStats level_stats(const Family& f, int m, const LevelOptions& opt) {
  const int n = f.ground.size;
  if (m < 0 || m > n) throw std::invalid_argument("level_stats: level out of range");
  const std::uint64_t total = binom(n, m);
  if (total > opt.enumeration_cap) return sampled_level_stats(f, m, opt, total);

  LevelStats st;
  st.level = m;
  st.total = total;
  std::uint64_t hit = 0;
  if (m == 0) {
    hit = in_up_closure(f, 0) ? 1 : 0;
  } else {
    const Mask limit = Mask(1) << n;
    Mask t = (Mask(1) << m) - 1;
    while (t < limit) {
      if (in_up_closure(f, t)) ++hit;
      // Gosper's hack: next mask with the same popcount.
      const Mask c = t & (0 - t);
      const Mask r = t + c;
      t = r | (((t ^ r) >> 2) / c);
    }
  }
  st.hits = hit;
  st.fraction = total == 0 ? 0.0 : static_cast<double>(hit) / static_cast<double>(total);
  return st;
}

}  // namespace etlab
