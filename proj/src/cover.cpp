#include "etlab/cover.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "etlab/numeric.hpp"

namespace etlab {

namespace {

// Two costs within this window count as a tie; the lexicographically
// smaller canonical cover wins. Exact structural ties (same multiset of
// cardinalities) land well inside it, distinct optima stay outside.
constexpr double kTieEps = 1e-13;

using Coverage = std::vector<std::uint64_t>;

struct CoverageHash {
  std::size_t operator()(const Coverage& c) const {
    std::uint64_t h = 1469598103934665603ULL;
    for (std::uint64_t w : c) {
      h ^= w;
      h *= 1099511628211ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

bool subset_of(Mask t, Mask s) { return (t & s) == t; }

struct SearchContext {
  const Family& h;
  double p;
  std::vector<double> pow_p;       // p^0 .. p^bound_l
  std::vector<double> min_ratio;   // per member: admissible cost share
  int words = 0;

  explicit SearchContext(const Family& fam, double prob) : h(fam), p(prob) {
    pow_p.resize(h.bound_l + 1);
    for (int k = 0; k <= h.bound_l; ++k) pow_p[k] = pow_int(p, k);
    words = static_cast<int>((h.size() + 63) / 64);
    build_ratios();
  }

  int coverage_count(Mask t) const {
    int c = 0;
    for (Mask s : h.members)
      if (subset_of(t, s)) ++c;
    return c;
  }

  // min over candidates T inside member i of p^|T| / |coverage(T)|. Summing
  // these over uncovered members is a valid lower bound on any completion:
  // each chosen set's cost, split evenly over everything it covers, pays at
  // least the minimum share of every member it touches.
  void build_ratios() {
    min_ratio.resize(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) {
      const Mask s = h.members[i];
      double best = 1.0;  // T = empty set covers all of H at cost 1
      if (!h.members.empty()) best = 1.0 / static_cast<double>(h.size());
      for (Mask t = s; t != 0; t = (t - 1) & s) {
        const double r = pow_p[set_size(t)] / coverage_count(t);
        if (r < best) best = r;
      }
      min_ratio[i] = best;
    }
  }

  Coverage cover_bits(Mask t) const {
    Coverage c(words, 0);
    for (std::size_t j = 0; j < h.size(); ++j)
      if (subset_of(t, h.members[j])) c[j >> 6] |= std::uint64_t(1) << (j & 63);
    return c;
  }

  bool all_covered(const Coverage& c) const {
    std::size_t n = h.size();
    for (int w = 0; w < words; ++w) {
      const std::uint64_t want =
          n >= 64 ? ~std::uint64_t(0) : ((std::uint64_t(1) << n) - 1);
      if ((c[w] & want) != want) return false;
      n -= std::min<std::size_t>(n, 64);
    }
    return true;
  }

  int first_uncovered(const Coverage& c) const {
    for (std::size_t j = 0; j < h.size(); ++j)
      if (!((c[j >> 6] >> (j & 63)) & 1)) return static_cast<int>(j);
    return -1;
  }

  double completion_bound(const Coverage& c) const {
    double sum = 0.0;
    bool any = false;
    for (std::size_t j = 0; j < h.size(); ++j) {
      if (!((c[j >> 6] >> (j & 63)) & 1)) {
        sum += min_ratio[j];
        any = true;
      }
    }
    if (!any) return 0.0;
    // At least one more set is needed and none is cheaper than p^l.
    return std::max(sum, pow_p[h.bound_l]);
  }
};

struct Node {
  double bound;
  double cost;
  std::uint64_t seq;
  Coverage covered;
  std::vector<Mask> chosen;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.seq > b.seq;
  }
};

CoverSolution solved(const Family& ground_of, std::vector<Mask> sets, double cost,
                     bool optimal, std::uint64_t nodes) {
  CoverSolution out;
  out.cover = Family::of(ground_of.ground, std::move(sets));
  out.cost = cost;
  out.optimal = optimal;
  out.nodes_explored = nodes;
  return out;
}

}  // namespace

bool covers(const Family& g, const Family& h) {
  if (!(g.ground == h.ground)) return false;
  for (Mask s : h.members) {
    bool hit = false;
    for (Mask t : g.members) {
      if (subset_of(t, s)) {
        hit = true;
        break;
      }
    }
    if (!hit) return false;
  }
  return true;
}

CoverSolution cover_cost(const Family& h, Probability p, const CoverOptions& opt) {
  if (h.empty()) return solved(h, {}, 0.0, true, 0);
  if (h.bound_l > 25)
    throw std::invalid_argument("cover_cost: members too large for subset branching");
  if (p.value() == 0.0) {
    // Degenerate corner: every nonempty set is free, so the optimum is 0
    // unless the empty set must be covered. The certificate here is the
    // minimal antichain rather than a lex-minimal zero-cost cover.
    if (h.has_empty_member()) return solved(h, {0}, 1.0, true, 0);
    Family antichain = minimal_sets(h);
    return solved(h, std::move(antichain.members), 0.0, true, 0);
  }

  SearchContext ctx(h, p.value());

  // Seed the incumbent with two always-valid covers: the minimal antichain
  // of H and {empty set}.
  double best_cost;
  std::vector<Mask> best_sets;
  {
    Family antichain = minimal_sets(h);
    double anti_cost = 0.0;
    for (Mask m : antichain.members) anti_cost += ctx.pow_p[set_size(m)];
    if (anti_cost <= 1.0) {
      best_cost = anti_cost;
      best_sets = antichain.members;
    } else {
      best_cost = 1.0;
      best_sets = {0};
    }
  }

  std::priority_queue<Node, std::vector<Node>, NodeOrder> queue;
  std::unordered_map<Coverage, double, CoverageHash> seen;
  std::uint64_t seq = 0;
  std::uint64_t pops = 0;
  bool certified = true;

  queue.push(Node{ctx.completion_bound(Coverage(ctx.words, 0)), 0.0, seq++,
                  Coverage(ctx.words, 0), {}});

  auto consider_solution = [&](const Node& n) {
    if (n.cost < best_cost - kTieEps) {
      best_cost = n.cost;
      best_sets = n.chosen;
      return;
    }
    if (std::abs(n.cost - best_cost) <= kTieEps) {
      Family a = Family::of(h.ground, n.chosen);
      Family b = Family::of(h.ground, best_sets);
      if (family_less(a, b)) {
        best_cost = n.cost;
        best_sets = n.chosen;
      }
    }
  };

  while (!queue.empty()) {
    if (pops >= opt.node_budget) {
      certified = false;
      break;
    }
    Node node = queue.top();
    queue.pop();
    if (node.bound > best_cost + kTieEps) break;  // best-first: rest is worse
    ++pops;

    const int pivot = ctx.first_uncovered(node.covered);
    if (pivot < 0) {
      consider_solution(node);
      continue;
    }

    // Subsets of the pivot member, largest first (cheapest when p < 1),
    // then increasing mask value; the empty set branch comes last.
    const Mask s = h.members[pivot];
    std::vector<Mask> branches;
    branches.reserve(std::size_t(1) << set_size(s));
    for (Mask t = s;; t = (t - 1) & s) {
      branches.push_back(t);
      if (t == 0) break;
    }
    std::sort(branches.begin(), branches.end(), [](Mask a, Mask b) {
      const int ca = set_size(a), cb = set_size(b);
      return ca != cb ? ca > cb : a < b;
    });

    for (Mask t : branches) {
      Node child;
      child.cost = node.cost + ctx.pow_p[set_size(t)];
      if (child.cost > best_cost + kTieEps) continue;
      child.covered = node.covered;
      const Coverage add = ctx.cover_bits(t);
      for (int w = 0; w < ctx.words; ++w) child.covered[w] |= add[w];
      child.bound = child.cost + ctx.completion_bound(child.covered);
      if (child.bound > best_cost + kTieEps) continue;
      auto it = seen.find(child.covered);
      if (it != seen.end() && it->second < child.cost - kTieEps) continue;
      if (it == seen.end())
        seen.emplace(child.covered, child.cost);
      else if (child.cost < it->second)
        it->second = child.cost;
      child.chosen = node.chosen;
      child.chosen.push_back(t);
      child.seq = seq++;
      queue.push(std::move(child));
    }
  }

  CoverSolution out = solved(h, std::move(best_sets), best_cost, certified, pops);
  return out;
}

CoverSolution cover_bruteforce(const Family& h, Probability p) {
  if (h.size() > 16)
    throw std::invalid_argument("cover_bruteforce: more than 16 members");
  if (h.empty()) return solved(h, {}, 0.0, true, 0);

  // Distinct candidate subsets of members.
  std::unordered_set<Mask> cand_set;
  for (Mask s : h.members) {
    for (Mask t = s;; t = (t - 1) & s) {
      cand_set.insert(t);
      if (t == 0) break;
    }
  }
  if (cand_set.size() > (std::size_t(1) << 20))
    throw std::invalid_argument("cover_bruteforce: candidate pool exceeds 2^20");
  std::vector<Mask> cands(cand_set.begin(), cand_set.end());
  std::sort(cands.begin(), cands.end(), canonical_less);

  const int n = static_cast<int>(h.size());
  std::vector<std::uint32_t> cov(cands.size());
  std::vector<double> cost(cands.size());
  for (std::size_t c = 0; c < cands.size(); ++c) {
    std::uint32_t bits = 0;
    for (int j = 0; j < n; ++j)
      if (subset_of(cands[c], h.members[j])) bits |= 1u << j;
    cov[c] = bits;
    cost[c] = pow_int(p.value(), set_size(cands[c]));
  }

  const std::uint32_t full = n == 32 ? ~0u : ((1u << n) - 1);
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dp(std::size_t(full) + 1, inf);
  std::vector<std::int32_t> from_state(std::size_t(full) + 1, -1);
  std::vector<std::int32_t> via(std::size_t(full) + 1, -1);
  dp[0] = 0.0;
  for (std::uint32_t s = 0; s <= full; ++s) {
    if (dp[s] == inf || s == full) continue;
    int pivot = 0;
    while ((s >> pivot) & 1) ++pivot;
    for (std::size_t c = 0; c < cands.size(); ++c) {
      if (!((cov[c] >> pivot) & 1)) continue;
      const std::uint32_t ns = s | cov[c];
      const double nc = dp[s] + cost[c];
      if (nc < dp[ns]) {
        dp[ns] = nc;
        from_state[ns] = static_cast<std::int32_t>(s);
        via[ns] = static_cast<std::int32_t>(c);
      }
    }
  }

  std::vector<Mask> chosen;
  for (std::uint32_t s = full; s != 0; s = static_cast<std::uint32_t>(from_state[s]))
    chosen.push_back(cands[static_cast<std::size_t>(via[s])]);
  return solved(h, std::move(chosen), dp[full], true, std::size_t(full) + 1);
}

QValue q_value(const Family& f, double tol, const CoverOptions& opt) {
  QValue out;
  if (f.empty()) {
    out.q = {0.0, RootStatus::undefined, 0};
    out.witness = cover_cost(f, Probability(0.0), opt);
    return out;
  }
  if (f.has_empty_member()) {
    out.q = {0.0, RootStatus::degenerate_zero, 0};
    out.witness = cover_cost(f, Probability(0.5), opt);
    return out;
  }
  double lo = 0.0, hi = 1.0;
  int iters = 0;
  bool certified = true;
  while (hi - lo > tol && iters < kMaxBisectIters) {
    const double mid = 0.5 * (lo + hi);
    const CoverSolution sol = cover_cost(f, Probability(mid), opt);
    certified = certified && sol.optimal;
    if (sol.cost < 0.5)
      lo = mid;
    else
      hi = mid;
    ++iters;
  }
  out.q = {0.5 * (lo + hi), RootStatus::ok, iters};
  out.witness = cover_cost(f, Probability(out.q.value), opt);
  out.witness.optimal = out.witness.optimal && certified;
  return out;
}

bool subadditivity_check(const Family& h, std::uint64_t split_seed, Probability p) {
  std::mt19937_64 rng(split_seed);
  std::vector<Mask> left, right;
  for (Mask s : h.members) {
    if (rng() & 1)
      left.push_back(s);
    else
      right.push_back(s);
  }
  const Family h1 = Family::of(h.ground, std::move(left));
  const Family h2 = Family::of(h.ground, std::move(right));
  const double whole = cover_cost(h, p).cost;
  const double parts = cover_cost(h1, p).cost + cover_cost(h2, p).cost;
  return whole <= parts + 1e-12;
}

ThresholdReport full_thresholds(const Family& f, double tol, int exact_cap,
                                const CoverOptions& opt) {
  ThresholdReport r;
  r.tolerance = tol;
  r.p_e = p_expectation(f, tol);
  r.q = q_value(f, tol, opt).q;
  r.p_c = p_critical(f, tol, exact_cap);
  return r;
}

}  // namespace etlab
