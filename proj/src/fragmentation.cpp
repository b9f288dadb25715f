#include "etlab/fragmentation.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "etlab/numeric.hpp"

namespace etlab {

namespace {

// floor with a one-nano guard so products like 0.1 * 1000 * p * N that are
// integers in exact arithmetic do not fall one short in doubles.
long long guarded_floor(double x) { return static_cast<long long>(std::floor(x + 1e-9)); }

int size_cut(double delta, int l) { return static_cast<int>(guarded_floor(delta * l)); }

}  // namespace

const char* to_string(Mode m) {
  switch (m) {
    case Mode::main3: return "main3";
    case Mode::main4: return "main4";
    case Mode::bell: return "bell";
  }
  return "?";
}

Mode mode_from_string(const std::string& s) {
  if (s == "main3") return Mode::main3;
  if (s == "main4") return Mode::main4;
  if (s == "bell") return Mode::bell;
  throw std::invalid_argument("unknown mode: " + s);
}

double ConstantsProfile::good_threshold(int l) const {
  if (mode == Mode::main3) return std::ldexp(1.0, -(l + 2));
  return std::pow(1.0 + epsilon / 3.0, -l);
}

double ConstantsProfile::bad_budget(int l) const {
  if (mode == Mode::main3) return std::ldexp(1.0, -(3 * l + 1));
  return std::pow(1.0 + epsilon / 3.0, -l);
}

double ConstantsProfile::dcl_bound_factor(int l) const {
  if (mode == Mode::main3) return std::ldexp(1.0, -(4 * l + 3));
  return std::pow(1.0 + epsilon / 3.0, -2 * l);
}

int ConstantsProfile::base_level() const {
  switch (mode) {
    case Mode::main3: return 0;
    case Mode::main4: return l0;
    case Mode::bell: return bell_base;
  }
  return 0;
}

double ConstantsProfile::hypothesis_bound(int l) const {
  // Inductive invariant carried down the recursion. The bell statement's
  // top-level assumption f(H) > 1/2 implies this and is checked separately
  // by verify_covering_theorem.
  if (mode == Mode::main3) return 0.5 - std::ldexp(1.0, -(l + 2));
  return 0.5 - std::pow(1.0 + epsilon / 3.0, -l);
}

double ConstantsProfile::target_fraction(int l) const {
  switch (mode) {
    case Mode::main3: return 2.0 / 3.0 + std::ldexp(1.0, -(l + 2));
    case Mode::main4: return 2.0 / 3.0 + std::pow(1.0 + epsilon / 3.0, -l);
    case Mode::bell: return 1.0 - epsilon1;
  }
  return 0.0;
}

double cost_rate(double delta) {
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("cost_rate: delta outside (0, 1)");
  return std::exp2(1.0 / delta) / std::log2(1.0 / delta);
}

OptimizedConstants optimize_constants(int grid, double refine_tol) {
  if (grid < 100) throw std::invalid_argument("optimize_constants: grid too coarse");
  double best_d = 0.5, best_g = cost_rate(0.5);
  for (int i = 1; i < grid; ++i) {
    const double d = static_cast<double>(i) / grid;
    const double g = cost_rate(d);
    if (g < best_g) {
      best_g = g;
      best_d = d;
    }
  }
  // Golden-section refinement inside the bracketing grid cell.
  const double inv_phi = 0.6180339887498949;
  double a = std::max(best_d - 1.0 / grid, 1e-9);
  double b = std::min(best_d + 1.0 / grid, 1.0 - 1e-9);
  double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
  double f1 = cost_rate(x1), f2 = cost_rate(x2);
  while (b - a > refine_tol) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = cost_rate(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = cost_rate(x2);
    }
  }
  const double d = 0.5 * (a + b);
  return {cost_rate(d), d};
}

int min_l0(double epsilon, double delta) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("min_l0: epsilon must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("min_l0: delta outside (0, 1)");
  const double base = 1.0 + epsilon / 3.0;
  auto reached = [&](long long l) {
    const long long e = l - guarded_floor(delta * static_cast<double>(l));
    return std::pow(base, static_cast<double>(e)) >= 2.0;
  };
  long long hi = 1;
  while (!reached(hi)) {
    hi *= 2;
    if (hi > (1LL << 40))
      throw std::invalid_argument("min_l0: epsilon too small, l0 astronomically large");
  }
  long long lo = hi / 2;  // reached(hi), not reached(lo) for hi > 1
  while (lo + 1 < hi) {
    const long long mid = lo + (hi - lo) / 2;
    (reached(mid) ? hi : lo) = mid;
  }
  return static_cast<int>(hi);
}

ConstantsProfile build_profile(Mode mode, double L, double delta,
                               std::optional<double> epsilon1) {
  if (!(L > 0.0)) throw std::invalid_argument("build_profile: L must be positive");
  ConstantsProfile prof;
  prof.mode = mode;
  prof.L = L;
  if (mode == Mode::main3) {
    if (epsilon1) throw std::invalid_argument("build_profile: epsilon1 is a bell parameter");
    prof.delta = 0.9;
    prof.c = 0.1;
    prof.paper_ok = L >= 1000.0;
    return prof;
  }
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("build_profile: delta outside (0, 1)");
  prof.delta = delta;
  prof.c = std::log2(1.0 / delta);
  const double eps = std::pow(L * prof.c, delta) / 2.0 - 1.0;
  if (!(eps > 0.0))
    throw std::invalid_argument(
        "build_profile: epsilon = (L log2(1/delta))^delta / 2 - 1 is not positive; "
        "L sits at or below the infimum for this delta, increase L for slack");
  if (!(eps < 3.0))
    throw std::invalid_argument(
        "build_profile: epsilon exceeds 3, reduce L or move delta toward 1");
  prof.epsilon = eps;
  prof.l0 = min_l0(eps, delta);
  prof.paper_ok = true;
  if (mode == Mode::main4) {
    if (epsilon1) throw std::invalid_argument("build_profile: epsilon1 is a bell parameter");
    return prof;
  }
  if (!epsilon1) throw std::invalid_argument("build_profile: bell mode needs epsilon1");
  const double e1 = *epsilon1;
  if (!(e1 > 0.0 && e1 < 1.0 / prof.l0))
    throw std::invalid_argument("build_profile: epsilon1 outside (0, 1/l0)");
  prof.epsilon1 = e1;
  prof.bell_base = static_cast<int>(guarded_floor(1.0 / e1)) - 1;
  return prof;
}

long long m_level(const ConstantsProfile& prof, Probability p, long long n, int l) {
  if (l < 0 || n < 0) throw std::invalid_argument("m_level: negative argument");
  const double pn = p.value() * static_cast<double>(n);
  double x = prof.L * pn * std::log2(static_cast<double>(l) + 1.0);
  if (prof.mode == Mode::main4)
    x += 1000.0 * pn * std::log2(static_cast<double>(prof.l0) + 1.0);
  if (prof.mode == Mode::bell) x += 96.0 * pn * std::log2(1.0 / prof.epsilon1);
  return guarded_floor(x);
}

FragmentOutcome fragment_once(const Family& h, Mask w, int l,
                              const ConstantsProfile& prof, Probability p) {
  if (!is_l_bounded(h, l))
    throw std::invalid_argument("fragment_once: family is not l-bounded");
  FragmentOutcome out;
  out.w_mask = w;
  out.restriction = restrict_family(h, w);
  out.minimal = minimal_sets(out.restriction.family);
  const int cut = size_cut(prof.delta, l);  // large means |T| > delta*l, i.e. |T| >= cut+1
  std::vector<Mask> large, small;
  for (Mask t : out.minimal.members) (set_size(t) > cut ? large : small).push_back(t);
  out.large = Family::of(out.minimal.ground, std::move(large));
  out.small = Family::of(out.minimal.ground, std::move(small));
  double sigma = 0.0;
  for (Mask t : out.large.members) sigma += pow_int(p.value(), set_size(t));
  out.sigma = sigma;
  out.threshold = prof.good_threshold(l);
  out.good = sigma <= out.threshold;
  return out;
}

namespace {

int grant_size(const ConstantsProfile& prof, Probability p, int n) {
  return static_cast<int>(guarded_floor(prof.c * prof.L * p.value() * n));
}

// Shared W scan behind dcl_verify, good_fraction and run_induction, so the
// three never drift apart. Exhaustive order is ascending mask value, which
// is canonical for fixed |W|.
struct ScanResult {
  std::vector<WRecord> records;
  bool truncated = false;
  std::uint64_t evaluated = 0;
  bool exhaustive = true;
  std::uint64_t total_w = 0;
  double sigma_sum = 0.0;  // exhaustive: plain sum; sampled: scaled estimate
  double mu_sum = 0.0;
  double mu_sum_ci = 0.0;
  std::uint64_t bad_count = 0;
  bool mu_available = true;
  std::optional<Mask> lowest_good;
};

ScanResult scan_w(const Family& h, int w, int l, const ConstantsProfile& prof,
                  Probability p, const Sampling& sampling, int exact_cap,
                  std::size_t record_cap) {
  const int n = h.ground.size;
  ScanResult res;
  res.total_w = binom(n, w);
  res.mu_available = (n - w) <= exact_cap;

  auto evaluate = [&](Mask wm) {
    const FragmentOutcome fo = fragment_once(h, wm, l, prof, p);
    WRecord rec;
    rec.w_mask = wm;
    rec.sigma = fo.sigma;
    rec.good = fo.good;
    rec.large_size = static_cast<int>(fo.large.size());
    if (res.mu_available)
      rec.mu = fo.large.empty() ? 0.0
                                : mu_upset_exact(fo.large, p, exact_cap);
    return rec;
  };

  const bool go_exhaustive =
      sampling.exhaustive && res.total_w <= sampling.exhaustive_cap;
  res.exhaustive = go_exhaustive;

  if (go_exhaustive) {
    double mu_acc = 0.0, sigma_acc = 0.0;
    auto take = [&](Mask wm) {
      WRecord rec = evaluate(wm);
      sigma_acc += rec.sigma;
      if (rec.mu) mu_acc += *rec.mu;
      if (!rec.good) ++res.bad_count;
      if (rec.good && !res.lowest_good) res.lowest_good = wm;
      ++res.evaluated;
      if (res.records.size() < record_cap)
        res.records.push_back(rec);
      else
        res.truncated = true;
    };
    if (w == 0) {
      take(0);
    } else {
      const Mask limit = Mask(1) << n;
      Mask wm = (Mask(1) << w) - 1;
      while (wm < limit) {
        take(wm);
        const Mask c = wm & (0 - wm);
        const Mask r = wm + c;
        wm = r | (((wm ^ r) >> 2) / c);
      }
    }
    res.sigma_sum = sigma_acc;
    res.mu_sum = mu_acc;
    return res;
  }

  // Sampled: uniform draws with replacement from the w-level; sums are
  // scaled to the full level and carry one-standard-error halfwidths.
  if (sampling.count == 0) throw std::invalid_argument("scan: sampling count is zero");
  std::mt19937_64 rng(sampling.seed);
  std::vector<int> pool(n);
  double mu_acc = 0.0, mu_sq = 0.0, sigma_acc = 0.0;
  for (std::uint64_t s = 0; s < sampling.count; ++s) {
    for (int i = 0; i < n; ++i) pool[i] = i;
    Mask wm = 0;
    for (int i = 0; i < w; ++i) {
      const auto j = i + uniform_below(rng, static_cast<std::uint64_t>(n - i));
      std::swap(pool[i], pool[j]);
      wm |= Mask(1) << pool[i];
    }
    WRecord rec = evaluate(wm);
    sigma_acc += rec.sigma;
    if (rec.mu) {
      mu_acc += *rec.mu;
      mu_sq += *rec.mu * *rec.mu;
    }
    if (!rec.good) ++res.bad_count;
    if (rec.good && (!res.lowest_good || wm < *res.lowest_good)) res.lowest_good = wm;
    ++res.evaluated;
    if (res.records.size() < record_cap)
      res.records.push_back(rec);
    else
      res.truncated = true;
  }
  const double count = static_cast<double>(sampling.count);
  const double scale = static_cast<double>(res.total_w);
  res.sigma_sum = scale * sigma_acc / count;
  res.mu_sum = scale * mu_acc / count;
  const double mean = mu_acc / count;
  const double var = std::max(0.0, mu_sq / count - mean * mean);
  res.mu_sum_ci = scale * std::sqrt(var / count);
  return res;
}

double sum2_rhs_factor(const ConstantsProfile& prof, int l) {
  const double base = prof.c * prof.L;
  const int two_exp = prof.mode == Mode::main3 ? l + 1 : l;
  return std::pow(base, -prof.delta * l) * std::ldexp(1.0, two_exp);
}

}  // namespace

DclReport dcl_verify(const Family& h, int l, const ConstantsProfile& prof,
                     Probability p, const Sampling& sampling, int exact_cap) {
  if (!is_l_bounded(h, l))
    throw std::invalid_argument("dcl_verify: family is not l-bounded");
  const int n = h.ground.size;
  const int w = grant_size(prof, p, n);
  DclReport rep;
  rep.w = w;
  if (w > n) throw std::invalid_argument("dcl_verify: w exceeds the ground size");

  const double cnw = static_cast<double>(binom(n, w));
  rep.rhs = cnw * prof.dcl_bound_factor(l);

  // Instance form of the counting chain.
  const int cut = size_cut(prof.delta, l);
  double s2 = 0.0;
  for (int k = cut + 1; k <= l; ++k)
    s2 += static_cast<double>(binom(n, w + k)) * static_cast<double>(binom(l, k)) *
          pow_int(p.value(), k);
  rep.sum2_lhs = s2;
  rep.sum2_rhs = cnw * sum2_rhs_factor(prof, l);
  rep.sum2_holds = rep.sum2_lhs <= rep.sum2_rhs;

  if (w == 0) {
    rep.degenerate_w0 = true;
    rep.holds = true;  // vacuous: nothing is granted
    return rep;
  }
  if (n - w > exact_cap)
    throw std::invalid_argument("dcl_verify: residual ground exceeds the exact cap");

  const ScanResult scan =
      scan_w(h, w, l, prof, p, sampling, exact_cap, /*record_cap=*/0);
  rep.lhs = scan.mu_sum;
  rep.sigma_sum = scan.sigma_sum;
  rep.exhaustive = scan.exhaustive;
  rep.evaluated = scan.evaluated;
  rep.lhs_ci = scan.mu_sum_ci;
  rep.holds = rep.lhs <= rep.rhs;
  return rep;
}

BadFractionReport good_fraction(const Family& h, int l, const ConstantsProfile& prof,
                                Probability p, const Sampling& sampling) {
  if (!is_l_bounded(h, l))
    throw std::invalid_argument("good_fraction: family is not l-bounded");
  const int n = h.ground.size;
  const int w = grant_size(prof, p, n);
  if (w > n) throw std::invalid_argument("good_fraction: w exceeds the ground size");
  BadFractionReport rep;
  rep.w = w;
  rep.budget = prof.bad_budget(l);
  // sigma alone decides good, so the scan can skip mu entirely.
  const ScanResult scan = scan_w(h, w, l, prof, p, sampling,
                                 /*exact_cap=*/-1, /*record_cap=*/0);
  rep.exhaustive = scan.exhaustive;
  rep.evaluated = scan.evaluated;
  rep.fraction_bad =
      static_cast<double>(scan.bad_count) / static_cast<double>(scan.evaluated);
  if (!scan.exhaustive)
    rep.ci = std::sqrt(rep.fraction_bad * (1.0 - rep.fraction_bad) /
                       static_cast<double>(scan.evaluated));
  rep.within_budget = rep.fraction_bad <= rep.budget;
  return rep;
}

StepReport induction_step_check(const Family& h, Mask w, int l,
                                const ConstantsProfile& prof, Probability p,
                                double tol, const CoverOptions& copt) {
  const FragmentOutcome fo = fragment_once(h, w, l, prof, p);
  const CoverSolution ch = cover_cost(h, p, copt);
  const CoverSolution cm = cover_cost(fo.minimal, p, copt);
  const CoverSolution cg = cover_cost(fo.large, p, copt);
  const CoverSolution cs = cover_cost(fo.small, p, copt);
  if (!(ch.optimal && cm.optimal && cg.optimal && cs.optimal))
    throw std::runtime_error("induction_step_check: cover search exhausted its budget");

  StepReport rep;
  rep.f_h = ch.cost;
  rep.f_minimal = cm.cost;
  rep.f_large = cg.cost;
  rep.f_small = cs.cost;
  rep.l1 = size_cut(prof.delta, l);
  rep.next_bound = prof.hypothesis_bound(rep.l1);
  rep.hypothesis_holds = ch.cost >= prof.hypothesis_bound(l) - 1e-12;

  // The certificate of H'_W's optimal cover, granted W, covers H directly.
  std::vector<Mask> lifted;
  lifted.reserve(cm.cover.size());
  for (Mask t : cm.cover.members) lifted.push_back(fo.restriction.lift(t));
  rep.lift_ok = covers(Family::of(h.ground, std::move(lifted)), h);

  rep.leg_subadd = cs.cost >= cm.cost - cg.cost - tol;
  rep.leg_lift = cm.cost >= ch.cost - tol;
  rep.leg_good = cg.cost <= fo.threshold + tol;
  rep.leg_next = ch.cost - fo.threshold >= rep.next_bound - tol;
  return rep;
}

Sum2Chain sum2_chain(const ConstantsProfile& prof, int l) {
  if (l < 0 || l > 63) throw std::invalid_argument("sum2_chain: l outside [0, 63]");
  Sum2Chain ch;
  const double base = prof.c * prof.L;
  const int cut = size_cut(prof.delta, l);
  double s = 0.0;
  for (int k = cut + 1; k <= l; ++k)
    s += std::pow(base, -k) * static_cast<double>(binom(l, k));
  ch.sum_value = s;
  ch.mid_bound = sum2_rhs_factor(prof, l);
  ch.final_bound = prof.dcl_bound_factor(l);
  ch.mid_holds = ch.sum_value <= ch.mid_bound;
  ch.final_holds = ch.mid_bound <= ch.final_bound;
  return ch;
}

bool recombination_holds(const ConstantsProfile& prof, Probability p, long long n,
                         int l) {
  if (l < 1) return true;  // no recursion below l = 1
  const long long w = guarded_floor(prof.c * prof.L * p.value() * static_cast<double>(n));
  if (w > n) return true;  // the step cannot run, nothing to recombine
  const int l1 = size_cut(prof.delta, l);
  return m_level(prof, p, n - w, l1) + w <= m_level(prof, p, n, l);
}

TheoremVerdict verify_covering_theorem(const Family& h, Probability p,
                                       const ConstantsProfile& prof, int l,
                                       const LevelOptions& lopt,
                                       const CoverOptions& copt, int exact_cap) {
  if (!is_l_bounded(h, l))
    throw std::invalid_argument("verify_covering_theorem: family is not l-bounded");
  (void)exact_cap;
  TheoremVerdict v;
  v.mode = prof.mode;
  v.l = l;
  const CoverSolution sol = cover_cost(h, p, copt);
  v.f_value = sol.cost;
  v.certified = sol.optimal;
  // bell states its assumption at the top level as strict f(H) > 1/2; the
  // other modes carry the inductive bound.
  v.hypothesis_holds = prof.mode == Mode::bell
                           ? sol.cost > 0.5
                           : sol.cost >= prof.hypothesis_bound(l) - 1e-12;
  v.target_fraction = prof.target_fraction(l);
  const int n = h.ground.size;
  v.m_l = m_level(prof, p, n, l);
  if (prof.mode == Mode::bell && l == prof.bell_base) v.note = "external base (Bell)";

  if (v.m_l >= n) {
    v.degenerate = true;
    v.achieved_fraction = h.empty() ? 0.0 : 1.0;
    v.pass = !h.empty();
    if (!v.note.empty()) v.note += "; ";
    v.note += "degenerate: m_l >= N, conclusion reads at level N";
    return v;
  }
  const LevelStats st = level_stats(h, static_cast<int>(v.m_l), lopt);
  v.achieved_fraction = st.fraction;
  v.certified = v.certified && st.exact;
  v.pass = v.hypothesis_holds && v.achieved_fraction >= v.target_fraction - 1e-12;
  if (!v.hypothesis_holds) {
    if (!v.note.empty()) v.note += "; ";
    v.note += "hypothesis not met";
  }
  return v;
}

FragmentationTrace run_induction(const Family& h, Probability p,
                                 const ConstantsProfile& prof, int l, int depth_cap,
                                 const Sampling& sampling, int exact_cap,
                                 const CoverOptions& copt, std::size_t record_cap) {
  if (depth_cap < 1) throw std::invalid_argument("run_induction: depth_cap < 1");
  if (!is_l_bounded(h, l))
    throw std::invalid_argument("run_induction: family is not l-bounded");

  FragmentationTrace trace;
  trace.family = h;
  trace.p = p.value();
  trace.profile = prof;
  trace.l = l;
  trace.depth_cap = depth_cap;
  trace.sampling = sampling;
  trace.exact_cap = exact_cap;
  trace.node_budget = copt.node_budget;
  trace.record_cap = record_cap;

  struct Builder {
    const ConstantsProfile& prof;
    Probability p;
    const Sampling& sampling;
    int exact_cap;
    const CoverOptions& copt;
    std::size_t record_cap;
    int depth_cap;

    std::unique_ptr<TraceNode> build(const Family& fam, int l, int depth,
                                     std::vector<int> to_root) {
      auto node = std::make_unique<TraceNode>();
      node->ground_size = fam.ground.size;
      node->l = l;
      node->family = fam;
      node->to_root = std::move(to_root);
      const CoverSolution sol = cover_cost(fam, p, copt);
      node->f_value = sol.cost;
      node->f_certified = sol.optimal;
      node->hypothesis_bound = prof.hypothesis_bound(l);
      node->hypothesis_holds = sol.cost >= node->hypothesis_bound - 1e-12;

      if (l <= prof.base_level()) {
        node->status = "base";
        return node;
      }
      const int n = fam.ground.size;
      const int w = grant_size(prof, p, n);
      node->w = w;
      if (w == 0) {
        node->status = "stuck";
        node->stuck_reason = "w = 0, the lemma grants nothing";
        return node;
      }
      if (w > n) {
        node->status = "stuck";
        node->stuck_reason = "w exceeds the ground size";
        return node;
      }

      Sampling node_sampling = sampling;
      node_sampling.seed = sampling.seed + static_cast<std::uint64_t>(depth);
      const ScanResult scan =
          scan_w(fam, w, l, prof, p, node_sampling, exact_cap, record_cap);
      node->total_w = scan.total_w;
      node->records = scan.records;
      node->records_truncated = scan.truncated;

      if (scan.mu_available) {
        DclReport dcl;
        dcl.w = w;
        dcl.lhs = scan.mu_sum;
        dcl.sigma_sum = scan.sigma_sum;
        dcl.rhs = static_cast<double>(scan.total_w) * prof.dcl_bound_factor(l);
        dcl.holds = dcl.lhs <= dcl.rhs;
        dcl.exhaustive = scan.exhaustive;
        dcl.evaluated = scan.evaluated;
        dcl.lhs_ci = scan.mu_sum_ci;
        const int cut = size_cut(prof.delta, l);
        double s2 = 0.0;
        for (int k = cut + 1; k <= l; ++k)
          s2 += static_cast<double>(binom(n, w + k)) *
                static_cast<double>(binom(l, k)) * pow_int(p.value(), k);
        dcl.sum2_lhs = s2;
        dcl.sum2_rhs = static_cast<double>(scan.total_w) * sum2_rhs_factor(prof, l);
        dcl.sum2_holds = dcl.sum2_lhs <= dcl.sum2_rhs;
        node->dcl = dcl;
      }
      {
        BadFractionReport bad;
        bad.w = w;
        bad.budget = prof.bad_budget(l);
        bad.exhaustive = scan.exhaustive;
        bad.evaluated = scan.evaluated;
        bad.fraction_bad = static_cast<double>(scan.bad_count) /
                           static_cast<double>(scan.evaluated);
        if (!scan.exhaustive)
          bad.ci = std::sqrt(bad.fraction_bad * (1.0 - bad.fraction_bad) /
                             static_cast<double>(scan.evaluated));
        bad.within_budget = bad.fraction_bad <= bad.budget;
        node->bad = bad;
      }

      // Lowest canonical good W among the evaluated ones.
      const std::optional<Mask> chosen = scan.lowest_good;
      if (!chosen) {
        node->status = "stuck";
        node->stuck_reason = "no good W among the evaluated sets";
        return node;
      }
      node->chosen_w = chosen;
      node->step = induction_step_check(fam, *chosen, l, prof, p, 1e-9, copt);

      if (depth >= depth_cap) {
        node->status = "depth_capped";
        return node;
      }
      const FragmentOutcome fo = fragment_once(fam, *chosen, l, prof, p);
      std::vector<int> child_to_root(fo.restriction.to_original.size());
      for (std::size_t i = 0; i < child_to_root.size(); ++i)
        child_to_root[i] = node->to_root[fo.restriction.to_original[i]];
      node->status = "recursed";
      node->child = build(fo.small, node->step->l1, depth + 1, std::move(child_to_root));
      return node;
    }
  };

  std::vector<int> identity(h.ground.size);
  for (int i = 0; i < h.ground.size; ++i) identity[i] = i;
  Builder builder{prof, p, sampling, exact_cap, copt, record_cap, depth_cap};
  trace.root = builder.build(h, l, 1, std::move(identity));
  return trace;
}

}  // namespace etlab
