// Acceptance gate: one pass/fail line per criterion, exit 0 only if all pass.
// Tolerances are pinned here, next to the check that uses them.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "etlab/cover.hpp"
#include "etlab/family.hpp"
#include "etlab/fragmentation.hpp"
#include "etlab/generators.hpp"
#include "etlab/json_io.hpp"
#include "etlab/measures.hpp"
#include "etlab/numeric.hpp"
#include "oracles.hpp"

using namespace etlab;

namespace {

struct check_failure {
  std::string what;
};

void expect(bool cond, const std::string& what) {
  if (!cond) throw check_failure{what};
}

int failures = 0;

template <class F>
void run(int index, const char* name, F&& body) {
  const auto t0 = std::chrono::steady_clock::now();
  std::string detail;
  bool ok = true;
  try {
    detail = body();
  } catch (const check_failure& f) {
    ok = false;
    detail = f.what;
  } catch (const std::exception& e) {
    ok = false;
    detail = std::string("unexpected exception: ") + e.what();
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("[%s] %2d. %-22s (%6.2fs) %s\n", ok ? "PASS" : "FAIL", index, name,
              secs, detail.c_str());
  if (!ok) ++failures;
}

Family fam(int n, std::vector<Mask> sets) { return Family::of(GroundSet{n}, std::move(sets)); }

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// All generator families on up to five vertices.
std::vector<Family> small_generator_families() {
  std::vector<Family> out;
  for (int n = 3; n <= 5; ++n) out.push_back(hamiltonian_cycles(n));
  for (int n = 3; n <= 5; ++n)
    for (int k = 2; k <= n; ++k) out.push_back(cliques(n, k));
  out.push_back(perfect_matchings(2));
  out.push_back(perfect_matchings(4));
  return out;
}

// Exhaustive double-counting check on one instance: the lemma bound, the
// counting chain, and the per-W union-bound ordering sigma_W >= mu(<G_W>).
void check_dcl_instance(const Family& h, int l, const ConstantsProfile& prof,
                        double pv, const char* tag) {
  const Probability p(pv);
  const DclReport rep = dcl_verify(h, l, prof, p);
  const std::string where = std::string(" [") + tag + "]";
  expect(rep.exhaustive, "dcl scan fell back to sampling" + where);
  expect(rep.w >= 1, "grant size w vanished" + where);
  expect(rep.holds, "dcl bound violated" + where);
  expect(rep.sum2_holds, "counting chain violated" + where);
  expect(rep.lhs <= rep.sigma_sum + 1e-12, "union bound out of order" + where);
  const int n = h.ground.size;
  for (Mask wm = (Mask(1) << rep.w) - 1; wm < (Mask(1) << n);) {
    const FragmentOutcome fo = fragment_once(h, wm, l, prof, p);
    const double mu = fo.large.empty() ? 0.0 : mu_upset_exact(fo.large, p);
    expect(fo.sigma >= mu - 1e-12, "sigma_W below mu(<G_W>)" + where);
    const Mask r = wm & (0 - wm);
    const Mask c = wm + r;
    wm = c | (((wm ^ c) >> 2) / r);
  }
}

std::string criterion_constants() {
  const auto t0 = std::chrono::steady_clock::now();
  const OptimizedConstants oc = optimize_constants(100000);
  expect(oc.L_star > 3.997 && oc.L_star < 3.999,
         "L* outside [3.997, 3.999]: " + std::to_string(oc.L_star));
  expect(cost_rate(0.5) == 4.0, "g(1/2) must be exactly 4");
  const double secs = seconds_since(t0);
  expect(secs < 1.0, "optimizer too slow: " + std::to_string(secs) + "s");
  std::ostringstream os;
  os << "L* = " << oc.L_star << " at delta = " << oc.delta_star << ", g(1/2) = 4 exact";
  return os.str();
}

std::string criterion_sandwich() {
  const auto t0 = std::chrono::steady_clock::now();
  const double slack = 10.0 * kDefaultTol;
  std::mt19937_64 rng(20260816);
  int families = 0;
  auto check = [&](const Family& f) {
    const ThresholdReport rep = full_thresholds(f);
    expect(rep.p_e.defined() && rep.q.defined() && rep.p_c.defined(),
           "threshold undefined on a nonempty family");
    expect(rep.p_e.value <= rep.q.value + slack, "p_E > q");
    expect(rep.q.value <= rep.p_c.value + slack, "q > p_c");
    ++families;
  };
  for (int i = 0; i < 200; ++i) check(oracle::random_instance(rng, 12, 5, 8));
  int generated = 0;
  for (const Family& f : small_generator_families()) {
    check(f);
    ++generated;
  }
  const double secs = seconds_since(t0);
  expect(secs < 300.0, "sandwich suite too slow");
  std::ostringstream os;
  os << families - generated << " random + " << generated
     << " generator families, slack " << slack << ", 0 violations";
  return os.str();
}

std::string criterion_cover_oracle() {
  std::mt19937_64 rng(3);
  const double ps[] = {0.1, 0.25, 0.4, 0.55, 0.7, 0.85};
  for (int i = 0; i < 500; ++i) {
    const Family h = oracle::random_instance(rng, 10, 4, 6);
    const Probability p(ps[rng() % 6]);
    const CoverSolution fast = cover_cost(h, p);
    const CoverSolution slow = cover_bruteforce(h, p);
    expect(fast.optimal && slow.optimal, "search gave up inside the budget");
    expect(std::abs(fast.cost - slow.cost) <= 1e-12, "cost mismatch vs oracle");
    expect(covers(fast.cover, h), "certificate is not a cover");
    expect(std::abs(fast.cost - expectation(fast.cover, p)) <= 1e-12,
           "certificate cost disagrees with its expectation");
  }
  return "500 instances, exact cost match to 1e-12, certificates valid";
}

std::string criterion_q_duality() {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 50; ++i) {
    const Family f = oracle::random_instance(rng, 8, 3, 5);
    const QValue qv = q_value(f);
    expect(qv.q.defined(), "q undefined on a nonempty family");
    const double reference = oracle::q_max_over_covers(f);
    expect(std::abs(qv.q.value - reference) <= 1e-9,
           "bisection q differs from the max over enumerated covers");
    expect(covers(qv.witness.cover, f), "q witness is not a cover");
  }
  return "50 instances, root of f = 1/2 equals max cover p_E to 1e-9";
}

std::string criterion_level_monotonicity() {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    const Family f = oracle::random_instance(rng, 12, 5, 8);
    const int n = f.ground.size;
    const std::vector<std::uint64_t> table = up_closure_table(f);
    std::vector<std::uint64_t> hits(n + 1, 0);
    for (Mask m = 0; m < (Mask(1) << n); ++m)
      if (table_bit(table, m)) ++hits[set_size(m)];
    for (int t = 0; t + 1 <= n; ++t) {
      const unsigned __int128 lhs =
          static_cast<unsigned __int128>(hits[t]) * binom(n, t + 1);
      const unsigned __int128 rhs =
          static_cast<unsigned __int128>(hits[t + 1]) * binom(n, t);
      expect(lhs <= rhs, "level density dropped between levels " +
                             std::to_string(t) + " and " + std::to_string(t + 1));
    }
  }
  return "100 families, c_t nondecreasing by exact cross-multiplication";
}

std::string criterion_level_decomposition() {
  std::mt19937_64 rng(6);
  for (int i = 0; i < 100; ++i) {
    const Family f = oracle::random_instance(rng, 12, 5, 8);
    for (double pv : {0.08, 0.3, 0.5, 0.72, 0.96}) {
      const Probability p(pv);
      expect(std::abs(mu_by_levels(f, p) - mu_upset_exact(f, p)) <= 1e-12,
             "level decomposition drifted from direct enumeration");
    }
  }
  return "100 families x 5 biases, identity to 1e-12";
}

std::string criterion_double_counting() {
  const ConstantsProfile m3 = build_profile(Mode::main3, 1000.0);
  const ConstantsProfile m4a = build_profile(Mode::main4, 4.2, 0.5);
  const ConstantsProfile m4b = build_profile(Mode::main4, 60.0, 0.5);
  expect(m3.paper_ok && m4a.paper_ok && m4b.paper_ok, "profile not paper-valid");

  const Family pairs8 = fam(8, {0b0011, 0b1100});
  const Family triangle6 = fam(6, {0b011, 0b101, 0b110});
  const Family singles8 = fam(8, {0b0001, 0b0010, 0b0100, 0b1000});
  const Family pairs10 = fam(10, {0b0000000011, 0b0000001100});
  check_dcl_instance(pairs8, 2, m3, 0.005, "pairs/main3");      // w = 4
  check_dcl_instance(triangle6, 2, m3, 0.004, "triangle/main3");  // w = 2
  check_dcl_instance(singles8, 1, m3, 0.003, "singles/main3");  // w = 2
  check_dcl_instance(pairs10, 2, m4a, 0.05, "pairs/main4-tuned");   // w = 2
  check_dcl_instance(triangle6, 2, m4b, 0.01, "triangle/main4-wide");  // w = 3

  // seeded fuzz at paper constants; p is placed so the grant w comes out at
  // the requested integer
  std::mt19937_64 rng(7);
  for (int i = 0; i < 25; ++i) {
    const Family h = oracle::random_instance(rng, 8, 3, 6);
    const int n = h.ground.size;
    const int w_target = 1 + static_cast<int>(rng() % std::min(3, n - 1));
    const double p = (w_target + 0.5) / (100.0 * n);
    check_dcl_instance(h, h.bound_l, m3, p, "fuzz");
  }

  // the purely arithmetic counting chain across the level grid
  const auto t0 = std::chrono::steady_clock::now();
  const ConstantsProfile m3w = build_profile(Mode::main3, 2000.0);
  for (int l = 1; l <= 20; ++l) {
    expect(sum2_chain(m3, l).mid_holds, "chain middle failed at L=1000");
    expect(sum2_chain(m3w, l).mid_holds, "chain middle failed at L=2000");
    expect(sum2_chain(m3, l).final_holds == (l >= 5),
           "L=1000 final-step boundary moved from l = 5");
    expect(sum2_chain(m3w, l).final_holds == (l >= 3),
           "L=2000 final-step boundary moved from l = 3");
    const Sum2Chain c4 = sum2_chain(m4a, l);
    expect(c4.mid_holds && c4.final_holds, "tuned-mode chain failed");
  }
  const double secs = seconds_since(t0);
  expect(secs < 1.0, "arithmetic chain scan too slow");
  return "5 pinned + 25 fuzzed instances hold; chain final step from l = 5 "
         "(L=1000) / l = 3 (L=2000), all l in tuned mode";
}

std::string criterion_recombination() {
  const ConstantsProfile m3 = build_profile(Mode::main3, 1000.0);
  const ConstantsProfile m4 = build_profile(Mode::main4, 4.2, 0.5);
  long long checked = 0;
  for (int n = 1; n <= 30; ++n)
    for (int l = 1; l <= 20; ++l)
      for (int i = 1; i <= 999; ++i) {
        const Probability p(0.001 * i);
        expect(recombination_holds(m3, p, n, l), "m_l1 + w > m_l (fixed mode)");
        expect(recombination_holds(m4, p, n, l), "m_l1 + w > m_l (tuned mode)");
        checked += 2;
      }
  return std::to_string(checked) + " grid points, 0 violations";
}

std::string criterion_hamiltonian() {
  std::ostringstream os;
  os.precision(10);
  for (int n = 4; n <= 6; ++n) {
    const Family f = hamiltonian_cycles(n);
    const RootResult r = p_expectation(f);
    expect(r.defined(), "p_E undefined for a cycle family");
    double fact = 1.0;
    for (int i = 2; i < n; ++i) fact *= i;  // (n-1)!
    const double closed = std::pow(1.0 / fact, 1.0 / n);
    expect(std::abs(r.value - closed) <= 1e-9, "p_E differs from closed form");
    const double scaled = r.value * n;
    expect(scaled >= 2.3 && scaled <= 3.4, "p_E * n left the expected window");
    os << (n > 4 ? ", " : "") << "n=" << n << ": " << scaled;
  }
  return "p_E matches ((n-1)!)^(-1/n) to 1e-9; p_E * n = " + os.str();
}

std::string criterion_trace_roundtrip() {
  const Family triangle = fam(4, {0b0011, 0b0101, 0b0110});
  const Family pairs = fam(4, {0b0011, 0b1100});
  const Family triangle6 = fam(6, {0b011, 0b101, 0b110});
  const ConstantsProfile small3 = build_profile(Mode::main3, 10.0);
  const ConstantsProfile wide4 = build_profile(Mode::main4, 60.0, 0.5);

  auto roundtrip = [&](const FragmentationTrace& tr, const char* tag) {
    const RecheckResult rr = recheck_trace(trace_to_json(tr));
    expect(rr.match, std::string("trace diverged on recheck [") + tag + "]: " + rr.detail);
  };
  roundtrip(run_induction(triangle, Probability(0.4), small3, 2), "chain");
  roundtrip(run_induction(pairs, Probability(0.4), small3, 2), "stuck");
  roundtrip(run_induction(triangle6, Probability(0.01), wide4, 2, 2), "tuned");
  Sampling sampled;
  sampled.exhaustive = false;
  sampled.count = 400;
  sampled.seed = 5;
  roundtrip(run_induction(triangle, Probability(0.4), small3, 2, 8, sampled), "sampled");

  // sampled estimates sit within three standard errors of exhaustive truth
  const Family h10 = fam(10, {0b0000000011, 0b0000000101, 0b0000011000});
  const Probability p(0.3);
  const DclReport exact = dcl_verify(h10, 2, small3, p);  // w = 3, C(10,3) = 120
  expect(exact.exhaustive && exact.w == 3, "calibration instance changed shape");
  Sampling s;
  s.exhaustive = false;
  s.count = 4000;
  s.seed = 11;
  const DclReport est = dcl_verify(h10, 2, small3, p, s);
  expect(!est.exhaustive && est.lhs_ci > 0.0, "sampled dcl lost its error bar");
  expect(std::abs(est.lhs - exact.lhs) <= 3.0 * est.lhs_ci,
         "sampled dcl lhs outside 3 standard errors");
  const BadFractionReport bex = good_fraction(h10, 2, small3, p);
  const BadFractionReport bes = good_fraction(h10, 2, small3, p, s);
  expect(std::abs(bes.fraction_bad - bex.fraction_bad) <= 3.0 * bes.ci + 1e-12,
         "sampled bad fraction outside 3 standard errors");

  const LevelStats lex = level_stats(h10, 5);
  expect(lex.exact, "level census should be exact at C(10,5)");
  expect(lex.hits == 136 && lex.total == 252, "level census count moved");
  LevelOptions lopt;
  lopt.enumeration_cap = 1;  // force sampling
  lopt.samples = 40000;
  lopt.seed = 17;
  const LevelStats lsm = level_stats(h10, 5, lopt);
  expect(!lsm.exact, "sampler did not engage");
  expect(std::abs(lsm.fraction - lex.fraction) <= 3.0 * lsm.ci_halfwidth,
         "sampled level fraction outside 3 standard errors");
  return "4 traces re-verify byte for byte; dcl, bad fraction and level census "
         "agree within 3 standard errors";
}

}  // namespace

int main() {
  run(1, "constant-optimizer", criterion_constants);
  run(2, "threshold-sandwich", criterion_sandwich);
  run(3, "cover-oracle", criterion_cover_oracle);
  run(4, "q-duality", criterion_q_duality);
  run(5, "level-monotonicity", criterion_level_monotonicity);
  run(6, "level-decomposition", criterion_level_decomposition);
  run(7, "double-counting", criterion_double_counting);
  run(8, "level-recombination", criterion_recombination);
  run(9, "hamiltonian-threshold", criterion_hamiltonian);
  run(10, "trace-reproducibility", criterion_trace_roundtrip);
  if (failures == 0) {
    std::printf("acceptance: all 10 criteria passed\n");
    return 0;
  }
  std::printf("acceptance: %d of 10 criteria FAILED\n", failures);
  return 1;
}
