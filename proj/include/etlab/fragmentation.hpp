#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "etlab/cover.hpp"
#include "etlab/family.hpp"
#include "etlab/measures.hpp"

namespace etlab {

// Constant regimes for the fragmentation induction. main3 is the fixed-split
// regime (cut at 0.9 l, thresholds 2^-(l+2), w = floor(0.1 L p N)); main4 is
// the tuned regime (cut at delta l, thresholds (1+eps/3)^-l, c = log2(1/delta),
// eps = (L c)^delta / 2 - 1, recursion floor l0); bell reuses the main4
// machinery above an externally granted base level floor(1/eps1) - 1.
enum class Mode { main3, main4, bell };

const char* to_string(Mode m);
Mode mode_from_string(const std::string& s);

struct ConstantsProfile {
  Mode mode = Mode::main3;
  double L = 1000.0;
  double delta = 0.9;       // size cut: members larger than delta*l fragment away
  double c = 0.1;           // grant rate: w = floor(c L p N)
  double epsilon = 0.0;     // main4/bell only, in (0, 3)
  int l0 = 0;               // main4/bell recursion floor
  double epsilon1 = 0.0;    // bell only, in (0, 1/l0)
  int bell_base = 0;        // bell base level floor(1/eps1) - 1
  bool paper_ok = true;     // main3: whether L >= 1000 holds

  double good_threshold(int l) const;   // sigma_W at or below this is good
  double bad_budget(int l) const;       // certified share of bad W allowed
  double dcl_bound_factor(int l) const; // rhs of the lemma is C(N,w) * this
  int base_level() const;               // recursion stops at or below this
  double hypothesis_bound(int l) const; // inductive bound on f(H); bell's top-level
                                        // strict f > 1/2 is checked by verify
  double target_fraction(int l) const;  // conclusion: share of level m_l inside <H>
};

// g(delta) = 2^(1/delta) / log2(1/delta), the constant being minimized.
double cost_rate(double delta);

// Grid scan plus golden-section refinement of cost_rate over (0, 1).
struct OptimizedConstants {
  double L_star = 0.0;
  double delta_star = 0.0;
};
OptimizedConstants optimize_constants(int grid = 100000, double refine_tol = 1e-10);

// Least l0 with (1+eps/3)^(l0 - floor(delta*l0)) >= 2.
int min_l0(double epsilon, double delta);

// Builds and validates a profile. main3 ignores delta/epsilon1 and accepts
// any L > 0, recording paper_ok = (L >= 1000). main4/bell reject epsilon
// outside (0, 3); bell also requires epsilon1 in (0, 1/l0).
ConstantsProfile build_profile(Mode mode, double L, double delta = 0.5,
                               std::optional<double> epsilon1 = std::nullopt);

// m_l = floor(L p N log2(l+1)) plus the mode's additive term. N is a plain
// count here; values above the actual ground size flag a degenerate level.
long long m_level(const ConstantsProfile& prof, Probability p, long long n, int l);

// One fragmentation at a granted set W: restrict, take minimal sets, split
// off the members larger than delta*l, and price what was split off.
struct FragmentOutcome {
  Mask w_mask = 0;
  Restriction restriction;  // H_W over the compacted ground, with index map
  Family minimal;           // H'_W
  Family large;             // G_W: minimal members with |T| > delta*l
  Family small;             // H~_W = H'_W minus G_W, floor(delta*l)-bounded
  double sigma = 0.0;       // sum of p^|T| over large
  double threshold = 0.0;
  bool good = false;
};
FragmentOutcome fragment_once(const Family& h, Mask w, int l,
                              const ConstantsProfile& prof, Probability p);

// W enumeration policy for the lemma checks. Exhaustive mode errors out
// above the cap; sampling draws with replacement from the size-w levels.
struct Sampling {
  bool exhaustive = true;
  std::uint64_t exhaustive_cap = 1'000'000;
  std::uint64_t count = 10'000;
  std::uint64_t seed = 0;
};

// The double-counting lemma at one (H, l, p): lhs = sum over |W| = w of
// mu_p(<G_W>) against rhs = C(N,w) * dcl_bound_factor(l). sum2_* report the
// instance form of the counting chain, sum over delta*l < k <= l of
// C(N,w+k) C(l,k) p^k against C(N,w) (cL)^(-delta l) 2^(l+1) (main3; main4
// uses 2^l per its construction).
struct DclReport {
  int w = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
  double sigma_sum = 0.0;   // sum of sigma_W, the union-bound side of lhs
  double sum2_lhs = 0.0;
  double sum2_rhs = 0.0;
  bool sum2_holds = false;
  bool exhaustive = true;
  std::uint64_t evaluated = 0;
  double lhs_ci = 0.0;      // one standard error of lhs when sampled
  bool degenerate_w0 = false;
};
DclReport dcl_verify(const Family& h, int l, const ConstantsProfile& prof,
                     Probability p, const Sampling& sampling = {},
                     int exact_cap = kDefaultExactCap);

// Share of granted sets W that fragment badly, against the mode's budget.
struct BadFractionReport {
  int w = 0;
  double fraction_bad = 0.0;
  double budget = 0.0;
  bool within_budget = false;
  bool exhaustive = true;
  std::uint64_t evaluated = 0;
  double ci = 0.0;  // one standard error when sampled
};
BadFractionReport good_fraction(const Family& h, int l, const ConstantsProfile& prof,
                                Probability p, const Sampling& sampling = {});

// Numeric check of one induction step at a good W:
//   f(H~_W) >= f(H'_W) - f(G_W)        (subadditivity)
//   f(H'_W) >= f(H)                    (covers lift across the grant)
//   f(G_W) <= good_threshold(l)        (W is good)
// so f(H~_W) >= f(H) - threshold >= next hypothesis bound at l1 = floor(delta*l),
// the last leg only when f(H) clears its own hypothesis. Cover costs must be
// certified optimal; tol gives slack on each comparison.
struct StepReport {
  double f_h = 0.0;
  double f_minimal = 0.0;
  double f_large = 0.0;
  double f_small = 0.0;
  int l1 = 0;
  double next_bound = 0.0;
  bool lift_ok = false;       // certificate of H'_W's cover covers H directly
  bool leg_subadd = false;    // f_small >= f_minimal - f_large - tol
  bool leg_lift = false;      // f_minimal >= f_h - tol
  bool leg_good = false;      // f_large <= threshold + tol
  bool leg_next = false;      // f_h - threshold >= next_bound - tol
  bool hypothesis_holds = false;

  bool step_holds() const { return lift_ok && leg_subadd && leg_lift && leg_good; }
};
StepReport induction_step_check(const Family& h, Mask w, int l,
                                const ConstantsProfile& prof, Probability p,
                                double tol = 1e-9,
                                const CoverOptions& copt = {});

// Arithmetic (N-free) form of the counting chain for grid scans:
// sum over delta*l < k <= l of (cL)^(-k) C(l,k), its closed bound, and the
// final per-mode constant. main4's tail holds for every l by construction.
struct Sum2Chain {
  double sum_value = 0.0;
  double mid_bound = 0.0;
  double final_bound = 0.0;
  bool mid_holds = false;
  bool final_holds = false;
};
Sum2Chain sum2_chain(const ConstantsProfile& prof, int l);

// Arithmetic recombination check: m_{l1} on N - w elements plus the w
// granted elements never exceeds m_l on N elements.
bool recombination_holds(const ConstantsProfile& prof, Probability p, long long n, int l);

// Empirical verdict on the covering statement at one level: if f(H) clears
// the hypothesis bound then the m_l-th level of the cube lies in <H> with
// share at least target_fraction(l). m_l >= N is recorded as degenerate and
// passes for nonempty H (level N is the full ground set).
struct TheoremVerdict {
  Mode mode = Mode::main3;
  int l = 0;
  long long m_l = 0;
  double f_value = 0.0;
  bool hypothesis_holds = false;
  bool degenerate = false;
  double target_fraction = 0.0;
  double achieved_fraction = 0.0;
  bool pass = false;
  bool certified = true;  // false when the level share was sampled
  std::string note;
};
TheoremVerdict verify_covering_theorem(const Family& h, Probability p,
                                       const ConstantsProfile& prof, int l,
                                       const LevelOptions& lopt = {},
                                       const CoverOptions& copt = {},
                                       int exact_cap = kDefaultExactCap);

// One node of the recorded induction: the full W scan summary, the lemma
// verdicts, the chosen good W (lowest canonical), and the child problem.
struct WRecord {
  Mask w_mask = 0;
  double sigma = 0.0;
  bool good = false;
  int large_size = 0;
  std::optional<double> mu;  // mu_p(<G_W>), present when exactly computable
};

struct TraceNode {
  int ground_size = 0;
  int l = 0;
  Family family;
  std::vector<int> to_root;  // element translation into root coordinates
  double f_value = 0.0;
  bool f_certified = true;
  double hypothesis_bound = 0.0;
  bool hypothesis_holds = false;
  std::string status;        // "recursed", "base", "stuck", "depth_capped"
  std::string stuck_reason;
  int w = 0;
  std::uint64_t total_w = 0;
  std::vector<WRecord> records;
  bool records_truncated = false;
  std::optional<DclReport> dcl;
  std::optional<BadFractionReport> bad;
  std::optional<Mask> chosen_w;
  std::optional<StepReport> step;
  std::unique_ptr<TraceNode> child;
};

struct FragmentationTrace {
  Family family;
  double p = 0.0;
  ConstantsProfile profile;
  int l = 0;
  int depth_cap = 0;
  Sampling sampling;
  int exact_cap = 0;
  std::uint64_t node_budget = 0;
  std::uint64_t record_cap = 0;
  std::unique_ptr<TraceNode> root;
};

// Runs the induction: per node scan all (or sampled) W of size w, record the
// lemma checks, recurse into (X minus W, H~_W, l1) at the lowest canonical
// good W. Stops at the mode's base level, at depth_cap, or stuck (w = 0,
// w > N, or no good W); never fabricates a good W.
FragmentationTrace run_induction(const Family& h, Probability p,
                                 const ConstantsProfile& prof, int l,
                                 int depth_cap = 8, const Sampling& sampling = {},
                                 int exact_cap = kDefaultExactCap,
                                 const CoverOptions& copt = {},
                                 std::size_t record_cap = 10'000);

}  // namespace etlab
