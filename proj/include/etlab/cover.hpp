#pragma once

#include <cstdint>

#include "etlab/family.hpp"
#include "etlab/measures.hpp"

namespace etlab {

// A cover of H is a family G such that every member of H contains some
// member of G; its weight at p is E_p(|G|). cover_cost minimizes that weight
// over all covers. Candidates are restricted to subsets of members of H,
// which loses nothing: any cover element that covers anything has a subset
// inside some member doing the same job at most as expensively.
struct CoverSolution {
  Family cover;  // canonical certificate, over H's ground set
  double cost = 0.0;
  bool optimal = true;  // false only when the node budget ran out
  std::uint64_t nodes_explored = 0;
};

struct CoverOptions {
  std::uint64_t node_budget = 10'000'000;
};

// Exact best-first branch and bound over coverage states. Branches on the
// first uncovered member in canonical order, over its subsets in decreasing
// cardinality; the plateau of cost ties is searched fully so that among
// optimal covers the lexicographically smallest canonical family is
// returned. Empty H costs 0; a member equal to the empty set forces cost 1.
CoverSolution cover_cost(const Family& h, Probability p, const CoverOptions& opt = {});

// Independent oracle: shortest-path dynamic program over all 2^|H| coverage
// states. Requires |H| <= 16 and at most 2^20 distinct candidate subsets.
CoverSolution cover_bruteforce(const Family& h, Probability p);

// Does g cover h? Certificate check used by tests and the induction step.
bool covers(const Family& g, const Family& h);

// q(F): the root of cover_cost(F, p) = 1/2 in p, with the optimal cover at
// the root as witness. By LP-free duality this equals the largest p_E(G)
// over covers G of F.
struct QValue {
  RootResult q;
  CoverSolution witness;
};
QValue q_value(const Family& f, double tol = kDefaultTol, const CoverOptions& opt = {});

// Random bipartition H = H1 (+) H2 by a seeded coin; checks
// f(H) <= f(H1) + f(H2) + 1e-12.
bool subadditivity_check(const Family& h, std::uint64_t split_seed, Probability p);

// All three thresholds of Eq-style sandwich p_E <= q <= p_c.
ThresholdReport full_thresholds(const Family& f, double tol = kDefaultTol,
                                int exact_cap = kDefaultExactCap,
                                const CoverOptions& opt = {});

}  // namespace etlab
