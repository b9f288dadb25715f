#pragma once

#include <cstdint>

#include "etlab/family.hpp"

namespace etlab {

// Ground sets for the graph generators are the edges of K_n in lexicographic
// order: (0,1), (0,2), ..., (n-2,n-1).
int edge_count(int n);
int edge_index(int n, int i, int j);

// Edge sets of the (n-1)!/2 undirected Hamiltonian cycles of K_n, n >= 3.
// Each member has cardinality n over a ground set of C(n,2) edges.
Family hamiltonian_cycles(int n);

// Edge sets of all C(n,k) k-cliques of K_n, 2 <= k <= n; members have
// cardinality C(k,2).
Family cliques(int n, int k);

// Edge sets of the (n-1)!! perfect matchings of K_n, n even; members have
// cardinality n/2.
Family perfect_matchings(int n);

// `count` distinct nonempty sets over [0, ground), cardinalities uniform in
// [1, l], elements uniform without replacement. Deterministic per seed.
// Throws when count exceeds the number of available sets.
Family random_family(int ground, int l, int count, std::uint64_t seed);

}  // namespace etlab
