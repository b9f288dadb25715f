#pragma once

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <stdexcept>

namespace etlab {

// Exact binomial coefficient. Zero outside 0 <= k <= n. Safe for n <= 63,
// which is all the ground-set code ever asks for; larger n throws rather
// than silently overflowing.
inline std::uint64_t binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  if (n > 63) throw std::invalid_argument("binom: n > 63");
  if (k > n - k) k = n - k;
  unsigned __int128 acc = 1;
  for (int i = 1; i <= k; ++i) {
    acc = acc * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
  }
  return static_cast<std::uint64_t>(acc);
}

// p^e by plain repeated multiply: deterministic across platforms, exponents
// here never exceed the ground-set size.
inline double pow_int(double base, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

// Pairwise (cascade) summation of term(i) for i in [lo, hi). Keeps the
// rounding error logarithmic in the term count so exact-identity tests can
// use 1e-12 windows.
template <class F>
double pairwise_sum(std::uint64_t lo, std::uint64_t hi, F&& term) {
  const std::uint64_t n = hi - lo;
  if (n == 0) return 0.0;
  if (n <= 256) {
    double s = 0.0;
    for (std::uint64_t i = lo; i < hi; ++i) s += term(i);
    return s;
  }
  const std::uint64_t mid = lo + n / 2;
  return pairwise_sum(lo, mid, term) + pairwise_sum(mid, hi, term);
}

// Unbiased uniform draw from [0, n) via Lemire rejection. Implementations of
// std::uniform_int_distribution differ across standard libraries, so seeded
// runs would not be reproducible through it.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_below: n == 0");
  unsigned __int128 m = static_cast<unsigned __int128>(rng()) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(rng()) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

// Round to 12 significant digits for report output. Trace files skip this;
// they need full round-trip precision.
inline double round_sig12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::strtod(buf, nullptr);
}

}  // namespace etlab
