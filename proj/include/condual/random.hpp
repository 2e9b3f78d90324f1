#pragma once

// Seeded source for probes and random instances. Draws are reduced modulo
// the range directly from mt19937_64 so a seed reproduces the same stream
// on every standard library.

#include "condual/rational.hpp"

#include <cstdint>
#include <random>

namespace condual {

class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform-ish draw from [0, n). n must be positive.
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }

  /// Integer in [lo, hi].
  long between(long lo, long hi) { return lo + static_cast<long>(below(static_cast<std::size_t>(hi - lo + 1))); }

  bool coin() { return below(2) == 0; }

  /// num/den with |num| ≤ span·den and den in [1, 4].
  Rational rational(long span = 4) {
    const long den = between(1, 4);
    return Rational(between(-span * den, span * den), den);
  }

  Rational positive(long span = 4) {
    const long den = between(1, 4);
    return Rational(between(1, span * den), den);
  }

  VectorQ vector(Index n, long span = 4) {
    VectorQ v(n);
    for (Index i = 0; i < n; ++i) v(i) = rational(span);
    return v;
  }

  /// Vector with entries bounded by a rational box half-width.
  VectorQ vector(Index n, const Rational& half_width) {
    VectorQ v(n);
    for (Index i = 0; i < n; ++i) v(i) = half_width * Rational(between(-8, 8), 8);
    return v;
  }

  std::mt19937_64& engine() { return engine_; }

private:
  std::mt19937_64 engine_;
};

}  // namespace condual
