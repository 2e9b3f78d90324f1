#pragma once

// Fixtures and independent oracles for the test suites. The oracles avoid
// the library's LP code: membership goes through Caratheodory subsets and a
// hand-written Gaussian elimination, conditional expectations through plain
// loops.

#include "condual/conditional_set.hpp"
#include "condual/space.hpp"

#include <memory>
#include <optional>
#include <vector>

namespace condual::testing {

/// Four equally likely outcomes, atoms {w1,w2} and {w3,w4}.
inline SpacePtr space4() {
  return std::make_shared<const FiniteSpace>(FiniteSpace::uniform(4, {{0, 1}, {2, 3}}));
}

inline RandomVariable rv(std::initializer_list<Rational> values) { return make_vector(values); }

inline Rational oracle_cond_exp(const RandomVariable& x, const FiniteSpace& space, std::size_t a) {
  Rational mass(0), sum(0);
  for (Index w : space.atom(a)) {
    mass += space.probabilities()(w);
    sum += space.probabilities()(w) * x(w);
  }
  return sum / mass;
}

inline Rational dot(const VectorQ& a, const VectorQ& b, const VectorQ& weights) {
  Rational s(0);
  for (Index i = 0; i < a.size(); ++i) s += weights(i) * a(i) * b(i);
  return s;
}

/// Solves A λ = b exactly when A has full column rank. Returns nullopt if the
/// columns are dependent or the system is inconsistent.
inline std::optional<VectorQ> solve_full_rank(MatrixQ a, VectorQ b) {
  const Index m = a.rows(), n = a.cols();
  Index row = 0;
  std::vector<Index> pivots;
  for (Index col = 0; col < n; ++col) {
    Index p = row;
    while (p < m && a(p, col) == 0) ++p;
    if (p == m) return std::nullopt;
    a.row(p).swap(a.row(row));
    std::swap(b(p), b(row));
    for (Index i = 0; i < m; ++i) {
      if (i == row || a(i, col) == 0) continue;
      const Rational f = a(i, col) / a(row, col);
      a.row(i) -= f * a.row(row);
      b(i) -= f * b(row);
    }
    pivots.push_back(row);
    ++row;
  }
  for (Index i = row; i < m; ++i)
    if (b(i) != 0) return std::nullopt;
  VectorQ x(n);
  for (Index col = 0; col < n; ++col) x(col) = b(pivots[static_cast<std::size_t>(col)]) / a(pivots[static_cast<std::size_t>(col)], col);
  return x;
}

/// x ∈ conv(vertices) + cone(rays) by conic Caratheodory: [x;1] must be a
/// nonnegative combination of linearly independent columns [v;1], [r;0].
inline bool oracle_in_hull(const VectorQ& x, const std::vector<VectorQ>& vertices, const std::vector<VectorQ>& rays) {
  const Index d = x.size();
  std::vector<VectorQ> columns;
  for (const auto& v : vertices) {
    VectorQ c(d + 1);
    c.head(d) = v;
    c(d) = 1;
    columns.push_back(c);
  }
  for (const auto& r : rays) {
    VectorQ c(d + 1);
    c.head(d) = r;
    c(d) = 0;
    columns.push_back(c);
  }
  VectorQ target(d + 1);
  target.head(d) = x;
  target(d) = 1;
  const std::size_t k = columns.size();
  for (std::size_t mask = 1; mask < (std::size_t{1} << k); ++mask) {
    std::vector<std::size_t> chosen;
    for (std::size_t i = 0; i < k; ++i)
      if (mask & (std::size_t{1} << i)) chosen.push_back(i);
    if (static_cast<Index>(chosen.size()) > d + 1) continue;
    MatrixQ a(d + 1, static_cast<Index>(chosen.size()));
    for (std::size_t j = 0; j < chosen.size(); ++j) a.col(static_cast<Index>(j)) = columns[chosen[j]];
    const auto lambda = solve_full_rank(a, target);
    if (lambda && (lambda->array() >= Rational(0)).all()) return true;
  }
  return false;
}

/// Membership of a generator-form set, atom by atom, through the oracle.
inline bool oracle_member(const ConditionalSet& set, const RandomVariable& x) {
  const auto& space = set.space();
  for (std::size_t a = 0; a < space.atom_count(); ++a) {
    const auto& g = set.generators()[a];
    if (g.full) continue;
    const VectorQ local = space.restrict(x, a);
    if (!g.convex) {
      bool hit = false;
      for (const auto& v : g.vertices) hit = hit || v == local;
      if (!hit) return false;
    } else if (!oracle_in_hull(local, g.vertices, g.rays)) {
      return false;
    }
  }
  return true;
}

inline bool oracle_holds(const Rational& lhs, const LocalHalfSpace& h) {
  return h.strict ? lhs < h.level : lhs <= h.level;
}

/// Membership of a half-space-form set by direct pairing evaluation.
inline bool oracle_member_h(const ConditionalSet& set, const RandomVariable& x) {
  const auto& space = set.space();
  for (const auto& h : set.halfspaces()) {
    for (std::size_t a = 0; a < space.atom_count(); ++a) {
      if (!h.level[a].finite()) continue;
      Rational s(0);
      for (Index w : space.atom(a)) s += space.probabilities()(w) * x(w) * h.density(w);
      s /= space.atom_probability(a);
      if (!oracle_holds(s, {VectorQ(), h.level[a].value(), h.strict})) return false;
    }
  }
  return true;
}

}  // namespace condual::testing
