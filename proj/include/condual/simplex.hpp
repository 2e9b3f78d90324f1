#pragma once

// Two-phase primal simplex over an exact ordered field, with Bland's rule.
//
// Header-only and templated on the scalar so the same solver runs on
// Rational in the engine and on any exact field in tests. The solver is
// meant for desk-scale programs (tens of variables); it keeps a dense
// tableau.

#include "condual/rational.hpp"

#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

namespace condual::lp {

enum class Relation { LessEqual, Equal, GreaterEqual };
enum class Sense { Maximize, Minimize };

template <typename Scalar>
struct Constraint {
  Vector<Scalar> row;
  Relation relation = Relation::LessEqual;
  Scalar rhs{0};
};

/// max/min objective·x subject to the listed rows. Variables are free unless
/// flagged in `nonnegative` (an empty flag vector means all free).
template <typename Scalar>
struct LinearProgram {
  Sense sense = Sense::Maximize;
  Vector<Scalar> objective;
  std::vector<Constraint<Scalar>> constraints;
  std::vector<bool> nonnegative;

  LinearProgram() = default;
  LinearProgram(Sense s, Vector<Scalar> c) : sense(s), objective(std::move(c)) {}

  Index dimension() const { return objective.size(); }

  void add(Vector<Scalar> row, Relation relation, Scalar rhs) {
    constraints.push_back({std::move(row), relation, std::move(rhs)});
  }

  bool is_nonnegative(Index j) const {
    return !nonnegative.empty() && nonnegative[static_cast<std::size_t>(j)];
  }

  /// Throws std::invalid_argument when rows disagree with the objective's
  /// dimension or the sign flags have the wrong length.
  void validate() const {
    if (!nonnegative.empty() && static_cast<Index>(nonnegative.size()) != dimension())
      throw std::invalid_argument("malformed program: sign flags do not match dimension");
    for (std::size_t i = 0; i < constraints.size(); ++i)
      if (constraints[i].row.size() != dimension())
        throw std::invalid_argument("malformed program: row " + std::to_string(i) +
                                    " has dimension " + std::to_string(constraints[i].row.size()) +
                                    ", expected " + std::to_string(dimension()));
  }
};

/// Optimal point with dual multipliers. Duals refer to the maximization form
/// of the program (objective negated for Minimize): y_i ≥ 0 on ≤ rows, y_i ≤ 0
/// on ≥ rows, Aᵀy = c on free variables, Aᵀy ≥ c on nonnegative ones, and
/// b·y equals the maximization-form optimum.
template <typename Scalar>
struct Optimal {
  Vector<Scalar> point;
  Scalar value;
  Vector<Scalar> duals;
};

/// A feasible point and a ray along which the objective improves without
/// bound.
template <typename Scalar>
struct Unbounded {
  Vector<Scalar> point;
  Vector<Scalar> ray;
};

struct Infeasible {};

template <typename Scalar>
using Outcome = std::variant<Optimal<Scalar>, Unbounded<Scalar>, Infeasible>;

namespace detail {

template <typename Scalar>
class Tableau {
public:
  Tableau(Matrix<Scalar> body, std::vector<Index> basis)
      : t_(std::move(body)), basis_(std::move(basis)) {}

  Index rows() const { return t_.rows(); }
  Index cols() const { return t_.cols() - 1; }
  const std::vector<Index>& basis() const { return basis_; }
  const Scalar& at(Index i, Index j) const { return t_(i, j); }
  const Scalar& rhs(Index i) const { return t_(i, t_.cols() - 1); }

  Vector<Scalar> reduced_costs(const Vector<Scalar>& cost) const {
    Vector<Scalar> d = cost;
    for (Index i = 0; i < rows(); ++i) {
      const Scalar& cb = cost(basis_[static_cast<std::size_t>(i)]);
      if (cb != 0) d -= cb * t_.row(i).head(cols()).transpose();
    }
    return d;
  }

  void pivot(Index r, Index j) {
    t_.row(r) /= Scalar(t_(r, j));
    for (Index i = 0; i < rows(); ++i) {
      if (i == r || t_(i, j) == 0) continue;
      const Scalar f = t_(i, j);
      t_.row(i) -= f * t_.row(r);
    }
    basis_[static_cast<std::size_t>(r)] = j;
  }

  Vector<Scalar> basic_solution() const {
    Vector<Scalar> x = Vector<Scalar>::Zero(cols());
    for (Index i = 0; i < rows(); ++i) x(basis_[static_cast<std::size_t>(i)]) = rhs(i);
    return x;
  }

  /// Maximizes cost·x over the tableau's feasible set, only letting columns
  /// flagged in `may_enter` enter the basis. Returns the unbounded entering
  /// column, if any.
  std::optional<Index> maximize(const Vector<Scalar>& cost, const std::vector<bool>& may_enter) {
    for (;;) {
      const Vector<Scalar> d = reduced_costs(cost);
      Index entering = -1;
      for (Index j = 0; j < cols(); ++j)
        if (may_enter[static_cast<std::size_t>(j)] && d(j) > 0) {
          entering = j;
          break;
        }
      if (entering < 0) return std::nullopt;

      Index leaving = -1;
      Scalar best_ratio;
      for (Index i = 0; i < rows(); ++i) {
        if (t_(i, entering) <= 0) continue;
        Scalar ratio = rhs(i) / t_(i, entering);
        if (leaving < 0 || ratio < best_ratio ||
            (ratio == best_ratio && basis_[static_cast<std::size_t>(i)] <
                                        basis_[static_cast<std::size_t>(leaving)])) {
          leaving = i;
          best_ratio = std::move(ratio);
        }
      }
      if (leaving < 0) return entering;
      pivot(leaving, entering);
    }
  }

private:
  Matrix<Scalar> t_;
  std::vector<Index> basis_;
};

}  // namespace detail

template <typename Scalar>
Outcome<Scalar> solve(const LinearProgram<Scalar>& program) {
  program.validate();
  const Index n = program.dimension();
  const Index m = static_cast<Index>(program.constraints.size());

  // Column layout: structural columns (free variables split into ±), then
  // one slack/surplus per inequality row, then one artificial per row that
  // lacks a +1 slack.
  std::vector<Index> plus_col(static_cast<std::size_t>(n)), minus_col(static_cast<std::size_t>(n), -1);
  Index cols = 0;
  for (Index j = 0; j < n; ++j) {
    plus_col[static_cast<std::size_t>(j)] = cols++;
    if (!program.is_nonnegative(j)) minus_col[static_cast<std::size_t>(j)] = cols++;
  }

  std::vector<bool> flipped(static_cast<std::size_t>(m));
  std::vector<Relation> relation(static_cast<std::size_t>(m));
  std::vector<Index> slack_col(static_cast<std::size_t>(m), -1), identity_col(static_cast<std::size_t>(m), -1);
  for (Index i = 0; i < m; ++i) {
    const auto& c = program.constraints[static_cast<std::size_t>(i)];
    const bool flip = c.rhs < 0;
    Relation rel = c.relation;
    if (flip && rel != Relation::Equal) rel = rel == Relation::LessEqual ? Relation::GreaterEqual : Relation::LessEqual;
    flipped[static_cast<std::size_t>(i)] = flip;
    relation[static_cast<std::size_t>(i)] = rel;
    if (rel != Relation::Equal) slack_col[static_cast<std::size_t>(i)] = cols++;
  }
  const Index first_artificial = cols;
  for (Index i = 0; i < m; ++i) {
    if (relation[static_cast<std::size_t>(i)] == Relation::LessEqual)
      identity_col[static_cast<std::size_t>(i)] = slack_col[static_cast<std::size_t>(i)];
    else
      identity_col[static_cast<std::size_t>(i)] = cols++;
  }

  Matrix<Scalar> body = Matrix<Scalar>::Zero(m, cols + 1);
  std::vector<Index> basis(static_cast<std::size_t>(m));
  for (Index i = 0; i < m; ++i) {
    const auto& c = program.constraints[static_cast<std::size_t>(i)];
    const Scalar sign = flipped[static_cast<std::size_t>(i)] ? Scalar(-1) : Scalar(1);
    for (Index j = 0; j < n; ++j) {
      if (c.row(j) == 0) continue;
      body(i, plus_col[static_cast<std::size_t>(j)]) = sign * c.row(j);
      if (minus_col[static_cast<std::size_t>(j)] >= 0) body(i, minus_col[static_cast<std::size_t>(j)]) = -sign * c.row(j);
    }
    body(i, cols) = sign * c.rhs;
    const Index s = slack_col[static_cast<std::size_t>(i)];
    if (s >= 0) body(i, s) = relation[static_cast<std::size_t>(i)] == Relation::LessEqual ? Scalar(1) : Scalar(-1);
    body(i, identity_col[static_cast<std::size_t>(i)]) = Scalar(1);
    basis[static_cast<std::size_t>(i)] = identity_col[static_cast<std::size_t>(i)];
  }
  detail::Tableau<Scalar> tableau(std::move(body), std::move(basis));

  // Phase 1: drive the artificials to zero.
  if (first_artificial < cols) {
    Vector<Scalar> phase1 = Vector<Scalar>::Zero(cols);
    for (Index j = first_artificial; j < cols; ++j) phase1(j) = -1;
    tableau.maximize(phase1, std::vector<bool>(static_cast<std::size_t>(cols), true));
    const Vector<Scalar> x = tableau.basic_solution();
    for (Index j = first_artificial; j < cols; ++j)
      if (x(j) != 0) return Infeasible{};
    // Pivot zero-level artificials out where a real column is available; the
    // rest sit on redundant rows and never block a ratio test.
    for (Index i = 0; i < tableau.rows(); ++i) {
      if (tableau.basis()[static_cast<std::size_t>(i)] < first_artificial) continue;
      for (Index j = 0; j < first_artificial; ++j)
        if (tableau.at(i, j) != 0) {
          tableau.pivot(i, j);
          break;
        }
    }
  }

  const Scalar direction = program.sense == Sense::Maximize ? Scalar(1) : Scalar(-1);
  Vector<Scalar> cost = Vector<Scalar>::Zero(cols);
  for (Index j = 0; j < n; ++j) {
    cost(plus_col[static_cast<std::size_t>(j)]) = direction * program.objective(j);
    if (minus_col[static_cast<std::size_t>(j)] >= 0) cost(minus_col[static_cast<std::size_t>(j)]) = -direction * program.objective(j);
  }
  std::vector<bool> may_enter(static_cast<std::size_t>(cols), true);
  for (Index j = first_artificial; j < cols; ++j) may_enter[static_cast<std::size_t>(j)] = false;
  const std::optional<Index> unbounded = tableau.maximize(cost, may_enter);

  const auto to_original = [&](const Vector<Scalar>& standard) {
    Vector<Scalar> x(n);
    for (Index j = 0; j < n; ++j) {
      x(j) = standard(plus_col[static_cast<std::size_t>(j)]);
      if (minus_col[static_cast<std::size_t>(j)] >= 0) x(j) -= standard(minus_col[static_cast<std::size_t>(j)]);
    }
    return x;
  };
  const Vector<Scalar> standard = tableau.basic_solution();

  if (unbounded) {
    Vector<Scalar> ray = Vector<Scalar>::Zero(cols);
    ray(*unbounded) = 1;
    for (Index i = 0; i < tableau.rows(); ++i)
      ray(tableau.basis()[static_cast<std::size_t>(i)]) = -tableau.at(i, *unbounded);
    return Unbounded<Scalar>{to_original(standard), to_original(ray)};
  }

  const Vector<Scalar> d = tableau.reduced_costs(cost);
  Vector<Scalar> duals(m);
  for (Index i = 0; i < m; ++i) {
    const Scalar y = -d(identity_col[static_cast<std::size_t>(i)]);
    duals(i) = flipped[static_cast<std::size_t>(i)] ? Scalar(-y) : y;
  }
  Vector<Scalar> point = to_original(standard);
  Scalar value = program.objective.dot(point);
  return Optimal<Scalar>{std::move(point), std::move(value), std::move(duals)};
}

/// True when `x` satisfies every row and sign flag exactly.
template <typename Scalar>
bool is_feasible(const LinearProgram<Scalar>& program, const Vector<Scalar>& x) {
  if (x.size() != program.dimension()) return false;
  for (Index j = 0; j < x.size(); ++j)
    if (program.is_nonnegative(j) && x(j) < 0) return false;
  for (const auto& c : program.constraints) {
    const Scalar lhs = c.row.dot(x);
    switch (c.relation) {
      case Relation::LessEqual: if (lhs > c.rhs) return false; break;
      case Relation::Equal: if (lhs != c.rhs) return false; break;
      case Relation::GreaterEqual: if (lhs < c.rhs) return false; break;
    }
  }
  return true;
}

/// Independently re-checks an outcome's certificate: feasibility and
/// strong duality for Optimal, feasibility plus an improving recession
/// direction for Unbounded. Infeasible is accepted as reported.
template <typename Scalar>
bool verify(const LinearProgram<Scalar>& program, const Outcome<Scalar>& outcome) {
  const Scalar direction = program.sense == Sense::Maximize ? Scalar(1) : Scalar(-1);
  if (const auto* opt = std::get_if<Optimal<Scalar>>(&outcome)) {
    if (!is_feasible(program, opt->point)) return false;
    if (opt->value != program.objective.dot(opt->point)) return false;
    const Index m = static_cast<Index>(program.constraints.size());
    if (opt->duals.size() != m) return false;
    Vector<Scalar> aty = Vector<Scalar>::Zero(program.dimension());
    Scalar by(0);
    for (Index i = 0; i < m; ++i) {
      const auto& c = program.constraints[static_cast<std::size_t>(i)];
      const Scalar& y = opt->duals(i);
      if (c.relation == Relation::LessEqual && y < 0) return false;
      if (c.relation == Relation::GreaterEqual && y > 0) return false;
      aty += y * c.row;
      by += y * c.rhs;
    }
    for (Index j = 0; j < program.dimension(); ++j) {
      const Scalar cj = direction * program.objective(j);
      if (program.is_nonnegative(j) ? aty(j) < cj : aty(j) != cj) return false;
    }
    return by == direction * opt->value;
  }
  if (const auto* unb = std::get_if<Unbounded<Scalar>>(&outcome)) {
    if (!is_feasible(program, unb->point)) return false;
    for (Index j = 0; j < program.dimension(); ++j)
      if (program.is_nonnegative(j) && unb->ray(j) < 0) return false;
    for (const auto& c : program.constraints) {
      const Scalar lhs = c.row.dot(unb->ray);
      switch (c.relation) {
        case Relation::LessEqual: if (lhs > 0) return false; break;
        case Relation::Equal: if (lhs != 0) return false; break;
        case Relation::GreaterEqual: if (lhs < 0) return false; break;
      }
    }
    return direction * program.objective.dot(unb->ray) > 0;
  }
  return true;
}

}  // namespace condual::lp
