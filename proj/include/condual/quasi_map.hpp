#pragma once

// Regular maps π: E → L̄⁰(G) given atom by atom by a piecewise-linear
// descriptor. Every descriptor is quasiconvex on its atom, so sublevel sets
// are exact (open or closed) polyhedra.

#include "condual/conditional_set.hpp"
#include "condual/random.hpp"

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace condual {

/// v ↦ ⟨v, density⟩_a + offset, all vectors in atom-local coordinates.
struct Linear {
  VectorQ density;
  Rational offset;
};

/// v ↦ max_ω v_ω.
struct WorstCase {};

struct AffinePiece {
  VectorQ slope;  // paired with v under the atom weights
  Rational offset;
};

/// v ↦ max_j ⟨α_j, v⟩_a + β_j.
struct ConvexPL {
  std::vector<AffinePiece> pieces;
};

/// Nondecreasing continuous piecewise-linear g: R → R through the
/// breakpoints (t_i, g_i), extended with the given end slopes.
class Transform {
public:
  Transform(std::vector<std::pair<Rational, Rational>> breakpoints, Rational left_slope, Rational right_slope);

  Rational operator()(const Rational& t) const;
  /// lim g(t) as t → −∞ (−∞ when the left slope is positive).
  Extended at_neg_inf() const;
  Extended at(const Extended& t) const;

  /// {t : g(t) ≤ y} = (−∞, τ]; nullopt τ means all of R, empty() means ∅.
  /// For strict, {t : g(t) < y} = (−∞, τ).
  struct Preimage {
    bool empty = false;
    std::optional<Rational> bound;
  };
  Preimage preimage(const Rational& y, bool strict) const;

  const std::vector<std::pair<Rational, Rational>>& breakpoints() const { return points_; }
  const Rational& left_slope() const { return left_; }
  const Rational& right_slope() const { return right_; }

private:
  std::vector<std::pair<Rational, Rational>> points_;
  Rational left_, right_;
};

/// g ∘ h with h convex piecewise-linear.
struct Transformed {
  Transform g;
  ConvexPL inner;
};

/// Constant +∞ on the atom.
struct InfiniteAtom {};

using Descriptor = std::variant<Linear, WorstCase, ConvexPL, Transformed, InfiniteAtom>;

const char* family_name(const Descriptor& d);

/// ConvexPL pieces reproducing WorstCase on an atom: slopes e_ω / q_ω.
ConvexPL worst_case_pieces(const VectorQ& weights);

class QuasiMap {
public:
  /// Throws std::invalid_argument on a descriptor whose dimension does not
  /// match its atom, or a ConvexPL without pieces.
  QuasiMap(SpacePtr space, std::vector<Descriptor> atoms);

  const FiniteSpace& space() const { return *space_; }
  const SpacePtr& space_ptr() const { return space_; }
  const std::vector<Descriptor>& atoms() const { return atoms_; }
  const Descriptor& atom(std::size_t a) const { return atoms_[a]; }

  /// Descriptor value on atom a at the local vector v.
  Extended eval_atom(std::size_t a, const VectorQ& v) const;

private:
  SpacePtr space_;
  std::vector<Descriptor> atoms_;
};

ExtendedVector eval(const QuasiMap& map, const RandomVariable& x);

/// Any map E → L̄⁰(G); used so harness maps can go through the same checks.
using MapOracle = std::function<ExtendedVector(const RandomVariable&)>;

MapOracle oracle(const QuasiMap& map);

struct RegWitness {
  GSet region;
  RandomVariable x, y;
};

struct CheckReport {
  std::size_t trials = 0;
  std::size_t failures = 0;
  bool passed() const { return failures == 0; }
};

struct RegReport : CheckReport {
  std::optional<RegWitness> witness;
};

/// π(x1_A + y1_{A^c})1_A = π(x)1_A on random (x, y, A), exact.
RegReport check_reg(const MapOracle& map, const FiniteSpace& space, Rng& rng, std::size_t trials = 200);

struct InfinityRegion {
  GSet upsilon;  // Υ_π
  GSet finite;   // T_π
};

InfinityRegion infinity_region(const QuasiMap& map);

struct ConstancyRegion {
  GSet constant;      // A
  GSet nonconstant;   // A⊢
};

ConstancyRegion constancy_region(const QuasiMap& map);

/// ⟨v, density⟩_a ≥ level on one atom.
struct Floor {
  VectorQ density;
  Rational level;
};

/// inf {π_a(v) : v satisfies the floor} on atom a (unconstrained without a
/// floor). +∞ when infeasible or on InfiniteAtom, −∞ when unbounded below.
struct AtomInfimum {
  Extended value;
  std::optional<VectorQ> point;  // a minimizer when the LP attains
  std::optional<VectorQ> base;   // feasible start of a descent ray
  std::optional<VectorQ> ray;    // direction along which π_a decreases
};
AtomInfimum atom_infimum(const QuasiMap& map, std::size_t a, const std::optional<Floor>& floor = std::nullopt);

/// A feasible v with π_a(v) < alpha, or nullopt when none exists.
std::optional<VectorQ> descend_below(const QuasiMap& map, std::size_t a, const std::optional<Floor>& floor,
                                     const Rational& alpha);

struct LevelSetSpec {
  ExtendedVector level;
  bool strict = false;
  std::optional<GSet> region;  // default: every atom
};

/// {ξ : π(ξ)1_{T_π} ≤ Y} (or <) on the region; FULL where Y = +∞ or
/// outside the region. Returned in half-space form.
ConditionalSet level_set(const QuasiMap& map, const LevelSetSpec& spec);

struct QcoWitness {
  RandomVariable x1, x2;
  AtomVector lambda;
  std::size_t atom = 0;
};

struct QcoReport : CheckReport {
  std::optional<QcoWitness> witness;
};

/// π(Λx₁ + (1−Λ)x₂) ≤ π(x₁) ∨ π(x₂) for random G-measurable Λ ∈ [0, 1].
QcoReport check_qco(const MapOracle& map, const FiniteSpace& space, Rng& rng, std::size_t trials = 500);

struct EqcWitness {
  ExtendedVector level;
  bool strict = false;
  RandomVariable x;
};

struct EqcReport : CheckReport {
  std::size_t separations = 0;
  std::optional<EqcWitness> witness;
};

/// For random levels Y and points outside U_Y, separation from U_Y
/// succeeds on D_{U_Y} and re-verifies.
EqcReport check_eqc(const QuasiMap& map, Rng& rng, std::size_t trials = 100);

}  // namespace condual
