#pragma once

// Conditional sets on a finite space. Every representation here is stored
// in concatenation-closed form: membership factorizes over atoms, so a set
// is the product of its atom projections.
//
// Two representations are supported:
//  - generators: per atom, conv(vertices) + cone(rays), a FULL marker for
//    the whole atom space, or a bare vertex list without convexification
//    (the concatenation hull of a finite point set);
//  - half-spaces: ⟨x, z⟩ < Y (or ≤ Y) imposed on the atoms where Y is
//    finite.

#include "condual/separation.hpp"
#include "condual/space.hpp"

#include <memory>
#include <optional>
#include <variant>
#include <vector>

namespace condual {

using SpacePtr = std::shared_ptr<const FiniteSpace>;

/// Generators of one atom projection, in atom-local coordinates.
struct AtomGenerators {
  std::vector<VectorQ> vertices;
  std::vector<VectorQ> rays;
  bool full = false;
  bool convex = true;  // false: the projection is exactly the vertex list

  static AtomGenerators whole() { return {{}, {}, true, true}; }
};

/// {x : ⟨x, density⟩ < level} (≤ when !strict) on atoms with finite level.
struct HalfSpace {
  RandomVariable density;
  ExtendedVector level;
  bool strict = true;
};

/// One half-space restricted to a single atom, in local coordinates.
struct LocalHalfSpace {
  VectorQ density;
  Rational level;
  bool strict = true;
};

class ConditionalSet {
public:
  /// Throws std::invalid_argument on dimension mismatches or an atom with
  /// neither vertices nor the FULL marker. Atoms whose rays positively span
  /// the atom space are normalized to FULL.
  static ConditionalSet from_generators(SpacePtr space, std::vector<AtomGenerators> atoms);
  /// Throws std::invalid_argument on dimension mismatches or −∞ levels.
  static ConditionalSet from_halfspaces(SpacePtr space, std::vector<HalfSpace> halfspaces);
  static ConditionalSet whole(SpacePtr space);

  const FiniteSpace& space() const { return *space_; }
  const SpacePtr& space_ptr() const { return space_; }

  bool has_generators() const { return std::holds_alternative<std::vector<AtomGenerators>>(rep_); }
  const std::vector<AtomGenerators>& generators() const { return std::get<std::vector<AtomGenerators>>(rep_); }
  const std::vector<HalfSpace>& halfspaces() const { return std::get<std::vector<HalfSpace>>(rep_); }

  /// Half-space constraints active on atom a (half-space form only).
  std::vector<LocalHalfSpace> local_halfspaces(std::size_t a) const;

  /// Exact membership of x|_a in the projection on atom a.
  bool atom_contains(std::size_t a, const VectorQ& local) const;
  bool atom_is_full(std::size_t a) const;
  bool atom_is_empty(std::size_t a) const;

  /// Some point of the projection on atom a, or nullopt when it is empty.
  std::optional<VectorQ> atom_member(std::size_t a) const;
  /// A point outside the projection on atom a, or nullopt when it is FULL.
  std::optional<VectorQ> atom_outside_point(std::size_t a) const;

  /// sup ⟨ξ, z⟩ over the projection on atom a (closure for open sets):
  /// +∞ when unbounded, −∞ when the projection is empty.
  Extended atom_support(std::size_t a, const VectorQ& z_local) const;

private:
  ConditionalSet(SpacePtr space, std::variant<std::vector<AtomGenerators>, std::vector<HalfSpace>> rep)
      : space_(std::move(space)), rep_(std::move(rep)) {}

  SpacePtr space_;
  std::variant<std::vector<AtomGenerators>, std::vector<HalfSpace>> rep_;
};

bool membership(const ConditionalSet& set, const RandomVariable& x);

/// Concatenation hull of a finite point set: per atom the distinct
/// restrictions, without convexification. Throws on an empty list.
ConditionalSet cc_hull(SpacePtr space, const std::vector<RandomVariable>& points);

/// L⁰-convex concatenation hull: per atom the convex hull of the
/// restrictions. Throws on an empty list.
ConditionalSet l0_convex_hull(SpacePtr space, const std::vector<RandomVariable>& points);

/// True when the finite point set is already closed under concatenation
/// along G, i.e. equals the product of its atom restrictions.
bool is_concatenation_closed(const FiniteSpace& space, const std::vector<RandomVariable>& points);

struct TrivialRegion {
  GSet full;      // A_C: atoms where the set is the whole atom space
  GSet nontrivial;  // D_C
};

TrivialRegion trivial_region(const ConditionalSet& set);

/// H_{C,x}: atoms of D_C on which x|_a lies outside the atom projection.
GSet outside_region(const ConditionalSet& set, const RandomVariable& x);
/// x is outside C iff H_{C,x} = D_C.
bool is_outside(const ConditionalSet& set, const RandomVariable& x);

enum class Relation { GreaterEqual, LessEqual, Equal, Greater, Less };

Relation parse_relation(std::string_view text);
const char* to_string(Relation relation);
bool holds(const Extended& lhs, Relation relation, const Extended& rhs);

struct MaximalSet {
  GSet holds_everywhere;  // A_M: rel(Y, Y0) for every Y in the family
  GSet violated;          // A_M⊢: the negation for some Y
  ExtendedVector witness; // atomwise concatenation of violating members
};

/// Throws std::invalid_argument on an empty family or length mismatch.
MaximalSet maximal_set(const std::vector<ExtendedVector>& family, const ExtendedVector& reference, Relation relation);

struct DualTrivialPair {
  GSet matched;    // A_M: every y in D^cc is matched inside C on these atoms
  GSet unmatched;  // A_M⊢
  std::optional<RandomVariable> witness;  // y in D^cc outside C on A_M⊢
};

/// `other` = nullopt stands for D = E (the whole space).
DualTrivialPair dual_trivial_pair(const ConditionalSet& set,
                                  const std::optional<std::vector<RandomVariable>>& other);

/// Separates x from C strictly on every atom of `region` (default D_C).
/// Returns nullopt when some atom of the region admits no separation (x|_a
/// lies in the projection, or in the closed hull of a non-convex vertex
/// list). Atoms outside the region carry a zero functional.
std::optional<SeparationCertificate> separate(const ConditionalSet& set, const RandomVariable& x,
                                              const std::optional<GSet>& region = std::nullopt);

/// Re-verifies a certificate exactly: for generator sets against every
/// vertex and ray, for half-space sets against the LP support value.
bool verify_separation(const ConditionalSet& set, const RandomVariable& x, const SeparationCertificate& cert);

}  // namespace condual
