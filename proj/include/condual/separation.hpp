#pragma once

// Strict separation of a point from a finitely generated polyhedron on one
// atom, by exact LP, and the conditional certificate assembled from the
// per-atom pieces.

#include "condual/space.hpp"

#include <optional>
#include <vector>

namespace condual {

struct LocalSeparation {
  VectorQ functional;  // w with ‖w‖₁ = 1
  Rational margin;     // ⟨x,w⟩ − max over vertices ⟨v,w⟩ > 0
};

/// Separates `point` from conv(vertices) + cone(rays) under the weighted
/// pairing ⟨a,b⟩ = Σ weights_i a_i b_i. The returned w satisfies
/// ⟨point,w⟩ > ⟨v,w⟩ for every vertex and ⟨r,w⟩ ≤ 0 for every ray. Returns
/// nullopt when the point belongs to the set.
///
/// Throws std::invalid_argument for an empty vertex list, non-positive
/// weights or inconsistent dimensions.
std::optional<LocalSeparation> separate_point_from_atomwise_polytope(const VectorQ& point,
                                                                     const std::vector<VectorQ>& vertices,
                                                                     const std::vector<VectorQ>& rays,
                                                                     const VectorQ& weights);

/// Exact membership of `point` in conv(vertices) + cone(rays) via a
/// convex-combination feasibility LP.
bool in_finitely_generated(const VectorQ& point, const std::vector<VectorQ>& vertices,
                           const std::vector<VectorQ>& rays);

enum class SeparationGrade {
  Strict,    // positive margin against the closure on every requested atom
  Boundary,  // the point sits on the closure of an open set: weak inequality
             // against the closure, strict against the set itself
};

/// ⟨x, z⟩ − sup_{ξ∈C} ⟨ξ, z⟩ ≥ margin on every atom of `region`; margins are
/// positive for Strict, zero is allowed on Boundary atoms. An atom where C
/// is empty carries margin +∞.
struct SeparationCertificate {
  RandomVariable functional;
  ExtendedVector margin;
  GSet region;
  SeparationGrade grade = SeparationGrade::Strict;
};

const char* to_string(SeparationGrade grade);

}  // namespace condual
