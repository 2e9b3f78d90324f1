#pragma once

// Conditional polar and bipolar of generator-form sets, kept implicit as
// per-atom constraint systems and decided by exact LP.

#include "condual/conditional_set.hpp"
#include "condual/random.hpp"

#include <optional>
#include <string>
#include <vector>

namespace condual {

/// C° = {z : ⟨v, z⟩ < 1 on D_C for every v ∈ C}. On each atom of D_C the
/// constraints are ⟨v, z⟩ < 1 per vertex and ⟨r, z⟩ ≤ 0 per ray; for the
/// cone form only ⟨g, z⟩ ≤ 0 per generating ray.
struct PolarSet {
  SpacePtr space;
  GSet base;  // D_C of the primal set
  bool cone = false;
  std::vector<std::vector<LocalHalfSpace>> atoms;
};

/// Throws std::invalid_argument for half-space primals, or for cone=true
/// when some non-full atom is not generated by the origin plus rays.
PolarSet polar(const ConditionalSet& set, bool cone);

bool polar_membership(const PolarSet& polar, const RandomVariable& z);

struct BipolarDecision {
  bool member = true;
  std::optional<std::size_t> atom;          // first atom where membership fails
  std::optional<RandomVariable> functional; // z ∈ C° with ⟨v, z⟩ ≥ 1 (cone: > 0) there
};

/// Decides v ∈ C°° atom by atom. Throws std::invalid_argument when 0 ∉ C.
BipolarDecision bipolar_test(const ConditionalSet& set, const RandomVariable& v, bool cone = false);
bool bipolar_membership(const ConditionalSet& set, const RandomVariable& v, bool cone = false);

struct BipolarDiscrepancy {
  std::string kind;  // "generator-not-in-bipolar" or "nonmember-in-bipolar"
  RandomVariable point;
  std::optional<RandomVariable> functional;
};

struct BipolarReport {
  std::size_t generators_checked = 0;
  std::size_t probes_drawn = 0;
  std::size_t nonmember_probes = 0;
  std::vector<BipolarDiscrepancy> discrepancies;
  bool passed() const { return discrepancies.empty(); }
};

/// Checks C = C°°: every generator (and random member) lies in C°°, and
/// `nonmember_target` random non-members of C lie outside it.
BipolarReport bipolar_check(const ConditionalSet& set, Rng& rng, bool cone = false,
                            std::size_t nonmember_target = 100);

}  // namespace condual
