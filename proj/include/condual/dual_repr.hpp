#pragma once

// The dual function R(Y, z) = inf {π(ξ) : ⟨ξ, z⟩ ≥ Y} and the engine that
// builds ε-optimal densities by separating x from the level sets
// C_ε = {π 1_{T_π} ≤ Y_ε}.

#include "condual/quasi_map.hpp"

#include <optional>
#include <string>
#include <vector>

namespace condual {

/// Per-atom infima with their LP witnesses.
std::vector<AtomInfimum> eval_R_detail(const QuasiMap& map, const AtomVector& level, const RandomVariable& density);
ExtendedVector eval_R(const QuasiMap& map, const AtomVector& level, const RandomVariable& density);

/// lhs − rhs per atom, with +∞ − (+∞) = 0.
ExtendedVector gap(const ExtendedVector& lhs, const ExtendedVector& rhs);

using Schedule = std::vector<AtomVector>;

/// ε = 1, 1/4, 1/16, 1/64 on every atom.
Schedule default_schedule(std::size_t atoms);
/// The same ε on every atom for each listed value.
Schedule uniform_schedule(std::size_t atoms, const std::vector<Rational>& values);

struct DualRegions {
  GSet upsilon;      // Υ_π
  GSet finite;       // T_π
  GSet constant;     // A
  GSet nonconstant;  // A⊢
  GSet bounded;      // G = {π(x) < +∞}
};

DualRegions dual_regions(const QuasiMap& map, const RandomVariable& x);

struct DualEntry {
  AtomVector epsilon;
  ExtendedVector target;   // Y_ε
  RandomVariable density;  // z_ε
  AtomVector level;        // ⟨x, z_ε⟩
  ExtendedVector value;    // R_ε
  ExtendedVector gap;      // π(x) − R_ε
  GSet degenerate;         // atoms of A⊢ where C_ε is empty
  ExtendedVector margin;   // separation margin of x from C_ε
  std::size_t spot_checks = 0;
};

struct DualCertificate {
  RandomVariable x;
  ExtendedVector value;  // π(x)
  DualRegions regions;
  std::vector<DualEntry> entries;
  std::vector<std::string> issues;  // empty when every entry certifies
  bool passed() const { return issues.empty(); }
};

/// Runs the construction for every ε of the schedule and certifies
/// π(x) − R_ε < ε on G ∩ A⊢, R_ε = π(x) on A and R_ε ≤ π(x). `spot`
/// random ξ per entry re-check the level-set inclusion behind the bound.
DualCertificate represent(const QuasiMap& map, const RandomVariable& x, const Schedule& schedule, Rng& rng,
                          std::size_t spot = 8);

/// Independent re-check of a certificate from its densities alone.
std::vector<std::string> verify_certificate(const QuasiMap& map, const DualCertificate& cert);

struct UscResult {
  RandomVariable density;  // z*
  ExtendedVector value;    // π(x)
  ExtendedVector attained; // R(⟨x, z*⟩, z*)
  GSet separated;          // atoms where z* comes from separation
  std::vector<std::string> issues;
  bool exact() const { return issues.empty() && attained == value; }
};

/// Density attaining π(x) = R(⟨x, z*⟩, z*) by separating x from the open
/// level set {π 1_{T_π} < π(x)} on A⊢.
UscResult usc_max(const QuasiMap& map, const RandomVariable& x);

struct PropertyResult {
  std::string name;
  std::size_t checked = 0;
  std::size_t passed = 0;
  std::optional<std::string> counterexample;
};

struct PropertyReport {
  std::vector<PropertyResult> properties;
  bool passed() const;
  void merge(const PropertyReport& other);
};

/// Randomized exact checks of the dual-function properties: monotonicity,
/// positive scaling, witness production, locality, lattice identities,
/// quasi-affinity, grid infimum consistency and weak duality.
PropertyReport property_suite_R(const QuasiMap& map, Rng& rng, std::size_t instances);

}  // namespace condual
