#pragma once

// Finite probability space with a coarse sigma-algebra given by its atoms,
// and the conditional operations on it: E[·|G], the pairing
// ⟨x, z⟩ = E[x z | G], concatenation along G-sets and conditional p-norms.
//
// Random variables are dense vectors indexed by outcome; G-measurable
// variables are dense vectors indexed by atom. All arithmetic is exact.

#include "condual/rational.hpp"

#include <string>
#include <vector>

namespace condual {

/// Outcome-indexed random variable. Also used for densities z that identify
/// functionals through the pairing.
using RandomVariable = VectorQ;

/// Atom-indexed G-measurable random variable.
using AtomVector = VectorQ;

/// Atom-indexed extended variable with values in R ∪ {±∞}.
using ExtendedVector = std::vector<Extended>;

/// A G-measurable set, stored as a mask over atoms.
class GSet {
public:
  GSet() = default;
  explicit GSet(std::size_t atoms, bool value = false) : mask_(atoms, value) {}
  explicit GSet(std::vector<bool> mask) : mask_(std::move(mask)) {}

  static GSet all(std::size_t atoms) { return GSet(atoms, true); }
  static GSet none(std::size_t atoms) { return GSet(atoms, false); }

  std::size_t size() const { return mask_.size(); }
  bool contains(std::size_t atom) const { return mask_[atom]; }
  void set(std::size_t atom, bool value = true) { mask_[atom] = value; }
  bool empty() const;
  bool full() const;
  std::size_t count() const;
  const std::vector<bool>& mask() const { return mask_; }

  GSet complement() const;
  friend GSet operator|(const GSet& a, const GSet& b);
  friend GSet operator&(const GSet& a, const GSet& b);
  friend GSet operator-(const GSet& a, const GSet& b);
  friend bool operator==(const GSet& a, const GSet& b) = default;
  bool subset_of(const GSet& other) const;

private:
  std::vector<bool> mask_;
};

/// Ω with strictly positive rational probabilities summing to one, F the
/// discrete sigma-algebra, and G generated by an ordered atom partition.
class FiniteSpace {
public:
  /// Throws std::invalid_argument naming the offending field when the
  /// probabilities are not strictly positive, do not sum to one, or the
  /// atoms do not partition the outcomes.
  FiniteSpace(std::vector<std::string> outcomes, VectorQ probabilities,
              std::vector<std::vector<Index>> atoms, std::vector<std::string> atom_names = {});

  /// Uniform probabilities over `n` outcomes labelled w1..wn.
  static FiniteSpace uniform(Index outcomes, std::vector<std::vector<Index>> atoms);

  Index outcome_count() const { return static_cast<Index>(outcomes_.size()); }
  std::size_t atom_count() const { return atoms_.size(); }
  const std::vector<std::string>& outcomes() const { return outcomes_; }
  const std::vector<std::string>& atom_names() const { return atom_names_; }
  const VectorQ& probabilities() const { return probs_; }
  const std::vector<Index>& atom(std::size_t a) const { return atoms_[a]; }
  const std::vector<std::vector<Index>>& atoms() const { return atoms_; }
  std::size_t atom_of(Index outcome) const { return atom_of_[static_cast<std::size_t>(outcome)]; }
  Index atom_size(std::size_t a) const { return static_cast<Index>(atoms_[a].size()); }
  const Rational& atom_probability(std::size_t a) const { return atom_probs_(static_cast<Index>(a)); }

  /// p_ω / P(a) on the outcomes of atom a: the weights of the pairing
  /// restricted to that atom.
  const VectorQ& conditional_weights(std::size_t a) const { return cond_weights_[a]; }

  /// P(A) for a G-set.
  Rational probability(const GSet& set) const;

  /// x restricted to the outcomes of atom a, in atom order.
  VectorQ restrict(const RandomVariable& x, std::size_t a) const;
  /// Writes atom-local coordinates back into an outcome-indexed vector.
  void assign(RandomVariable& x, std::size_t a, const VectorQ& local) const;

  /// Expands an atom-indexed vector into a random variable constant on atoms.
  RandomVariable expand(const AtomVector& per_atom) const;

  /// Throws std::invalid_argument unless x has one entry per outcome.
  void check_rv(const RandomVariable& x, const char* what = "random variable") const;
  void check_atoms(std::size_t n, const char* what = "atom vector") const;

private:
  std::vector<std::string> outcomes_;
  VectorQ probs_;
  std::vector<std::vector<Index>> atoms_;
  std::vector<std::string> atom_names_;
  std::vector<std::size_t> atom_of_;
  VectorQ atom_probs_;
  std::vector<VectorQ> cond_weights_;
};

/// E[x | G] as an atom vector.
AtomVector cond_exp(const RandomVariable& x, const FiniteSpace& space);

/// ⟨x, z⟩ = E[x z | G].
AtomVector pairing(const RandomVariable& x, const RandomVariable& z, const FiniteSpace& space);

/// The pairing restricted to one atom, on atom-local coordinates.
Rational local_pairing(const VectorQ& x_local, const VectorQ& z_local, const VectorQ& weights);

/// x 1_A + y 1_{A^c}.
RandomVariable concat(const RandomVariable& x, const RandomVariable& y, const GSet& set,
                      const FiniteSpace& space);

/// Atomwise product of a G-measurable scalar with a random variable.
RandomVariable scale(const AtomVector& lambda, const RandomVariable& x, const FiniteSpace& space);

enum class NormKind { L1, L2Squared, LInf };

/// Conditional p-norm for p ∈ {1, 2, ∞}. For p = 2 the squared norm
/// E[x² | G] is returned so that comparisons stay rational.
AtomVector cond_norm(const RandomVariable& x, NormKind kind, const FiniteSpace& space);

/// Parses "1", "2" or "inf"; throws std::invalid_argument otherwise.
NormKind parse_norm_kind(std::string_view text);

}  // namespace condual
