#include "condual/space.hpp"

#include <algorithm>
#include <stdexcept>

namespace condual {

bool GSet::empty() const { return std::none_of(mask_.begin(), mask_.end(), [](bool b) { return b; }); }
bool GSet::full() const { return std::all_of(mask_.begin(), mask_.end(), [](bool b) { return b; }); }
std::size_t GSet::count() const { return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), true)); }

GSet GSet::complement() const {
  GSet out(mask_.size());
  for (std::size_t a = 0; a < mask_.size(); ++a) out.mask_[a] = !mask_[a];
  return out;
}

namespace {
template <typename Op>
GSet combine(const GSet& a, const GSet& b, Op op) {
  if (a.size() != b.size()) throw std::invalid_argument("G-sets over different atom counts");
  GSet out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out.set(i, op(a.contains(i), b.contains(i)));
  return out;
}
}  // namespace

GSet operator|(const GSet& a, const GSet& b) { return combine(a, b, [](bool x, bool y) { return x || y; }); }
GSet operator&(const GSet& a, const GSet& b) { return combine(a, b, [](bool x, bool y) { return x && y; }); }
GSet operator-(const GSet& a, const GSet& b) { return combine(a, b, [](bool x, bool y) { return x && !y; }); }

bool GSet::subset_of(const GSet& other) const { return (*this - other).empty(); }

FiniteSpace::FiniteSpace(std::vector<std::string> outcomes, VectorQ probabilities,
                         std::vector<std::vector<Index>> atoms, std::vector<std::string> atom_names)
    : outcomes_(std::move(outcomes)), probs_(std::move(probabilities)), atoms_(std::move(atoms)),
      atom_names_(std::move(atom_names)) {
  const Index n = static_cast<Index>(outcomes_.size());
  if (n == 0) throw std::invalid_argument("outcomes: the sample space is empty");
  if (probs_.size() != n)
    throw std::invalid_argument("probabilities: expected " + std::to_string(n) + " entries, got " +
                                std::to_string(probs_.size()));
  for (Index i = 0; i < n; ++i)
    if (probs_(i) <= 0)
      throw std::invalid_argument("probabilities: entry for '" + outcomes_[static_cast<std::size_t>(i)] +
                                  "' is not strictly positive");
  if (probs_.sum() != 1)
    throw std::invalid_argument("probabilities: sum to " + to_string(Rational(probs_.sum())) + ", not 1");

  if (atoms_.empty()) throw std::invalid_argument("atoms: the partition is empty");
  atom_of_.assign(static_cast<std::size_t>(n), atoms_.size());
  for (std::size_t a = 0; a < atoms_.size(); ++a) {
    if (atoms_[a].empty()) throw std::invalid_argument("atoms: atom " + std::to_string(a) + " is empty");
    for (Index w : atoms_[a]) {
      if (w < 0 || w >= n) throw std::invalid_argument("atoms: outcome index " + std::to_string(w) + " out of range");
      if (atom_of_[static_cast<std::size_t>(w)] != atoms_.size())
        throw std::invalid_argument("atoms: outcome '" + outcomes_[static_cast<std::size_t>(w)] +
                                    "' belongs to two atoms");
      atom_of_[static_cast<std::size_t>(w)] = a;
    }
  }
  for (Index w = 0; w < n; ++w)
    if (atom_of_[static_cast<std::size_t>(w)] == atoms_.size())
      throw std::invalid_argument("atoms: outcome '" + outcomes_[static_cast<std::size_t>(w)] + "' is not covered");

  if (atom_names_.empty())
    for (std::size_t a = 0; a < atoms_.size(); ++a) atom_names_.push_back("a" + std::to_string(a + 1));
  if (atom_names_.size() != atoms_.size()) throw std::invalid_argument("atoms: name count mismatch");

  atom_probs_ = VectorQ::Zero(static_cast<Index>(atoms_.size()));
  cond_weights_.resize(atoms_.size());
  for (std::size_t a = 0; a < atoms_.size(); ++a) {
    for (Index w : atoms_[a]) atom_probs_(static_cast<Index>(a)) += probs_(w);
    VectorQ weights(static_cast<Index>(atoms_[a].size()));
    for (std::size_t k = 0; k < atoms_[a].size(); ++k)
      weights(static_cast<Index>(k)) = probs_(atoms_[a][k]) / atom_probs_(static_cast<Index>(a));
    cond_weights_[a] = std::move(weights);
  }
}

FiniteSpace FiniteSpace::uniform(Index outcomes, std::vector<std::vector<Index>> atoms) {
  std::vector<std::string> labels;
  for (Index i = 0; i < outcomes; ++i) labels.push_back("w" + std::to_string(i + 1));
  VectorQ probs = VectorQ::Constant(outcomes, Rational(1, outcomes));
  return FiniteSpace(std::move(labels), std::move(probs), std::move(atoms));
}

Rational FiniteSpace::probability(const GSet& set) const {
  check_atoms(set.size(), "G-set");
  Rational p(0);
  for (std::size_t a = 0; a < atoms_.size(); ++a)
    if (set.contains(a)) p += atom_probs_(static_cast<Index>(a));
  return p;
}

VectorQ FiniteSpace::restrict(const RandomVariable& x, std::size_t a) const {
  VectorQ local(atom_size(a));
  for (std::size_t k = 0; k < atoms_[a].size(); ++k) local(static_cast<Index>(k)) = x(atoms_[a][k]);
  return local;
}

void FiniteSpace::assign(RandomVariable& x, std::size_t a, const VectorQ& local) const {
  for (std::size_t k = 0; k < atoms_[a].size(); ++k) x(atoms_[a][k]) = local(static_cast<Index>(k));
}

RandomVariable FiniteSpace::expand(const AtomVector& per_atom) const {
  check_atoms(static_cast<std::size_t>(per_atom.size()));
  RandomVariable x(outcome_count());
  for (Index w = 0; w < outcome_count(); ++w) x(w) = per_atom(static_cast<Index>(atom_of(w)));
  return x;
}

void FiniteSpace::check_rv(const RandomVariable& x, const char* what) const {
  if (x.size() != outcome_count())
    throw std::invalid_argument(std::string("dimension mismatch: ") + what + " has " + std::to_string(x.size()) +
                                " entries, the space has " + std::to_string(outcome_count()) + " outcomes");
}

void FiniteSpace::check_atoms(std::size_t n, const char* what) const {
  if (n != atoms_.size())
    throw std::invalid_argument(std::string("dimension mismatch: ") + what + " has " + std::to_string(n) +
                                " entries, the space has " + std::to_string(atoms_.size()) + " atoms");
}

AtomVector cond_exp(const RandomVariable& x, const FiniteSpace& space) {
  space.check_rv(x);
  AtomVector out(static_cast<Index>(space.atom_count()));
  for (std::size_t a = 0; a < space.atom_count(); ++a)
    out(static_cast<Index>(a)) = space.conditional_weights(a).dot(space.restrict(x, a));
  return out;
}

AtomVector pairing(const RandomVariable& x, const RandomVariable& z, const FiniteSpace& space) {
  space.check_rv(x, "first pairing argument");
  space.check_rv(z, "second pairing argument");
  return cond_exp(x.cwiseProduct(z), space);
}

Rational local_pairing(const VectorQ& x_local, const VectorQ& z_local, const VectorQ& weights) {
  return weights.cwiseProduct(x_local).dot(z_local);
}

RandomVariable concat(const RandomVariable& x, const RandomVariable& y, const GSet& set,
                      const FiniteSpace& space) {
  space.check_rv(x);
  space.check_rv(y);
  space.check_atoms(set.size(), "G-set");
  RandomVariable out(x.size());
  for (Index w = 0; w < x.size(); ++w) out(w) = set.contains(space.atom_of(w)) ? x(w) : y(w);
  return out;
}

RandomVariable scale(const AtomVector& lambda, const RandomVariable& x, const FiniteSpace& space) {
  return space.expand(lambda).cwiseProduct(x);
}

AtomVector cond_norm(const RandomVariable& x, NormKind kind, const FiniteSpace& space) {
  space.check_rv(x);
  switch (kind) {
    case NormKind::L1: return cond_exp(x.cwiseAbs(), space);
    case NormKind::L2Squared: return cond_exp(x.cwiseProduct(x), space);
    case NormKind::LInf: {
      AtomVector out(static_cast<Index>(space.atom_count()));
      for (std::size_t a = 0; a < space.atom_count(); ++a)
        out(static_cast<Index>(a)) = space.restrict(x, a).cwiseAbs().maxCoeff();
      return out;
    }
  }
  throw std::invalid_argument("unsupported norm");
}

NormKind parse_norm_kind(std::string_view text) {
  if (text == "1") return NormKind::L1;
  if (text == "2") return NormKind::L2Squared;
  if (text == "inf" || text == "∞") return NormKind::LInf;
  throw std::invalid_argument("unsupported p '" + std::string(text) + "': expected 1, 2 or inf");
}

}  // namespace condual
