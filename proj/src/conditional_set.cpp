#include "condual/conditional_set.hpp"

#include "condual/simplex.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace condual {

namespace {

using LP = lp::LinearProgram<Rational>;

VectorQ unit(Index d, Index i, const Rational& sign) {
  VectorQ e = VectorQ::Zero(d);
  e(i) = sign;
  return e;
}

bool rays_span(Index d, const std::vector<VectorQ>& rays) {
  if (rays.empty()) return false;
  const std::vector<VectorQ> origin{VectorQ::Zero(d)};
  for (Index i = 0; i < d; ++i)
    for (int s : {1, -1})
      if (!in_finitely_generated(unit(d, i, Rational(s)), origin, rays)) return false;
  return true;
}

bool satisfies(const LocalHalfSpace& h, const VectorQ& local, const VectorQ& weights) {
  const Rational lhs = local_pairing(local, h.density, weights);
  return h.strict ? lhs < h.level : lhs <= h.level;
}

// max s  s.t. ⟨ξ, z_k⟩ + s·[strict_k] ≤ Y_k, s ≤ 1. Returns the interior
// point when the (possibly open) polyhedron is nonempty.
std::optional<VectorQ> halfspace_interior_point(const std::vector<LocalHalfSpace>& hs, const VectorQ& weights) {
  const Index d = weights.size();
  LP program(lp::Sense::Maximize, VectorQ::Zero(d + 1));
  program.objective(d) = 1;
  bool any_strict = false;
  for (const auto& h : hs) {
    VectorQ row(d + 1);
    row.head(d) = weights.cwiseProduct(h.density);
    row(d) = h.strict ? 1 : 0;
    any_strict = any_strict || h.strict;
    program.add(std::move(row), lp::Relation::LessEqual, h.level);
  }
  VectorQ cap = VectorQ::Zero(d + 1);
  cap(d) = 1;
  program.add(std::move(cap), lp::Relation::LessEqual, Rational(1));
  // s is free and only capped above, so the program is never unbounded.
  const auto outcome = lp::solve(program);
  const auto* opt = std::get_if<lp::Optimal<Rational>>(&outcome);
  if (opt == nullptr) return std::nullopt;
  if (any_strict && opt->value <= 0) return std::nullopt;
  return VectorQ(opt->point.head(d));
}

// sup of ⟨ξ, z⟩ over the closed relaxation; assumes the set is nonempty.
Extended halfspace_support(const std::vector<LocalHalfSpace>& hs, const VectorQ& weights, const VectorQ& z) {
  const Index d = weights.size();
  LP program(lp::Sense::Maximize, weights.cwiseProduct(z));
  for (const auto& h : hs) program.add(weights.cwiseProduct(h.density), lp::Relation::LessEqual, h.level);
  const auto outcome = lp::solve(program);
  if (const auto* opt = std::get_if<lp::Optimal<Rational>>(&outcome)) return Extended(opt->value);
  if (std::holds_alternative<lp::Unbounded<Rational>>(outcome)) return Extended::pos_inf();
  (void)d;
  return Extended::neg_inf();
}

// True when some point of the open polyhedron attains ⟨ξ, z⟩ = value.
bool attained_in_open_set(const std::vector<LocalHalfSpace>& hs, const VectorQ& weights, const VectorQ& z,
                          const Rational& value) {
  std::vector<LocalHalfSpace> with_face = hs;
  with_face.push_back({z, value, false});
  with_face.push_back({VectorQ(-z), Rational(-value), false});
  return halfspace_interior_point(with_face, weights).has_value();
}

}  // namespace

ConditionalSet ConditionalSet::from_generators(SpacePtr space, std::vector<AtomGenerators> atoms) {
  space->check_atoms(atoms.size(), "generator list");
  for (std::size_t a = 0; a < atoms.size(); ++a) {
    auto& g = atoms[a];
    const Index d = space->atom_size(a);
    if (g.full) continue;
    if (g.vertices.empty())
      throw std::invalid_argument("atom '" + space->atom_names()[a] + "' has no vertex and is not marked FULL");
    for (const auto& v : g.vertices)
      if (v.size() != d) throw std::invalid_argument("vertex dimension mismatch on atom '" + space->atom_names()[a] + "'");
    for (const auto& r : g.rays)
      if (r.size() != d) throw std::invalid_argument("ray dimension mismatch on atom '" + space->atom_names()[a] + "'");
    if (!g.convex && !g.rays.empty()) throw std::invalid_argument("a non-convex vertex list cannot carry rays");
    if (g.convex && rays_span(d, g.rays)) g = AtomGenerators::whole();
  }
  return ConditionalSet(std::move(space), std::move(atoms));
}

ConditionalSet ConditionalSet::from_halfspaces(SpacePtr space, std::vector<HalfSpace> halfspaces) {
  for (const auto& h : halfspaces) {
    space->check_rv(h.density, "half-space density");
    space->check_atoms(h.level.size(), "half-space level");
    for (const auto& y : h.level)
      if (y.is_neg_inf()) throw std::invalid_argument("half-space levels may not be -inf");
  }
  return ConditionalSet(std::move(space), std::move(halfspaces));
}

ConditionalSet ConditionalSet::whole(SpacePtr space) {
  std::vector<AtomGenerators> atoms(space->atom_count(), AtomGenerators::whole());
  return ConditionalSet(std::move(space), std::move(atoms));
}

std::vector<LocalHalfSpace> ConditionalSet::local_halfspaces(std::size_t a) const {
  std::vector<LocalHalfSpace> out;
  for (const auto& h : halfspaces())
    if (h.level[a].finite()) out.push_back({space_->restrict(h.density, a), h.level[a].value(), h.strict});
  return out;
}

bool ConditionalSet::atom_contains(std::size_t a, const VectorQ& local) const {
  if (has_generators()) {
    const auto& g = generators()[a];
    if (g.full) return true;
    if (!g.convex)
      return std::any_of(g.vertices.begin(), g.vertices.end(), [&](const VectorQ& v) { return v == local; });
    return in_finitely_generated(local, g.vertices, g.rays);
  }
  const VectorQ& w = space_->conditional_weights(a);
  for (const auto& h : local_halfspaces(a))
    if (!satisfies(h, local, w)) return false;
  return true;
}

bool ConditionalSet::atom_is_full(std::size_t a) const {
  if (has_generators()) return generators()[a].full;
  // A nonzero functional bounds the atom; zero ones are vacuous or empty.
  const VectorQ& w = space_->conditional_weights(a);
  const VectorQ origin = VectorQ::Zero(space_->atom_size(a));
  for (const auto& h : local_halfspaces(a))
    if (!h.density.isZero() || !satisfies(h, origin, w)) return false;
  return true;
}

bool ConditionalSet::atom_is_empty(std::size_t a) const { return !atom_member(a).has_value(); }

std::optional<VectorQ> ConditionalSet::atom_member(std::size_t a) const {
  const Index d = space_->atom_size(a);
  if (has_generators()) {
    const auto& g = generators()[a];
    if (g.full) return VectorQ(VectorQ::Zero(d));
    return g.vertices.front();
  }
  return halfspace_interior_point(local_halfspaces(a), space_->conditional_weights(a));
}

std::optional<VectorQ> ConditionalSet::atom_outside_point(std::size_t a) const {
  const Index d = space_->atom_size(a);
  if (atom_is_full(a)) return std::nullopt;
  if (has_generators()) {
    const auto& g = generators()[a];
    if (!g.convex) {
      Rational top = g.vertices.front()(0);
      for (const auto& v : g.vertices) top = std::max(top, v(0));
      VectorQ p = VectorQ::Zero(d);
      p(0) = top + 1;
      return p;
    }
    // Some ±e_i lies outside cone(rays); far enough along it we leave the set.
    const std::vector<VectorQ> origin{VectorQ::Zero(d)};
    for (Index i = 0; i < d; ++i)
      for (int s : {1, -1}) {
        const VectorQ e = unit(d, i, Rational(s));
        if (in_finitely_generated(e, origin, g.rays)) continue;
        for (Rational scale(1);; scale *= 2) {
          VectorQ p = scale * e;
          if (!in_finitely_generated(p, g.vertices, g.rays)) return p;
        }
      }
    throw std::logic_error("non-full generator atom without an escaping direction");
  }
  const VectorQ& w = space_->conditional_weights(a);
  const auto hs = local_halfspaces(a);
  for (const auto& h : hs) {
    if (h.density.isZero()) {
      if (!satisfies(h, VectorQ::Zero(d), w)) return VectorQ(VectorQ::Zero(d));
      continue;
    }
    const Rational norm2 = local_pairing(h.density, h.density, w);
    const Rational target = abs(h.level) + 1;
    return VectorQ(h.density * (target / norm2));
  }
  throw std::logic_error("non-full half-space atom without a bounding constraint");
}

Extended ConditionalSet::atom_support(std::size_t a, const VectorQ& z_local) const {
  const VectorQ& w = space_->conditional_weights(a);
  if (has_generators()) {
    const auto& g = generators()[a];
    if (g.full) return z_local.isZero() ? Extended(Rational(0)) : Extended::pos_inf();
    for (const auto& r : g.rays)
      if (local_pairing(r, z_local, w) > 0) return Extended::pos_inf();
    Rational best = local_pairing(g.vertices.front(), z_local, w);
    for (const auto& v : g.vertices) best = std::max(best, local_pairing(v, z_local, w));
    return Extended(best);
  }
  const auto hs = local_halfspaces(a);
  if (!halfspace_interior_point(hs, w)) return Extended::neg_inf();
  return halfspace_support(hs, w, z_local);
}

bool membership(const ConditionalSet& set, const RandomVariable& x) {
  const auto& space = set.space();
  space.check_rv(x);
  for (std::size_t a = 0; a < space.atom_count(); ++a)
    if (!set.atom_contains(a, space.restrict(x, a))) return false;
  return true;
}

namespace {

struct VectorLess {
  bool operator()(const VectorQ& a, const VectorQ& b) const {
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
  }
};

std::vector<AtomGenerators> restrictions(const FiniteSpace& space, const std::vector<RandomVariable>& points,
                                         bool convex) {
  if (points.empty()) throw std::invalid_argument("hull of an empty point list");
  std::vector<AtomGenerators> atoms(space.atom_count());
  for (std::size_t a = 0; a < space.atom_count(); ++a) {
    std::set<VectorQ, VectorLess> seen;
    for (const auto& p : points) {
      space.check_rv(p, "hull point");
      VectorQ local = space.restrict(p, a);
      if (seen.insert(local).second) atoms[a].vertices.push_back(std::move(local));
    }
    atoms[a].convex = convex;
  }
  return atoms;
}

}  // namespace

ConditionalSet cc_hull(SpacePtr space, const std::vector<RandomVariable>& points) {
  auto atoms = restrictions(*space, points, false);
  return ConditionalSet::from_generators(std::move(space), std::move(atoms));
}

ConditionalSet l0_convex_hull(SpacePtr space, const std::vector<RandomVariable>& points) {
  auto atoms = restrictions(*space, points, true);
  return ConditionalSet::from_generators(std::move(space), std::move(atoms));
}

bool is_concatenation_closed(const FiniteSpace& space, const std::vector<RandomVariable>& points) {
  if (points.empty()) return true;
  std::set<VectorQ, VectorLess> distinct(points.begin(), points.end());
  Integer product(1);
  for (std::size_t a = 0; a < space.atom_count(); ++a) {
    std::set<VectorQ, VectorLess> local;
    for (const auto& p : points) local.insert(space.restrict(p, a));
    product *= static_cast<unsigned long>(local.size());
  }
  return product == static_cast<unsigned long>(distinct.size());
}

TrivialRegion trivial_region(const ConditionalSet& set) {
  const std::size_t n = set.space().atom_count();
  TrivialRegion out{GSet(n), GSet(n)};
  for (std::size_t a = 0; a < n; ++a) {
    const bool full = set.atom_is_full(a);
    out.full.set(a, full);
    out.nontrivial.set(a, !full);
  }
  return out;
}

GSet outside_region(const ConditionalSet& set, const RandomVariable& x) {
  const auto& space = set.space();
  space.check_rv(x);
  GSet h(space.atom_count());
  for (std::size_t a = 0; a < space.atom_count(); ++a)
    if (!set.atom_is_full(a) && !set.atom_contains(a, space.restrict(x, a))) h.set(a);
  return h;
}

bool is_outside(const ConditionalSet& set, const RandomVariable& x) {
  return outside_region(set, x) == trivial_region(set).nontrivial;
}

Relation parse_relation(std::string_view text) {
  if (text == ">=") return Relation::GreaterEqual;
  if (text == "<=") return Relation::LessEqual;
  if (text == "=" || text == "==") return Relation::Equal;
  if (text == ">") return Relation::Greater;
  if (text == "<") return Relation::Less;
  throw std::invalid_argument("unknown relation '" + std::string(text) + "'");
}

const char* to_string(Relation relation) {
  switch (relation) {
    case Relation::GreaterEqual: return ">=";
    case Relation::LessEqual: return "<=";
    case Relation::Equal: return "=";
    case Relation::Greater: return ">";
    case Relation::Less: return "<";
  }
  return "?";
}

bool holds(const Extended& lhs, Relation relation, const Extended& rhs) {
  switch (relation) {
    case Relation::GreaterEqual: return lhs >= rhs;
    case Relation::LessEqual: return lhs <= rhs;
    case Relation::Equal: return lhs == rhs;
    case Relation::Greater: return lhs > rhs;
    case Relation::Less: return lhs < rhs;
  }
  return false;
}

MaximalSet maximal_set(const std::vector<ExtendedVector>& family, const ExtendedVector& reference, Relation relation) {
  if (family.empty()) throw std::invalid_argument("maximal_set: empty family");
  const std::size_t n = reference.size();
  for (const auto& y : family)
    if (y.size() != n) throw std::invalid_argument("maximal_set: family member length mismatch");
  MaximalSet out{GSet(n), GSet(n), family.front()};
  for (std::size_t a = 0; a < n; ++a) {
    const auto violator = std::find_if(family.begin(), family.end(),
                                       [&](const ExtendedVector& y) { return !holds(y[a], relation, reference[a]); });
    if (violator == family.end()) {
      out.holds_everywhere.set(a);
    } else {
      out.violated.set(a);
      out.witness[a] = (*violator)[a];
    }
  }
  return out;
}

DualTrivialPair dual_trivial_pair(const ConditionalSet& set,
                                  const std::optional<std::vector<RandomVariable>>& other) {
  const auto& space = set.space();
  const std::size_t n = space.atom_count();
  DualTrivialPair out{GSet(n), GSet(n), std::nullopt};
  RandomVariable witness = RandomVariable::Zero(space.outcome_count());
  for (std::size_t a = 0; a < n; ++a) {
    std::optional<VectorQ> escaping;
    if (!other) {
      escaping = set.atom_outside_point(a);
    } else {
      for (const auto& y : *other) {
        space.check_rv(y, "dual_trivial_pair point");
        VectorQ local = space.restrict(y, a);
        if (!set.atom_contains(a, local)) {
          escaping = std::move(local);
          break;
        }
      }
      if (!escaping && !other->empty()) space.assign(witness, a, space.restrict(other->front(), a));
    }
    if (escaping) {
      out.unmatched.set(a);
      space.assign(witness, a, *escaping);
    } else {
      out.matched.set(a);
    }
  }
  if (!out.unmatched.empty()) out.witness = std::move(witness);
  return out;
}

std::optional<SeparationCertificate> separate(const ConditionalSet& set, const RandomVariable& x,
                                              const std::optional<GSet>& region) {
  const auto& space = set.space();
  space.check_rv(x);
  const GSet target = region ? *region : trivial_region(set).nontrivial;
  space.check_atoms(target.size(), "separation region");
  SeparationCertificate cert{RandomVariable::Zero(space.outcome_count()),
                             ExtendedVector(space.atom_count(), Extended(Rational(0))), target,
                             SeparationGrade::Strict};
  for (std::size_t a = 0; a < space.atom_count(); ++a) {
    if (!target.contains(a)) continue;
    const VectorQ local = space.restrict(x, a);
    const VectorQ& w = space.conditional_weights(a);

    if (set.has_generators()) {
      const auto& g = set.generators()[a];
      if (g.full) return std::nullopt;
      const auto sep = separate_point_from_atomwise_polytope(local, g.vertices, g.rays, w);
      if (!sep) return std::nullopt;
      space.assign(cert.functional, a, sep->functional);
      cert.margin[a] = Extended(sep->margin);
      continue;
    }

    const auto hs = set.local_halfspaces(a);
    if (!halfspace_interior_point(hs, w)) {
      cert.margin[a] = Extended::pos_inf();
      continue;
    }
    std::optional<std::pair<VectorQ, Rational>> best;
    for (const auto& h : hs) {
      if (satisfies(h, local, w) || h.density.isZero()) continue;
      const VectorQ z = h.density / h.density.cwiseAbs().sum();
      const Extended sup = halfspace_support(hs, w, z);
      const Rational margin = local_pairing(local, z, w) - sup.value();
      if (!best || margin > best->second) best.emplace(z, margin);
    }
    if (!best) return std::nullopt;
    if (best->second == 0) cert.grade = SeparationGrade::Boundary;
    space.assign(cert.functional, a, best->first);
    cert.margin[a] = Extended(best->second);
  }
  return cert;
}

bool verify_separation(const ConditionalSet& set, const RandomVariable& x, const SeparationCertificate& cert) {
  const auto& space = set.space();
  for (std::size_t a = 0; a < space.atom_count(); ++a) {
    if (!cert.region.contains(a)) continue;
    const VectorQ local = space.restrict(x, a);
    const VectorQ z = space.restrict(cert.functional, a);
    const VectorQ& w = space.conditional_weights(a);
    const Extended sup = set.atom_support(a, z);
    if (sup.is_neg_inf()) {
      if (!cert.margin[a].is_pos_inf()) return false;
      continue;
    }
    if (!sup.finite() || !cert.margin[a].finite()) return false;
    const Rational gap = local_pairing(local, z, w) - sup.value();
    if (gap < cert.margin[a].value()) return false;
    if (gap > 0) continue;
    // Zero gap is only acceptable on an open set that never attains the bound.
    if (cert.grade != SeparationGrade::Boundary || set.has_generators()) return false;
    if (set.atom_contains(a, local)) return false;
    if (attained_in_open_set(set.local_halfspaces(a), w, z, local_pairing(local, z, w))) return false;
  }
  return true;
}

}  // namespace condual
