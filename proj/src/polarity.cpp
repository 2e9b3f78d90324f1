#include "condual/polarity.hpp"

#include "condual/simplex.hpp"

#include <stdexcept>

namespace condual {

PolarSet polar(const ConditionalSet& set, bool cone) {
  if (!set.has_generators()) throw std::invalid_argument("polar: only generator-form primals are supported");
  const auto& space = set.space();
  PolarSet out{set.space_ptr(), trivial_region(set).nontrivial, cone, {}};
  out.atoms.resize(space.atom_count());
  for (std::size_t a = 0; a < space.atom_count(); ++a) {
    if (!out.base.contains(a)) continue;
    const auto& g = set.generators()[a];
    if (cone) {
      if (!g.convex || g.vertices.size() != 1 || !g.vertices.front().isZero())
        throw std::invalid_argument("polar: cone form requires the origin as the only vertex on atom '" +
                                    space.atom_names()[a] + "'");
    } else {
      for (const auto& v : g.vertices) out.atoms[a].push_back({v, Rational(1), true});
    }
    for (const auto& r : g.rays) out.atoms[a].push_back({r, Rational(0), false});
  }
  return out;
}

bool polar_membership(const PolarSet& polar, const RandomVariable& z) {
  const auto& space = *polar.space;
  space.check_rv(z, "polar probe");
  for (std::size_t a = 0; a < space.atom_count(); ++a) {
    if (!polar.base.contains(a)) continue;
    const VectorQ local = space.restrict(z, a);
    const VectorQ& w = space.conditional_weights(a);
    for (const auto& h : polar.atoms[a]) {
      const Rational lhs = local_pairing(local, h.density, w);
      if (h.strict ? !(lhs < h.level) : lhs > h.level) return false;
    }
  }
  return true;
}

namespace {

using LP = lp::LinearProgram<Rational>;

// max ⟨v, w⟩ over the closed relaxation of the atom's polar constraints.
lp::Outcome<Rational> polar_support(const std::vector<LocalHalfSpace>& hs, const VectorQ& weights, const VectorQ& v) {
  LP program(lp::Sense::Maximize, weights.cwiseProduct(v));
  for (const auto& h : hs) program.add(weights.cwiseProduct(h.density), lp::Relation::LessEqual, h.level);
  return lp::solve(program);
}

// Some w of the open polar attaining ⟨v, w⟩ = 1, if any.
std::optional<VectorQ> open_maximizer(const std::vector<LocalHalfSpace>& hs, const VectorQ& weights, const VectorQ& v) {
  const Index d = weights.size();
  LP program(lp::Sense::Maximize, VectorQ::Zero(d + 1));
  program.objective(d) = 1;
  for (const auto& h : hs) {
    VectorQ row(d + 1);
    row.head(d) = weights.cwiseProduct(h.density);
    row(d) = h.strict ? 1 : 0;
    program.add(std::move(row), lp::Relation::LessEqual, h.level);
  }
  VectorQ face(d + 1);
  face.head(d) = weights.cwiseProduct(v);
  face(d) = 0;
  program.add(std::move(face), lp::Relation::Equal, Rational(1));
  VectorQ cap = VectorQ::Zero(d + 1);
  cap(d) = 1;
  program.add(std::move(cap), lp::Relation::LessEqual, Rational(1));
  const auto outcome = lp::solve(program);
  const auto* opt = std::get_if<lp::Optimal<Rational>>(&outcome);
  if (opt == nullptr || opt->value <= 0) return std::nullopt;
  return VectorQ(opt->point.head(d));
}

}  // namespace

BipolarDecision bipolar_test(const ConditionalSet& set, const RandomVariable& v, bool cone) {
  const auto& space = set.space();
  space.check_rv(v, "bipolar probe");
  if (!membership(set, RandomVariable::Zero(space.outcome_count())))
    throw std::invalid_argument("bipolar: the set must contain 0");
  const PolarSet p = polar(set, cone);
  for (std::size_t a = 0; a < space.atom_count(); ++a) {
    if (!p.base.contains(a)) continue;
    const VectorQ local = space.restrict(v, a);
    const VectorQ& w = space.conditional_weights(a);
    const auto outcome = polar_support(p.atoms[a], w, local);

    std::optional<VectorQ> witness;
    if (const auto* unb = std::get_if<lp::Unbounded<Rational>>(&outcome)) {
      if (cone) {
        witness = unb->ray;
      } else {
        // Walk along the ray until ⟨v, w⟩ = 2, then pull back toward 0 to
        // land in the open polar with ⟨v, w⟩ = 3/2.
        const Rational at = local_pairing(local, unb->point, w);
        const Rational slope = local_pairing(local, unb->ray, w);
        const Rational t = at >= 2 ? Rational(0) : (Rational(2) - at) / slope;
        const VectorQ far = unb->point + t * unb->ray;
        witness = far * (Rational(3, 2) / local_pairing(local, far, w));
      }
    } else if (const auto* opt = std::get_if<lp::Optimal<Rational>>(&outcome)) {
      if (!cone && opt->value > 1) {
        const Rational lambda = (1 + 1 / opt->value) / 2;
        witness = lambda * opt->point;
      } else if (!cone && opt->value == 1) {
        witness = open_maximizer(p.atoms[a], w, local);
      }
    }
    if (witness) {
      RandomVariable z = RandomVariable::Zero(space.outcome_count());
      space.assign(z, a, *witness);
      return {false, a, std::move(z)};
    }
  }
  return {};
}

bool bipolar_membership(const ConditionalSet& set, const RandomVariable& v, bool cone) {
  return bipolar_test(set, v, cone).member;
}

BipolarReport bipolar_check(const ConditionalSet& set, Rng& rng, bool cone, std::size_t nonmember_target) {
  const auto& space = set.space();
  const auto& atoms = set.generators();
  BipolarReport report;

  std::size_t widest = 1;
  for (const auto& g : atoms) widest = std::max({widest, g.vertices.size(), g.rays.size()});
  Rational bound(1);
  for (const auto& g : atoms) {
    for (const auto& v : g.vertices) bound = std::max(bound, Rational(v.cwiseAbs().maxCoeff()));
    for (const auto& r : g.rays) bound = std::max(bound, Rational(r.cwiseAbs().maxCoeff()));
  }

  const auto generator_point = [&](std::size_t k, bool with_ray) {
    RandomVariable x = RandomVariable::Zero(space.outcome_count());
    for (std::size_t a = 0; a < atoms.size(); ++a) {
      const auto& g = atoms[a];
      if (g.full) continue;
      VectorQ local = g.vertices[k % g.vertices.size()];
      if (with_ray && !g.rays.empty()) local += g.rays[k % g.rays.size()];
      space.assign(x, a, local);
    }
    return x;
  };
  for (std::size_t k = 0; k < widest; ++k)
    for (bool with_ray : {false, true}) {
      const RandomVariable x = generator_point(k, with_ray);
      ++report.generators_checked;
      auto decision = bipolar_test(set, x, cone);
      if (!decision.member)
        report.discrepancies.push_back({"generator-not-in-bipolar", x, std::move(decision.functional)});
    }

  // Probes: midpoints of generator pairs, stretched generators and random
  // points in a box around the generators, mixed atom by atom.
  const std::size_t max_draws = 50 * nonmember_target + 100;
  while (report.nonmember_probes < nonmember_target && report.probes_drawn < max_draws) {
    ++report.probes_drawn;
    RandomVariable x(space.outcome_count());
    for (std::size_t a = 0; a < atoms.size(); ++a) {
      const auto& g = atoms[a];
      const Index d = space.atom_size(a);
      VectorQ local;
      const auto kind = rng.below(3);
      if (g.full || kind == 2) {
        local = rng.vector(d, 2 * bound + 1);
      } else if (kind == 0) {
        const auto& v1 = g.vertices[rng.below(g.vertices.size())];
        const auto& v2 = g.vertices[rng.below(g.vertices.size())];
        local = (v1 + v2) / 2;
      } else {
        local = g.vertices[rng.below(g.vertices.size())] * Rational(static_cast<long>(2 + rng.below(3)));
        if (!g.rays.empty() && rng.below(2) == 0) local -= g.rays[rng.below(g.rays.size())];
      }
      space.assign(x, a, local);
    }
    if (membership(set, x)) {
      if (!bipolar_membership(set, x, cone))
        report.discrepancies.push_back({"member-not-in-bipolar", x, bipolar_test(set, x, cone).functional});
      continue;
    }
    ++report.nonmember_probes;
    if (bipolar_membership(set, x, cone)) report.discrepancies.push_back({"nonmember-in-bipolar", x, std::nullopt});
  }
  return report;
}

}  // namespace condual
