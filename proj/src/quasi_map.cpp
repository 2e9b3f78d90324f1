#include "condual/quasi_map.hpp"

#include "condual/simplex.hpp"

#include <algorithm>
#include <stdexcept>

namespace condual {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

Rational piece_max(const ConvexPL& f, const VectorQ& v, const VectorQ& weights) {
  Rational best = local_pairing(f.pieces.front().slope, v, weights) + f.pieces.front().offset;
  for (const auto& p : f.pieces) best = std::max(best, local_pairing(p.slope, v, weights) + p.offset);
  return best;
}

void check_pieces(const ConvexPL& f, Index d, const std::string& atom) {
  if (f.pieces.empty()) throw std::invalid_argument("map on atom '" + atom + "': convex piecewise map without pieces");
  for (const auto& p : f.pieces)
    if (p.slope.size() != d) throw std::invalid_argument("map on atom '" + atom + "': piece dimension mismatch");
}

}  // namespace

Transform::Transform(std::vector<std::pair<Rational, Rational>> breakpoints, Rational left_slope, Rational right_slope)
    : points_(std::move(breakpoints)), left_(std::move(left_slope)), right_(std::move(right_slope)) {
  if (points_.empty()) throw std::invalid_argument("transform: at least one breakpoint is required");
  if (left_ < 0 || right_ < 0) throw std::invalid_argument("transform: end slopes must be nonnegative");
  for (std::size_t i = 1; i < points_.size(); ++i) {
    if (points_[i].first <= points_[i - 1].first)
      throw std::invalid_argument("transform: breakpoints must be strictly increasing");
    if (points_[i].second < points_[i - 1].second) throw std::invalid_argument("transform: values must be nondecreasing");
  }
}

Rational Transform::operator()(const Rational& t) const {
  const auto& [t0, g0] = points_.front();
  const auto& [tn, gn] = points_.back();
  if (t <= t0) return g0 + left_ * (t - t0);
  if (t >= tn) return gn + right_ * (t - tn);
  for (std::size_t i = 1; i < points_.size(); ++i) {
    const auto& [ta, ga] = points_[i - 1];
    const auto& [tb, gb] = points_[i];
    if (t <= tb) return ga + (gb - ga) * (t - ta) / (tb - ta);
  }
  return gn;
}

Extended Transform::at_neg_inf() const {
  return left_ > 0 ? Extended::neg_inf() : Extended(points_.front().second);
}

Extended Transform::at(const Extended& t) const {
  if (t.is_neg_inf()) return at_neg_inf();
  if (t.is_pos_inf()) return right_ > 0 ? Extended::pos_inf() : Extended(points_.back().second);
  return Extended((*this)(t.value()));
}

Transform::Preimage Transform::preimage(const Rational& y, bool strict) const {
  const auto& [t0, g0] = points_.front();
  const auto& [tn, gn] = points_.back();
  const std::size_t n = points_.size();
  if (!strict) {
    if (y >= gn) {
      if (right_ == 0) return {};
      return {false, tn + (y - gn) / right_};
    }
    // Largest breakpoint with g_i ≤ y; the next one lies strictly above y.
    std::size_t i = n;
    while (i > 0 && points_[i - 1].second > y) --i;
    if (i == 0) {
      if (left_ == 0) return {true, std::nullopt};
      return {false, t0 + (y - g0) / left_};
    }
    const auto& [ta, ga] = points_[i - 1];
    const auto& [tb, gb] = points_[i];
    return {false, ta + (y - ga) * (tb - ta) / (gb - ga)};
  }
  if (y > gn) {
    if (right_ == 0) return {};
    return {false, tn + (y - gn) / right_};
  }
  // Smallest breakpoint with g_i ≥ y; the previous one lies strictly below.
  std::size_t i = 0;
  while (points_[i].second < y) ++i;
  if (i == 0) {
    if (left_ == 0) return {true, std::nullopt};
    return {false, t0 - (g0 - y) / left_};
  }
  const auto& [ta, ga] = points_[i - 1];
  const auto& [tb, gb] = points_[i];
  return {false, ta + (y - ga) * (tb - ta) / (gb - ga)};
}

const char* family_name(const Descriptor& d) {
  return std::visit(overloaded{[](const Linear&) { return "linear"; }, [](const WorstCase&) { return "worstcase"; },
                               [](const ConvexPL&) { return "convexpl"; },
                               [](const Transformed&) { return "transformed"; },
                               [](const InfiniteAtom&) { return "infinite"; }},
                    d);
}

ConvexPL worst_case_pieces(const VectorQ& weights) {
  ConvexPL f;
  for (Index i = 0; i < weights.size(); ++i) {
    VectorQ slope = VectorQ::Zero(weights.size());
    slope(i) = 1 / weights(i);
    f.pieces.push_back({std::move(slope), Rational(0)});
  }
  return f;
}

QuasiMap::QuasiMap(SpacePtr space, std::vector<Descriptor> atoms) : space_(std::move(space)), atoms_(std::move(atoms)) {
  space_->check_atoms(atoms_.size(), "map descriptor list");
  for (std::size_t a = 0; a < atoms_.size(); ++a) {
    const Index d = space_->atom_size(a);
    const std::string& name = space_->atom_names()[a];
    std::visit(overloaded{[&](const Linear& f) {
                            if (f.density.size() != d)
                              throw std::invalid_argument("map on atom '" + name + "': density dimension mismatch");
                          },
                          [&](const ConvexPL& f) { check_pieces(f, d, name); },
                          [&](const Transformed& f) { check_pieces(f.inner, d, name); }, [](const auto&) {}},
               atoms_[a]);
  }
}

Extended QuasiMap::eval_atom(std::size_t a, const VectorQ& v) const {
  const VectorQ& w = space_->conditional_weights(a);
  return std::visit(overloaded{[&](const Linear& f) { return Extended(local_pairing(v, f.density, w) + f.offset); },
                               [&](const WorstCase&) { return Extended(Rational(v.maxCoeff())); },
                               [&](const ConvexPL& f) { return Extended(piece_max(f, v, w)); },
                               [&](const Transformed& f) { return Extended(f.g(piece_max(f.inner, v, w))); },
                               [](const InfiniteAtom&) { return Extended::pos_inf(); }},
                    atoms_[a]);
}

ExtendedVector eval(const QuasiMap& map, const RandomVariable& x) {
  const auto& space = map.space();
  space.check_rv(x);
  ExtendedVector out;
  out.reserve(space.atom_count());
  for (std::size_t a = 0; a < space.atom_count(); ++a) out.push_back(map.eval_atom(a, space.restrict(x, a)));
  return out;
}

MapOracle oracle(const QuasiMap& map) {
  return [&map](const RandomVariable& x) { return eval(map, x); };
}

namespace {

GSet random_gset(std::size_t n, Rng& rng) {
  GSet s(n);
  for (std::size_t a = 0; a < n; ++a) s.set(a, rng.coin());
  return s;
}

}  // namespace

RegReport check_reg(const MapOracle& map, const FiniteSpace& space, Rng& rng, std::size_t trials) {
  RegReport report;
  for (std::size_t k = 0; k < trials; ++k) {
    const RandomVariable x = rng.vector(space.outcome_count());
    const RandomVariable y = rng.vector(space.outcome_count());
    const GSet region = k == 0 ? GSet::all(space.atom_count()) : random_gset(space.atom_count(), rng);
    ++report.trials;
    const ExtendedVector pasted = map(concat(x, y, region, space));
    const ExtendedVector plain = map(x);
    for (std::size_t a = 0; a < space.atom_count(); ++a)
      if (region.contains(a) && pasted[a] != plain[a]) {
        ++report.failures;
        if (!report.witness) report.witness = RegWitness{region, x, y};
        break;
      }
  }
  return report;
}

InfinityRegion infinity_region(const QuasiMap& map) {
  // A descriptor is +∞ at one argument iff it is +∞ at every argument, so a
  // single member of {π(ξ)} already decides the maximal set.
  const auto& space = map.space();
  const std::vector<ExtendedVector> family{eval(map, RandomVariable::Zero(space.outcome_count()))};
  const MaximalSet m = maximal_set(family, ExtendedVector(space.atom_count(), Extended::pos_inf()), Relation::Equal);
  return {m.holds_everywhere, m.violated};
}

ConstancyRegion constancy_region(const QuasiMap& map) {
  const auto& space = map.space();
  const std::size_t n = space.atom_count();
  ConstancyRegion out{GSet(n), GSet(n)};
  for (std::size_t a = 0; a < n; ++a) {
    const bool constant = std::visit(
        overloaded{[](const Linear& f) { return f.density.isZero(); }, [](const WorstCase&) { return false; },
                   [](const ConvexPL& f) {
                     return std::all_of(f.pieces.begin(), f.pieces.end(),
                                        [](const AffinePiece& p) { return p.slope.isZero(); });
                   },
                   [&](const Transformed& f) {
                     if (std::all_of(f.inner.pieces.begin(), f.inner.pieces.end(),
                                     [](const AffinePiece& p) { return p.slope.isZero(); }))
                       return true;
                     // Otherwise g must be constant on the range [inf h, ∞).
                     if (f.g.right_slope() != 0) return false;
                     const QuasiMap inner(map.space_ptr(), [&] {
                       std::vector<Descriptor> d(n, InfiniteAtom{});
                       d[a] = f.inner;
                       return d;
                     }());
                     const Extended low = f.g.at(atom_infimum(inner, a).value);
                     return low == Extended(f.g.breakpoints().back().second);
                   },
                   [](const InfiniteAtom&) { return true; }},
        map.atom(a));
    out.constant.set(a, constant);
    out.nonconstant.set(a, !constant);
  }
  return out;
}

AtomInfimum atom_infimum(const QuasiMap& map, std::size_t a, const std::optional<Floor>& floor) {
  const auto& descriptor = map.atom(a);
  if (std::holds_alternative<InfiniteAtom>(descriptor)) return {Extended::pos_inf(), std::nullopt, std::nullopt, std::nullopt};
  const auto& space = map.space();
  const Index d = space.atom_size(a);
  const VectorQ& w = space.conditional_weights(a);

  // Linear: min ⟨v, z_π⟩ over v. Otherwise epigraph form over (v, t).
  const auto* linear = std::get_if<Linear>(&descriptor);
  const Index n = linear ? d : d + 1;
  lp::LinearProgram<Rational> program(lp::Sense::Minimize, VectorQ::Zero(n));
  const ConvexPL* pieces = nullptr;
  ConvexPL worst;
  if (linear) {
    program.objective = w.cwiseProduct(linear->density);
  } else {
    program.objective(d) = 1;
    if (const auto* f = std::get_if<ConvexPL>(&descriptor)) pieces = f;
    else if (const auto* f = std::get_if<Transformed>(&descriptor)) pieces = &f->inner;
    else pieces = &(worst = worst_case_pieces(w));
    for (const auto& p : pieces->pieces) {
      VectorQ row(n);
      row.head(d) = w.cwiseProduct(p.slope);
      row(d) = -1;
      program.add(std::move(row), lp::Relation::LessEqual, Rational(-p.offset));
    }
  }
  if (floor) {
    VectorQ row = VectorQ::Zero(n);
    row.head(d) = w.cwiseProduct(floor->density);
    program.add(std::move(row), lp::Relation::GreaterEqual, floor->level);
  }

  const auto outcome = lp::solve(program);
  AtomInfimum out;
  if (std::holds_alternative<lp::Infeasible>(outcome)) {
    out.value = Extended::pos_inf();
    return out;
  }
  const auto* transformed = std::get_if<Transformed>(&descriptor);
  if (const auto* unb = std::get_if<lp::Unbounded<Rational>>(&outcome)) {
    out.base = VectorQ(unb->point.head(d));
    out.ray = VectorQ(unb->ray.head(d));
    out.value = transformed ? transformed->g.at_neg_inf() : Extended::neg_inf();
    return out;
  }
  const auto& opt = std::get<lp::Optimal<Rational>>(outcome);
  out.point = VectorQ(opt.point.head(d));
  const Rational inner = linear ? Rational(opt.value + linear->offset) : opt.value;
  out.value = transformed ? Extended(transformed->g(inner)) : Extended(inner);
  return out;
}

std::optional<VectorQ> descend_below(const QuasiMap& map, std::size_t a, const std::optional<Floor>& floor,
                                     const Rational& alpha) {
  const AtomInfimum inf = atom_infimum(map, a, floor);
  if (inf.value >= Extended(alpha)) return std::nullopt;
  if (inf.point) return inf.point;
  // Unbounded descent: π_a is convex (or a monotone transform of convex) and
  // decreasing along the ray, so doubling the step crosses alpha.
  Rational step(1);
  for (int k = 0; k < 256; ++k, step *= 2) {
    VectorQ v = *inf.base + step * *inf.ray;
    if (map.eval_atom(a, v) < Extended(alpha)) return v;
  }
  return std::nullopt;
}

ConditionalSet level_set(const QuasiMap& map, const LevelSetSpec& spec) {
  const auto& space = map.space();
  const std::size_t n = space.atom_count();
  space.check_atoms(spec.level.size(), "level");
  const GSet region = spec.region ? *spec.region : GSet::all(n);
  space.check_atoms(region.size(), "level-set region");

  std::vector<HalfSpace> hs;
  const auto add = [&](std::size_t a, const VectorQ& local, const Rational& level, bool strict) {
    RandomVariable density = RandomVariable::Zero(space.outcome_count());
    space.assign(density, a, local);
    ExtendedVector levels(n, Extended::pos_inf());
    levels[a] = Extended(level);
    hs.push_back({std::move(density), std::move(levels), strict});
  };
  const auto add_empty = [&](std::size_t a) { add(a, VectorQ::Zero(space.atom_size(a)), Rational(-1), false); };
  const auto add_pieces = [&](std::size_t a, const ConvexPL& f, const Rational& level) {
    for (const auto& p : f.pieces) add(a, p.slope, level - p.offset, spec.strict);
  };

  for (std::size_t a = 0; a < n; ++a) {
    const Extended& y = spec.level[a];
    if (!region.contains(a) || y.is_pos_inf()) continue;
    if (y.is_neg_inf()) {
      add_empty(a);
      continue;
    }
    const Rational& level = y.value();
    const VectorQ& w = space.conditional_weights(a);
    std::visit(overloaded{[&](const Linear& f) { add(a, f.density, level - f.offset, spec.strict); },
                          [&](const WorstCase&) { add_pieces(a, worst_case_pieces(w), level); },
                          [&](const ConvexPL& f) { add_pieces(a, f, level); },
                          [&](const Transformed& f) {
                            const auto pre = f.g.preimage(level, spec.strict);
                            if (pre.empty) add_empty(a);
                            else if (pre.bound) add_pieces(a, f.inner, *pre.bound);
                          },
                          [&](const InfiniteAtom&) {
                            // π 1_{T_π} vanishes here: the constraint reads 0 ≤ Y (0 < Y).
                            if (spec.strict ? level <= 0 : level < 0) add_empty(a);
                          }},
               map.atom(a));
  }
  return ConditionalSet::from_halfspaces(map.space_ptr(), std::move(hs));
}

QcoReport check_qco(const MapOracle& map, const FiniteSpace& space, Rng& rng, std::size_t trials) {
  QcoReport report;
  for (std::size_t k = 0; k < trials; ++k) {
    const RandomVariable x1 = rng.vector(space.outcome_count());
    const RandomVariable x2 = rng.vector(space.outcome_count());
    AtomVector lambda(static_cast<Index>(space.atom_count()));
    for (Index a = 0; a < lambda.size(); ++a) lambda(a) = Rational(rng.between(0, 8), 8);
    const AtomVector rest = AtomVector::Ones(lambda.size()) - lambda;
    const RandomVariable mix = scale(lambda, x1, space) + scale(rest, x2, space);
    ++report.trials;
    const ExtendedVector at_mix = map(mix), at1 = map(x1), at2 = map(x2);
    for (std::size_t a = 0; a < space.atom_count(); ++a)
      if (at_mix[a] > max(at1[a], at2[a])) {
        ++report.failures;
        if (!report.witness) report.witness = QcoWitness{x1, x2, lambda, a};
        break;
      }
  }
  return report;
}

EqcReport check_eqc(const QuasiMap& map, Rng& rng, std::size_t trials) {
  const auto& space = map.space();
  const std::size_t n = space.atom_count();
  EqcReport report;
  for (std::size_t k = 0; k < trials; ++k) {
    ++report.trials;
    const ExtendedVector anchor = eval(map, rng.vector(space.outcome_count()));
    ExtendedVector level(n);
    for (std::size_t a = 0; a < n; ++a) {
      if (rng.below(8) == 0 || !anchor[a].finite()) level[a] = Extended::pos_inf();
      else level[a] = anchor[a] + rng.rational(2);
    }
    const bool strict = rng.coin();
    const ConditionalSet u = level_set(map, {level, strict, std::nullopt});
    const GSet nontrivial = trivial_region(u).nontrivial;
    if (nontrivial.empty()) continue;

    RandomVariable x = rng.vector(space.outcome_count());
    for (std::size_t a = 0; a < n; ++a) {
      if (!nontrivial.contains(a) || !u.atom_contains(a, space.restrict(x, a))) continue;
      std::optional<VectorQ> out;
      for (int tries = 0; tries < 8 && !out; ++tries) {
        VectorQ local = rng.vector(space.atom_size(a), 8);
        if (!u.atom_contains(a, local)) out = std::move(local);
      }
      if (!out) out = u.atom_outside_point(a);
      space.assign(x, a, *out);
    }
    const auto cert = separate(u, x);
    if (cert && verify_separation(u, x, *cert)) {
      ++report.separations;
      continue;
    }
    ++report.failures;
    if (!report.witness) report.witness = EqcWitness{level, strict, x};
  }
  return report;
}

}  // namespace condual
