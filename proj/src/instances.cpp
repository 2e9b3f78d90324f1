#include "condual/instances.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace condual {

SpacePtr random_space(Rng& rng, const SpaceShape& shape) {
  const std::size_t atoms_wanted = 1 + rng.below(shape.max_atoms);
  const Index lo = static_cast<Index>(atoms_wanted);
  const Index hi = std::min(shape.max_outcomes, static_cast<Index>(atoms_wanted) * shape.max_atom_size);
  const Index n = lo + static_cast<Index>(rng.below(static_cast<std::size_t>(hi - lo + 1)));

  // Sizes: one outcome each, then the rest dealt to atoms with room left.
  std::vector<Index> sizes(atoms_wanted, 1);
  for (Index left = n - lo; left > 0; --left) {
    std::size_t a = rng.below(atoms_wanted);
    while (sizes[a] >= shape.max_atom_size) a = (a + 1) % atoms_wanted;
    ++sizes[a];
  }
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);

  std::vector<std::vector<Index>> atoms;
  std::size_t next = 0;
  for (Index s : sizes) {
    std::vector<Index> atom(order.begin() + static_cast<std::ptrdiff_t>(next),
                            order.begin() + static_cast<std::ptrdiff_t>(next + static_cast<std::size_t>(s)));
    std::sort(atom.begin(), atom.end());
    atoms.push_back(std::move(atom));
    next += static_cast<std::size_t>(s);
  }

  VectorQ probs(n);
  Rational total(0);
  for (Index i = 0; i < n; ++i) total += (probs(i) = Rational(rng.between(1, 9)));
  probs /= total;
  std::vector<std::string> names;
  for (Index i = 0; i < n; ++i) names.push_back("w" + std::to_string(i + 1));
  return std::make_shared<const FiniteSpace>(std::move(names), std::move(probs), std::move(atoms));
}

GSet random_gset(std::size_t atoms, Rng& rng) {
  GSet s(atoms);
  for (std::size_t a = 0; a < atoms; ++a) s.set(a, rng.coin());
  return s;
}

ExtendedVector random_extended(std::size_t atoms, Rng& rng) {
  ExtendedVector y(atoms);
  for (auto& v : y) {
    const auto roll = rng.below(10);
    if (roll == 0) v = Extended::pos_inf();
    else if (roll == 1) v = Extended::neg_inf();
    else v = Extended(Rational(rng.between(-3, 3), 2));
  }
  return y;
}

std::vector<ExtendedVector> random_family(std::size_t atoms, Rng& rng, std::size_t max_members) {
  std::vector<ExtendedVector> family(1 + rng.below(max_members));
  for (auto& y : family) y = random_extended(atoms, rng);
  return family;
}

namespace {

std::vector<VectorQ> random_points(Index d, std::size_t count, Rng& rng, long span) {
  std::vector<VectorQ> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(rng.vector(d, span));
  return out;
}

VectorQ nonzero_vector(Index d, Rng& rng) {
  for (;;) {
    VectorQ v(d);
    for (Index i = 0; i < d; ++i) v(i) = Rational(rng.between(-3, 3));
    if (!v.isZero()) return v;
  }
}

}  // namespace

ConditionalSet random_generator_set(const SpacePtr& space, Rng& rng, bool allow_full) {
  std::vector<AtomGenerators> atoms(space->atom_count());
  for (std::size_t a = 0; a < atoms.size(); ++a) {
    if (allow_full && rng.below(6) == 0) {
      atoms[a] = AtomGenerators::whole();
      continue;
    }
    const Index d = space->atom_size(a);
    atoms[a].vertices = random_points(d, 1 + rng.below(4), rng, 3);
    if (rng.below(3) == 0)
      for (std::size_t r = 0, k = 1 + rng.below(2); r < k; ++r) atoms[a].rays.push_back(nonzero_vector(d, rng));
  }
  return ConditionalSet::from_generators(space, std::move(atoms));
}

ConditionalSet random_cone(const SpacePtr& space, Rng& rng) {
  std::vector<AtomGenerators> atoms(space->atom_count());
  for (std::size_t a = 0; a < atoms.size(); ++a) {
    const Index d = space->atom_size(a);
    atoms[a].vertices = {VectorQ::Zero(d)};
    for (std::size_t r = 0, k = 1 + rng.below(4); r < k; ++r) atoms[a].rays.push_back(nonzero_vector(d, rng));
  }
  return ConditionalSet::from_generators(space, std::move(atoms));
}

ConditionalSet random_set_with_origin(const SpacePtr& space, Rng& rng) {
  std::vector<AtomGenerators> atoms(space->atom_count());
  for (std::size_t a = 0; a < atoms.size(); ++a) {
    const Index d = space->atom_size(a);
    atoms[a].vertices = random_points(d, rng.below(4), rng, 3);
    atoms[a].vertices.push_back(VectorQ::Zero(d));
    if (rng.below(4) == 0) atoms[a].rays.push_back(nonzero_vector(d, rng));
  }
  return ConditionalSet::from_generators(space, std::move(atoms));
}

RandomVariable random_outside_point(const ConditionalSet& set, Rng& rng) {
  const auto& space = set.space();
  const GSet nontrivial = trivial_region(set).nontrivial;
  if (nontrivial.empty()) throw std::invalid_argument("random_outside_point: the set is the whole space");
  RandomVariable x = rng.vector(space.outcome_count(), 6);
  for (std::size_t a = 0; a < space.atom_count(); ++a) {
    if (!nontrivial.contains(a)) continue;
    std::optional<VectorQ> out;
    for (int tries = 0; tries < 8 && !out; ++tries) {
      VectorQ local = rng.vector(space.atom_size(a), 6);
      if (!set.atom_contains(a, local)) out = std::move(local);
    }
    if (!out) out = set.atom_outside_point(a);
    space.assign(x, a, *out);
  }
  return x;
}

const char* to_string(Family family) {
  switch (family) {
    case Family::Linear: return "linear";
    case Family::WorstCase: return "worstcase";
    case Family::ConvexPL: return "convexpl";
    case Family::Transformed: return "transformed";
  }
  return "?";
}

Family parse_family(std::string_view text) {
  for (Family f : all_families)
    if (text == to_string(f)) return f;
  throw std::invalid_argument("unknown map family '" + std::string(text) + "'");
}

Transform random_transform(Rng& rng) {
  std::vector<std::pair<Rational, Rational>> points;
  Rational t(rng.between(-4, 2)), g(rng.between(-4, 4));
  for (std::size_t i = 0, k = 1 + rng.below(3); i < k; ++i) {
    points.emplace_back(t, g);
    t += rng.positive(3);
    g += Rational(rng.between(0, 6), 2);
  }
  const Rational left = rng.coin() ? Rational(0) : rng.positive(2);
  const Rational right = rng.coin() ? Rational(0) : rng.positive(2);
  return Transform(std::move(points), left, right);
}

Descriptor random_descriptor(const FiniteSpace& space, std::size_t atom, Family family, Rng& rng) {
  const Index d = space.atom_size(atom);
  const auto pieces = [&] {
    ConvexPL f;
    for (std::size_t j = 0, k = 1 + rng.below(3); j < k; ++j) f.pieces.push_back({rng.vector(d, 3), rng.rational(3)});
    return f;
  };
  switch (family) {
    case Family::Linear: return Linear{rng.vector(d, 3), rng.rational(3)};
    case Family::WorstCase: return WorstCase{};
    case Family::ConvexPL: return pieces();
    case Family::Transformed: {
      ConvexPL inner = rng.coin() ? pieces() : worst_case_pieces(space.conditional_weights(atom));
      return Transformed{random_transform(rng), std::move(inner)};
    }
  }
  throw std::logic_error("unreachable family");
}

QuasiMap random_map(const SpacePtr& space, Family family, Rng& rng, bool infinite_atoms) {
  std::vector<Descriptor> atoms;
  for (std::size_t a = 0; a < space->atom_count(); ++a) {
    if (infinite_atoms && rng.below(4) == 0) atoms.emplace_back(InfiniteAtom{});
    else atoms.push_back(random_descriptor(*space, a, family, rng));
  }
  return QuasiMap(space, std::move(atoms));
}

}  // namespace condual
