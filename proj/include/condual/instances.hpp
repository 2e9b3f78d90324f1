#pragma once

// Seeded random instances at desk scale: spaces with up to 8 outcomes and
// 4 atoms, generator sets and cones, and maps from every descriptor family.

#include "condual/conditional_set.hpp"
#include "condual/quasi_map.hpp"
#include "condual/random.hpp"

#include <array>
#include <string_view>

namespace condual {

struct SpaceShape {
  Index max_outcomes = 8;
  std::size_t max_atoms = 4;
  Index max_atom_size = 8;
};

SpacePtr random_space(Rng& rng, const SpaceShape& shape = {});

GSet random_gset(std::size_t atoms, Rng& rng);

/// A nonempty family of random G-measurable extended vectors, with
/// occasional infinite entries.
std::vector<ExtendedVector> random_family(std::size_t atoms, Rng& rng, std::size_t max_members = 5);
ExtendedVector random_extended(std::size_t atoms, Rng& rng);

/// conv(vertices) + cone(rays) per atom, occasionally FULL.
ConditionalSet random_generator_set(const SpacePtr& space, Rng& rng, bool allow_full = true);

/// Cone per atom: the origin plus 1 to 4 rays.
ConditionalSet random_cone(const SpacePtr& space, Rng& rng);

/// Convex set containing 0 (the origin is always one of the vertices).
ConditionalSet random_set_with_origin(const SpacePtr& space, Rng& rng);

/// A point outside `set` on every atom of D_C. Requires D_C nonempty.
RandomVariable random_outside_point(const ConditionalSet& set, Rng& rng);

enum class Family { Linear, WorstCase, ConvexPL, Transformed };
inline constexpr std::array<Family, 4> all_families{Family::Linear, Family::WorstCase, Family::ConvexPL,
                                                    Family::Transformed};
const char* to_string(Family family);
Family parse_family(std::string_view text);

Descriptor random_descriptor(const FiniteSpace& space, std::size_t atom, Family family, Rng& rng);
Transform random_transform(Rng& rng);

/// Map with the given family on every atom; with `infinite_atoms`, some
/// atoms are replaced by InfiniteAtom.
QuasiMap random_map(const SpacePtr& space, Family family, Rng& rng, bool infinite_atoms = false);

}  // namespace condual
