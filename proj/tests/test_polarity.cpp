#include "condual/instances.hpp"
#include "condual/polarity.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace condual;
using condual::testing::rv;
using condual::testing::space4;

namespace {

ConditionalSet symmetric_box(const SpacePtr& s) {
  AtomGenerators g;
  g.vertices = {make_vector({-1, -1}), make_vector({1, -1}), make_vector({-1, 1}), make_vector({1, 1})};
  return ConditionalSet::from_generators(s, {g, g});
}

ConditionalSet orthant(const SpacePtr& s) {
  AtomGenerators g;
  g.vertices = {make_vector({0, 0})};
  g.rays = {make_vector({1, 0}), make_vector({0, 1})};
  return ConditionalSet::from_generators(s, {g, g});
}

std::vector<RandomVariable> grid_probes(Index n, int steps, const Rational& unit) {
  std::vector<RandomVariable> out;
  std::vector<int> idx(static_cast<std::size_t>(n), -steps);
  for (;;) {
    RandomVariable z(n);
    for (Index i = 0; i < n; ++i) z(i) = unit * idx[static_cast<std::size_t>(i)];
    out.push_back(z);
    std::size_t k = 0;
    while (k < idx.size() && idx[k] == steps) idx[k++] = -steps;
    if (k == idx.size()) return out;
    ++idx[k];
  }
}

}  // namespace

TEST_CASE("polar of the symmetric box matches vertex enumeration") {
  const auto s = space4();
  const auto p = polar(symmetric_box(s), false);
  int inside = 0;
  for (const auto& z : grid_probes(4, 3, q(2, 3))) {
    bool expected = true;
    for (std::size_t a = 0; a < 2; ++a) {
      const VectorQ zl = s->restrict(z, a);
      Rational top(-1000);
      for (int s1 : {-1, 1})
        for (int s2 : {-1, 1}) top = std::max(top, Rational(s1 * zl(0) + s2 * zl(1)) / 2);
      expected = expected && top < 1;
    }
    CHECK(polar_membership(p, z) == expected);
    inside += expected;
  }
  CHECK(inside > 0);
  // On each atom the polar is |z1| + |z2| < 2.
  CHECK(polar_membership(p, rv({1, q(9, 10), 0, 0})));
  CHECK_FALSE(polar_membership(p, rv({1, 1, 0, 0})));
  CHECK_FALSE(polar_membership(p, rv({3, 0, 0, 0})));
  CHECK(polar_membership(p, RandomVariable::Zero(4)));
}

TEST_CASE("polar of the nonnegative orthant is the nonpositive orthant") {
  const auto s = space4();
  const auto p = polar(orthant(s), true);
  for (const auto& z : grid_probes(4, 1, q(1))) {
    const bool expected = (z.array() <= Rational(0)).all();
    CHECK(polar_membership(p, z) == expected);
  }
}

TEST_CASE("polar input errors") {
  const auto s = space4();
  const auto h = ConditionalSet::from_halfspaces(s, {{rv({1, 1, 1, 1}), {Extended(1), Extended(1)}, true}});
  CHECK_THROWS_AS(polar(h, false), std::invalid_argument);
  CHECK_THROWS_AS(polar(symmetric_box(s), true), std::invalid_argument);
  AtomGenerators away;
  away.vertices = {make_vector({1, 1})};
  CHECK_THROWS_AS(bipolar_membership(ConditionalSet::from_generators(s, {away, away}), rv({0, 0, 0, 0})),
                  std::invalid_argument);
}

TEST_CASE("bipolar membership examples") {
  const auto s = space4();
  const auto box = symmetric_box(s);
  for (const auto& u : box.generators()[0].vertices)
    for (const auto& v : box.generators()[1].vertices) {
      RandomVariable x(4);
      x << u, v;
      CHECK(bipolar_membership(box, x));
    }
  const auto far = bipolar_test(box, rv({2, 2, 0, 0}));
  CHECK_FALSE(far.member);
  REQUIRE(far.functional);
  REQUIRE(far.atom);
  CHECK(*far.atom == 0);
  // The functional lies in C° and pairs with the probe at least 1.
  CHECK(polar_membership(polar(box, false), *far.functional));
  CHECK(pairing(rv({2, 2, 0, 0}), *far.functional, *s)(0) >= 1);

  const auto cone = orthant(s);
  CHECK(bipolar_membership(cone, rv({3, q(1, 2), 0, 7}), true));
  CHECK_FALSE(bipolar_membership(cone, rv({-1, 0, 0, 0}), true));
}

TEST_CASE("bipolar_check: cones, the origin and a non-convex pair") {
  const auto s = space4();
  Rng rng(41);
  CHECK(bipolar_check(orthant(s), rng, true).passed());

  AtomGenerators origin;
  origin.vertices = {make_vector({0, 0})};
  const auto zero = ConditionalSet::from_generators(s, {origin, origin});
  const auto rz = bipolar_check(zero, rng);
  CHECK(rz.passed());
  CHECK(rz.nonmember_probes >= 100);

  AtomGenerators pair;
  pair.vertices = {make_vector({0, 0}), make_vector({2, 2})};
  pair.convex = false;
  const auto two = ConditionalSet::from_generators(s, {pair, pair});
  const auto rt = bipolar_check(two, rng);
  CHECK_FALSE(rt.passed());
  bool found = false;
  for (const auto& d : rt.discrepancies) found = found || d.kind == "nonmember-in-bipolar";
  CHECK(found);
}

TEST_CASE("random sets with the origin lie in their bipolar") {
  Rng rng(42);
  for (int trial = 0; trial < 40; ++trial) {
    const auto sp = random_space(rng, {6, 3, 3});
    const auto set = random_set_with_origin(sp, rng);
    const auto report = bipolar_check(set, rng, false, 30);
    CHECK(report.passed());
    CHECK(report.generators_checked > 0);
  }
}

TEST_CASE("cone polars: strict and nonpositive forms agree, scaling invariance") {
  Rng rng(43);
  for (int trial = 0; trial < 100; ++trial) {
    const auto sp = random_space(rng, {6, 3, 3});
    const auto cone = random_cone(sp, rng);
    const auto strict = polar(cone, false);
    const auto flat = polar(cone, true);
    for (int probe = 0; probe < 10; ++probe) {
      RandomVariable z = rng.vector(sp->outcome_count(), 3);
      if (probe % 3 == 0) {
        // Push z into the polar on some atoms by flipping it against a ray.
        for (std::size_t a = 0; a < sp->atom_count(); ++a) {
          const auto& g = cone.generators()[a];
          if (!g.full && !g.rays.empty()) sp->assign(z, a, -g.rays.front());
        }
      }
      const bool in = polar_membership(flat, z);
      CHECK(polar_membership(strict, z) == in);
      AtomVector lambda(static_cast<Index>(sp->atom_count()));
      for (Index a = 0; a < lambda.size(); ++a) lambda(a) = rng.positive(5);
      CHECK(polar_membership(flat, scale(lambda, z, *sp)) == in);
    }
  }
}
