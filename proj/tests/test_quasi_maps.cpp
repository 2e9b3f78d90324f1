#include "condual/instances.hpp"
#include "condual/quasi_map.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace condual;
using condual::testing::rv;
using condual::testing::space4;

namespace {

GSet mask(std::initializer_list<bool> bits) { return GSet(std::vector<bool>(bits)); }

QuasiMap uniform_map(const SpacePtr& s, const Descriptor& d) { return QuasiMap(s, {d, d}); }

Transform clamp_at_5() { return Transform({{5, 5}}, 1, 0); }

ExtendedVector finite(std::initializer_list<Rational> values) {
  ExtendedVector out;
  for (const auto& v : values) out.emplace_back(v);
  return out;
}

}  // namespace

TEST_CASE("eval examples on SPACE4") {
  const auto s = space4();
  CHECK(eval(uniform_map(s, Linear{make_vector({1, 1}), 0}), rv({1, 2, 3, 4})) == finite({q(3, 2), q(7, 2)}));
  CHECK(eval(uniform_map(s, WorstCase{}), rv({1, -3, 2, -2})) == finite({1, 2}));
  const Transformed clamp{clamp_at_5(), worst_case_pieces(s->conditional_weights(0))};
  CHECK(eval(uniform_map(s, clamp), rv({9, 9, 1, 1})) == finite({5, 1}));
  const QuasiMap mixed(s, {InfiniteAtom{}, WorstCase{}});
  CHECK(eval(mixed, rv({0, 0, 3, 1}))[0].is_pos_inf());
  CHECK_THROWS_AS(QuasiMap(s, {Linear{make_vector({1}), 0}, WorstCase{}}), std::invalid_argument);
  CHECK_THROWS_AS(QuasiMap(s, {ConvexPL{}, WorstCase{}}), std::invalid_argument);
}

TEST_CASE("transform validation and preimages") {
  CHECK_THROWS_AS(Transform({{1, 1}, {1, 2}}, 0, 0), std::invalid_argument);
  CHECK_THROWS_AS(Transform({{0, 2}, {1, 1}}, 0, 0), std::invalid_argument);
  CHECK_THROWS_AS(Transform({{0, 0}}, -1, 0), std::invalid_argument);

  const Transform g = clamp_at_5();
  CHECK(g(q(3)) == 3);
  CHECK(g(q(40)) == 5);
  CHECK(g.at_neg_inf().is_neg_inf());
  CHECK(g.preimage(5, false).bound == std::nullopt);
  CHECK_FALSE(g.preimage(5, false).empty);
  CHECK(g.preimage(5, true).bound == q(5));
  CHECK(Transform({{0, 1}}, 0, 0).preimage(0, false).empty);

  // Random transforms against a direct check of the defining inequalities
  // around the returned bound.
  Rng rng(51);
  const Rational delta(1, 1024);
  for (int trial = 0; trial < 300; ++trial) {
    const Transform t = random_transform(rng);
    const Rational y = rng.rational(6);
    for (bool strict : {false, true}) {
      const auto pre = t.preimage(y, strict);
      const auto in = [&](const Rational& v) { return strict ? t(v) < y : t(v) <= y; };
      if (pre.empty) {
        for (long k = -40; k <= 40; ++k) CHECK_FALSE(in(Rational(k, 4)));
        CHECK(strict ? t.at_neg_inf() >= Extended(y) : t.at_neg_inf() > Extended(y));
        continue;
      }
      if (!pre.bound) {
        for (long k = -40; k <= 40; ++k) CHECK(in(Rational(k, 4)));
        continue;
      }
      const Rational& b = *pre.bound;
      CHECK(in(b - delta));
      CHECK(in(b) == !strict);
      CHECK_FALSE(in(b + delta));
    }
  }
}

TEST_CASE("check_reg passes on built-ins and catches a coupling map") {
  Rng rng(52);
  const auto s = space4();
  for (Family f : all_families) CHECK(check_reg(oracle(random_map(s, f, rng, true)), *s, rng).passed());

  // Harness map: atom a1 reads the mean of the other atom.
  const MapOracle coupled = [s](const RandomVariable& x) {
    const AtomVector m = cond_exp(x, *s);
    return ExtendedVector{Extended(Rational(m(1))), Extended(Rational(m(0)))};
  };
  const auto report = check_reg(coupled, *s, rng);
  CHECK_FALSE(report.passed());
  REQUIRE(report.witness);
  const auto& w = *report.witness;
  const auto lhs = coupled(concat(w.x, w.y, w.region, *s));
  const auto rhs = coupled(w.x);
  bool differs = false;
  for (std::size_t a = 0; a < 2; ++a) differs = differs || (w.region.contains(a) && lhs[a] != rhs[a]);
  CHECK(differs);

  // A = Ω: the identity.
  const auto all = coupled(concat(w.x, w.y, GSet::all(2), *s));
  CHECK(all == coupled(w.x));
}

TEST_CASE("infinity and constancy regions") {
  const auto s = space4();
  const QuasiMap none = uniform_map(s, WorstCase{});
  CHECK(infinity_region(none).upsilon.empty());
  CHECK(constancy_region(none).nonconstant.full());

  const QuasiMap first(s, {InfiniteAtom{}, Linear{make_vector({0, 0}), 3}});
  CHECK(infinity_region(first).upsilon == mask({true, false}));
  CHECK(constancy_region(first).constant.full());

  const QuasiMap all = uniform_map(s, InfiniteAtom{});
  CHECK(infinity_region(all).finite.empty());

  const QuasiMap flat(s, {Transformed{Transform({{0, 2}}, 1, 0), ConvexPL{{{make_vector({0, 0}), 7}}}},
                          Transformed{Transform({{0, 2}}, 0, 0), worst_case_pieces(s->conditional_weights(1))}});
  CHECK(constancy_region(flat).constant.full());

  Rng rng(53);
  for (int trial = 0; trial < 200; ++trial) {
    const auto sp = random_space(rng);
    const QuasiMap m = random_map(sp, all_families[rng.below(4)], rng, true);
    const auto inf = infinity_region(m);
    const auto con = constancy_region(m);
    CHECK((inf.upsilon & inf.finite).empty());
    CHECK((inf.upsilon | inf.finite).full());
    CHECK((con.constant & con.nonconstant).empty());
    CHECK((con.constant | con.nonconstant).full());
    CHECK(inf.upsilon.subset_of(con.constant));
    // Constant atoms take the same value at random points.
    const RandomVariable x = rng.vector(sp->outcome_count()), y = rng.vector(sp->outcome_count(), 7);
    const auto vx = eval(m, x), vy = eval(m, y);
    for (std::size_t a = 0; a < sp->atom_count(); ++a)
      if (con.constant.contains(a)) CHECK(vx[a] == vy[a]);
  }
}

TEST_CASE("level sets: examples") {
  const auto s = space4();
  const QuasiMap wc = uniform_map(s, WorstCase{});
  const auto u = level_set(wc, {finite({1, 2}), false, std::nullopt});
  CHECK(membership(u, rv({1, 1, 2, 2})));
  CHECK(membership(u, rv({-50, 1, 2, -7})));
  CHECK_FALSE(membership(u, rv({q(3, 2), 0, 0, 0})));
  CHECK_FALSE(membership(u, rv({0, 0, 0, 3})));
  const auto open = level_set(wc, {finite({1, 2}), true, std::nullopt});
  CHECK_FALSE(membership(open, rv({1, 1, 2, 2})));
  CHECK(membership(open, rv({q(9, 10), 0, 1, 1})));

  const auto top = level_set(wc, {{Extended::pos_inf(), Extended(0)}, false, std::nullopt});
  CHECK(trivial_region(top).full == mask({true, false}));

  const QuasiMap lin = uniform_map(s, Linear{make_vector({1, 1}), 0});
  const auto half = level_set(lin, {finite({0, 0}), false, std::nullopt});
  CHECK(membership(half, rv({1, -1, 5, -5})));
  CHECK_FALSE(membership(half, rv({1, 0, 0, 0})));

  // Region restriction and the Υ convention.
  const auto only_a2 = level_set(wc, {finite({0, 0}), false, mask({false, true})});
  CHECK(membership(only_a2, rv({9, 9, 0, 0})));
  const QuasiMap mixed(s, {InfiniteAtom{}, WorstCase{}});
  CHECK(membership(level_set(mixed, {finite({3, 0}), false, std::nullopt}), rv({9, 9, 0, 0})));
  CHECK_FALSE(membership(level_set(mixed, {finite({-3, 0}), false, std::nullopt}), rv({9, 9, 0, 0})));
}

TEST_CASE("level sets agree with evaluation and grow with the level") {
  Rng rng(54);
  for (int trial = 0; trial < 120; ++trial) {
    const auto sp = random_space(rng, {6, 3, 3});
    const QuasiMap m = random_map(sp, all_families[rng.below(4)], rng, rng.coin());
    const std::size_t atoms = sp->atom_count();
    ExtendedVector y(atoms), y2(atoms);
    for (std::size_t a = 0; a < atoms; ++a) {
      y[a] = rng.below(6) == 0 ? Extended::pos_inf() : Extended(rng.rational(4));
      y2[a] = y[a].finite() && rng.coin() ? Extended(y[a].value() + rng.positive(2)) : y[a];
    }
    const bool strict = rng.coin();
    const auto u = level_set(m, {y, strict, std::nullopt});
    const auto u2 = level_set(m, {y2, strict, std::nullopt});
    const auto inf = infinity_region(m);
    for (int probe = 0; probe < 15; ++probe) {
      const RandomVariable x = rng.vector(sp->outcome_count(), 5);
      const auto v = eval(m, x);
      bool expected = true;
      for (std::size_t a = 0; a < atoms; ++a) {
        const Extended lhs = inf.finite.contains(a) ? v[a] : Extended(0);
        if (y[a].finite()) expected = expected && (strict ? lhs < y[a] : lhs <= y[a]);
      }
      const bool in = membership(u, x);
      CHECK(in == expected);
      CHECK(in == condual::testing::oracle_member_h(u, x));
      if (in) CHECK(membership(u2, x));
    }
  }
}

TEST_CASE("check_qco: built-ins pass, min of two affine maps fails") {
  Rng rng(55);
  for (int trial = 0; trial < 20; ++trial) {
    const auto sp = random_space(rng);
    for (Family f : all_families) CHECK(check_qco(oracle(random_map(sp, f, rng, true)), *sp, rng).passed());
  }

  const auto s = space4();
  const MapOracle bent = [s](const RandomVariable& x) {
    ExtendedVector out;
    for (std::size_t a = 0; a < 2; ++a) {
      const VectorQ v = s->restrict(x, a);
      out.emplace_back(std::min(Rational(v(0)), Rational(v(1))));
    }
    return out;
  };
  const auto report = check_qco(bent, *s, rng);
  CHECK_FALSE(report.passed());
  REQUIRE(report.witness);
  const auto& w = *report.witness;
  const RandomVariable mix = scale(w.lambda, w.x1, *s) + scale(AtomVector::Ones(2) - w.lambda, w.x2, *s);
  CHECK(bent(mix)[w.atom] > max(bent(w.x1)[w.atom], bent(w.x2)[w.atom]));
  CHECK((w.lambda.array() >= Rational(0)).all());
  CHECK((w.lambda.array() <= Rational(1)).all());
}

TEST_CASE("check_eqc separates outside points from level sets") {
  Rng rng(56);
  for (int trial = 0; trial < 15; ++trial) {
    const auto sp = random_space(rng, {6, 3, 3});
    for (Family f : all_families) {
      const auto report = check_eqc(random_map(sp, f, rng, rng.coin()), rng, 30);
      CHECK(report.passed());
    }
  }
  const auto s = space4();
  const QuasiMap pl = uniform_map(s, ConvexPL{{{make_vector({1, 0}), 0}, {make_vector({0, -1}), 1}}});
  const auto report = check_eqc(pl, rng, 60);
  CHECK(report.passed());
  CHECK(report.separations > 0);
}

TEST_CASE("atom infima and descent") {
  const auto s = space4();
  const QuasiMap wc = uniform_map(s, WorstCase{});
  CHECK(atom_infimum(wc, 0).value.is_neg_inf());
  const Floor floor{make_vector({1, 1}), 3};
  const auto inf = atom_infimum(wc, 0, floor);
  CHECK(inf.value == Extended(3));
  REQUIRE(inf.point);
  CHECK(wc.eval_atom(0, *inf.point) == Extended(3));

  const QuasiMap clamp = uniform_map(s, Transformed{Transform({{0, 0}}, 1, 0), ConvexPL{{{make_vector({2, 0}), 0}}}});
  const auto below = descend_below(clamp, 0, std::nullopt, -7);
  REQUIRE(below);
  CHECK(clamp.eval_atom(0, *below) < Extended(-7));

  const QuasiMap floored = uniform_map(s, Transformed{Transform({{0, 0}}, 0, 1), ConvexPL{{{make_vector({2, 0}), 0}}}});
  CHECK(atom_infimum(floored, 0).value == Extended(0));
  CHECK_FALSE(descend_below(floored, 0, std::nullopt, 0));
  CHECK(atom_infimum(uniform_map(s, InfiniteAtom{}), 1).value.is_pos_inf());
  CHECK(atom_infimum(wc, 0, Floor{make_vector({0, 0}), 1}).value.is_pos_inf());
}
