#include "condual/dual_repr.hpp"
#include "condual/instances.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace condual;
using condual::testing::rv;
using condual::testing::space4;

namespace {

QuasiMap uniform_map(const SpacePtr& s, const Descriptor& d) { return QuasiMap(s, {d, d}); }

ExtendedVector finite(std::initializer_list<Rational> values) {
  ExtendedVector out;
  for (const auto& v : values) out.emplace_back(v);
  return out;
}

/// min over a 1/4-grid on [-6, 6]² of π_a(ξ) subject to ⟨ξ, z⟩_a ≥ y, on a
/// two-outcome atom of SPACE4; nullopt when no grid point is feasible.
std::optional<Extended> grid_min(const QuasiMap& map, std::size_t a, const Rational& y, const VectorQ& z) {
  const auto& space = map.space();
  std::optional<Extended> best;
  for (long i = -24; i <= 24; ++i)
    for (long j = -24; j <= 24; ++j) {
      const VectorQ v = make_vector({Rational(i, 4), Rational(j, 4)});
      if (condual::testing::dot(v, z, space.conditional_weights(a)) < y) continue;
      const Extended value = map.eval_atom(a, v);
      if (!best || value < *best) best = value;
    }
  return best;
}

}  // namespace

TEST_CASE("eval_R examples") {
  const auto s = space4();
  const RandomVariable one = rv({1, 1, 1, 1});
  const QuasiMap mean = uniform_map(s, Linear{make_vector({1, 1}), 0});
  CHECK(eval_R(mean, make_vector({3, -2}), one) == finite({3, -2}));

  const QuasiMap wc = uniform_map(s, WorstCase{});
  const auto empty = eval_R(wc, make_vector({1, 1}), RandomVariable::Zero(4));
  CHECK(empty[0].is_pos_inf());
  CHECK(empty[1].is_pos_inf());
  CHECK(eval_R(wc, make_vector({0, 0}), RandomVariable::Zero(4))[0].is_neg_inf());

  for (const auto& [c1, c2] : std::vector<std::pair<Rational, Rational>>{{q(3, 4), q(-5, 2)}, {0, 2}, {q(-1, 4), q(7, 4)}}) {
    CHECK(eval_R(wc, make_vector({c1, c2}), one) == finite({c1, c2}));
    CHECK(grid_min(wc, 0, c1, make_vector({1, 1})) == Extended(c1));
    CHECK(grid_min(wc, 1, c2, make_vector({1, 1})) == Extended(c2));
  }
  CHECK(eval_R(QuasiMap(s, {InfiniteAtom{}, WorstCase{}}), make_vector({0, 0}), one)[0].is_pos_inf());
}

TEST_CASE("eval_R is attained by its witness and bounded by a grid search") {
  Rng rng(61);
  const auto s = space4();
  for (int trial = 0; trial < 60; ++trial) {
    const QuasiMap m = random_map(s, all_families[rng.below(4)], rng);
    const AtomVector y = make_vector({rng.rational(2), rng.rational(2)});
    const RandomVariable z = rng.vector(4, 2);
    const auto detail = eval_R_detail(m, y, z);
    for (std::size_t a = 0; a < 2; ++a) {
      const VectorQ za = s->restrict(z, a);
      const auto grid = grid_min(m, a, y(static_cast<Index>(a)), za);
      if (grid) CHECK(detail[a].value <= *grid);
      if (detail[a].point) {
        CHECK(condual::testing::dot(*detail[a].point, za, s->conditional_weights(a)) >= y(static_cast<Index>(a)));
        CHECK(m.eval_atom(a, *detail[a].point) == detail[a].value);
      }
      if (detail[a].value.is_pos_inf()) CHECK_FALSE(grid);
    }
  }
}

TEST_CASE("weak duality for random densities") {
  Rng rng(62);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto sp = random_space(rng);
    const QuasiMap m = random_map(sp, all_families[rng.below(4)], rng, rng.below(4) == 0);
    const RandomVariable x = rng.vector(sp->outcome_count()), z = rng.vector(sp->outcome_count(), 3);
    const auto r = eval_R(m, pairing(x, z, *sp), z);
    const auto v = eval(m, x);
    for (std::size_t a = 0; a < sp->atom_count(); ++a) CHECK(r[a] <= v[a]);
  }
}

TEST_CASE("represent: linear maps are exact at the first epsilon") {
  const auto s = space4();
  Rng rng(63);
  const QuasiMap lin(s, {Linear{make_vector({2, -1}), 1}, Linear{make_vector({q(1, 2), 3}), -4}});
  const auto cert = represent(lin, rv({1, 2, -3, 5}), default_schedule(2), rng);
  CHECK(cert.passed());
  REQUIRE_FALSE(cert.entries.empty());
  for (const auto& g : cert.entries.front().gap) CHECK(g == Extended(0));
  CHECK(verify_certificate(lin, cert).empty());
}

TEST_CASE("represent: worst case on SPACE4") {
  const auto s = space4();
  Rng rng(64);
  const QuasiMap wc = uniform_map(s, WorstCase{});
  const RandomVariable x = rv({1, -3, 2, -2});
  const auto cert = represent(wc, x, uniform_schedule(2, {1, q(1, 4), q(1, 16)}), rng);
  REQUIRE(cert.passed());
  REQUIRE(cert.entries.size() == 3);
  CHECK(cert.value == finite({1, 2}));
  for (const auto& e : cert.entries) {
    for (std::size_t a = 0; a < 2; ++a) {
      CHECK(e.gap[a] >= Extended(0));
      CHECK(e.gap[a] < Extended(Rational(e.epsilon(static_cast<Index>(a)))));
    }
    CHECK(e.spot_checks > 0);
  }
  // Running maximum of R_ε never drops.
  ExtendedVector running = cert.entries.front().value;
  for (const auto& e : cert.entries)
    for (std::size_t a = 0; a < 2; ++a) {
      const Extended next = max(running[a], e.value[a]);
      CHECK(next >= running[a]);
      running[a] = next;
    }

  // No density drawn at random beats π(x), and the engine gets within ε of it.
  Extended best_random = Extended::neg_inf();
  for (int k = 0; k < 1000; ++k) {
    const RandomVariable z = rng.vector(4, 3);
    best_random = max(best_random, eval_R(wc, pairing(x, z, *s), z)[0]);
  }
  CHECK(best_random <= Extended(1));
  CHECK(difference(Extended(1), cert.entries.back().value[0]) < Extended(q(1, 16)));
}

TEST_CASE("represent: infinite atoms take the first step") {
  const auto s = space4();
  Rng rng(65);
  const QuasiMap mixed(s, {InfiniteAtom{}, WorstCase{}});
  const auto cert = represent(mixed, rv({0, 0, 1, 2}), default_schedule(2), rng);
  CHECK(cert.passed());
  CHECK(cert.regions.upsilon.contains(0));
  CHECK(cert.regions.constant.contains(0));
  for (const auto& e : cert.entries) CHECK(e.value[0].is_pos_inf());
}

TEST_CASE("verify_certificate rejects a tampered density") {
  const auto s = space4();
  Rng rng(66);
  const QuasiMap wc = uniform_map(s, WorstCase{});
  auto cert = represent(wc, rv({1, -3, 2, -2}), default_schedule(2), rng);
  REQUIRE(cert.passed());
  CHECK(verify_certificate(wc, cert).empty());
  cert.entries.back().density = rv({-1, 0, 0, -1});
  CHECK_FALSE(verify_certificate(wc, cert).empty());
  CHECK_THROWS_AS(uniform_schedule(2, {0}), std::invalid_argument);
}

TEST_CASE("represent certifies random maps of every family") {
  Rng rng(67);
  for (Family f : all_families)
    for (int trial = 0; trial < 12; ++trial) {
      const auto sp = random_space(rng, {6, 3, 3});
      const QuasiMap m = random_map(sp, f, rng, rng.below(3) == 0);
      const RandomVariable x = rng.vector(sp->outcome_count());
      const auto cert = represent(m, x, uniform_schedule(sp->atom_count(), {1, q(1, 4), q(1, 16)}), rng, 4);
      CHECK_MESSAGE(cert.passed(), to_string(f), " trial ", trial, ": ", cert.issues.empty() ? "" : cert.issues.front());
      CHECK(verify_certificate(m, cert).empty());
    }
}

TEST_CASE("usc_max attains the value exactly") {
  const auto s = space4();
  const QuasiMap wc = uniform_map(s, WorstCase{});
  const auto r = usc_max(wc, rv({1, -3, 2, -2}));
  CHECK(r.exact());
  CHECK(r.attained == finite({1, 2}));
  // The density concentrates on each atom's argmax outcome.
  CHECK(r.density(1) == 0);
  CHECK(r.density(3) == 0);
  CHECK(r.density(0) > 0);
  CHECK(r.density(2) > 0);

  const QuasiMap lin(s, {Linear{make_vector({2, -1}), 1}, Linear{make_vector({q(1, 2), 3}), -4}});
  CHECK(usc_max(lin, rv({1, 2, -3, 5})).exact());

  const QuasiMap flat = uniform_map(s, Linear{make_vector({0, 0}), 3});
  const auto c = usc_max(flat, rv({4, 4, 4, 4}));
  CHECK(c.exact());
  CHECK(c.attained == finite({3, 3}));

  Rng rng(68);
  for (int trial = 0; trial < 30; ++trial) {
    const auto sp = random_space(rng);
    for (Family f : {Family::Linear, Family::WorstCase})
      CHECK(usc_max(random_map(sp, f, rng), rng.vector(sp->outcome_count())).exact());
  }
}

TEST_CASE("dual-function properties on examples and random maps") {
  const auto s = space4();
  const QuasiMap wc = uniform_map(s, WorstCase{});
  const RandomVariable one = rv({1, 1, 1, 1});
  CHECK(eval_R(wc, make_vector({0, 0}), one) == finite({0, 0}));
  CHECK(eval_R(wc, make_vector({1, 1}), one) == finite({1, 1}));

  const RandomVariable x = rv({1, -3, 2, -2}), z = rv({1, 2, q(1, 2), 3});
  const AtomVector lambda = make_vector({2, 3});
  CHECK(eval_R(wc, lambda.cwiseProduct(pairing(x, z, *s)), scale(lambda, z, *s)) == eval_R(wc, pairing(x, z, *s), z));

  const AtomVector y = make_vector({q(1, 3), -1});
  const auto full = eval_R(wc, y, z);
  const auto masked = eval_R(wc, make_vector({q(1, 3), 0}), z);
  CHECK(full[0] == masked[0]);

  Rng rng(69);
  PropertyReport total;
  for (Family f : all_families)
    for (int trial = 0; trial < 3; ++trial) {
      const auto sp = random_space(rng, {6, 3, 3});
      total.merge(property_suite_R(random_map(sp, f, rng, rng.coin()), rng, 10));
    }
  for (const auto& p : total.properties) {
    CHECK_MESSAGE(p.passed == p.checked, p.name, ": ", p.counterexample.value_or(""));
    CHECK(p.checked > 0);
  }
  CHECK(total.passed());
}
