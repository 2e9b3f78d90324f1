#include "condual/random.hpp"
#include "condual/separation.hpp"
#include "condual/simplex.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace condual;
using condual::testing::oracle_in_hull;

namespace {

using Program = lp::LinearProgram<Rational>;

Program max_first(Index n) {
  VectorQ c = VectorQ::Zero(n);
  c(0) = 1;
  return Program(lp::Sense::Maximize, c);
}

}  // namespace

TEST_CASE("rationals parse and print canonically") {
  CHECK(parse_rational("6/4") == q(3, 2));
  CHECK(parse_rational("-7") == q(-7));
  CHECK(to_string(q(3, 2)) == "3/2");
  CHECK(to_string(q(4)) == "4/1");
  CHECK_THROWS_AS(parse_rational("0.5"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational("1/0"), std::invalid_argument);
}

TEST_CASE("extended reals order and subtract") {
  const Extended inf = Extended::pos_inf(), ninf = Extended::neg_inf();
  CHECK(ninf < Extended(q(-1000)));
  CHECK(Extended(q(1000)) < inf);
  CHECK(difference(inf, inf) == Extended(0));
  CHECK(difference(ninf, ninf) == Extended(0));
  CHECK(difference(inf, Extended(3)) == inf);
  CHECK(difference(Extended(q(1, 2)), Extended(q(1, 3))) == Extended(q(1, 6)));
  CHECK(parse_extended("+inf") == inf);
  CHECK(to_string(ninf) == "-inf");
}

TEST_CASE("solve: max v1 s.t. v1 <= 1") {
  Program p = max_first(1);
  p.add(make_vector({1}), lp::Relation::LessEqual, 1);
  const auto out = lp::solve(p);
  REQUIRE(std::holds_alternative<lp::Optimal<Rational>>(out));
  const auto& opt = std::get<lp::Optimal<Rational>>(out);
  CHECK(opt.value == 1);
  CHECK(opt.point(0) == 1);
  CHECK(lp::verify(p, out));
}

TEST_CASE("solve: contradictory bounds are infeasible") {
  Program p = max_first(1);
  p.add(make_vector({1}), lp::Relation::LessEqual, 0);
  p.add(make_vector({-1}), lp::Relation::LessEqual, -1);
  CHECK(std::holds_alternative<lp::Infeasible>(lp::solve(p)));
}

TEST_CASE("solve: no constraints is unbounded") {
  const Program p = max_first(1);
  const auto out = lp::solve(p);
  REQUIRE(std::holds_alternative<lp::Unbounded<Rational>>(out));
  CHECK(std::get<lp::Unbounded<Rational>>(out).ray(0) > 0);
  CHECK(lp::verify(p, out));
}

TEST_CASE("solve: malformed rows are rejected") {
  Program p = max_first(2);
  p.add(make_vector({1}), lp::Relation::LessEqual, 1);
  CHECK_THROWS_AS(lp::solve(p), std::invalid_argument);
}

TEST_CASE("solve: degenerate program terminates under Bland's rule") {
  // Beale's cycling example.
  Program p(lp::Sense::Maximize, make_vector({q(3, 4), -20, q(1, 2), -6}));
  p.nonnegative.assign(4, true);
  p.add(make_vector({q(1, 4), -8, -1, 9}), lp::Relation::LessEqual, 0);
  p.add(make_vector({q(1, 2), -12, q(-1, 2), 3}), lp::Relation::LessEqual, 0);
  p.add(make_vector({0, 0, 1, 0}), lp::Relation::LessEqual, 1);
  const auto out = lp::solve(p);
  REQUIRE(std::holds_alternative<lp::Optimal<Rational>>(out));
  CHECK(std::get<lp::Optimal<Rational>>(out).value == q(5, 4));
  CHECK(lp::verify(p, out));
}

TEST_CASE("solve: optimal values are attained and duals certify them") {
  // Random bounded programs in 2 variables inside a box; the optimum of a
  // linear objective over a polygon is attained at some pair of tight rows,
  // which the test enumerates directly.
  Rng rng(11);
  for (int trial = 0; trial < 150; ++trial) {
    Program p(rng.coin() ? lp::Sense::Maximize : lp::Sense::Minimize, rng.vector(2, 3));
    std::vector<std::pair<VectorQ, Rational>> rows;
    for (int i = 0; i < 2; ++i) {
      VectorQ e = VectorQ::Zero(2);
      e(i) = 1;
      rows.push_back({e, Rational(5)});
      rows.push_back({-e, Rational(5)});
    }
    for (int k = 0, extra = static_cast<int>(rng.below(4)); k < extra; ++k) rows.push_back({rng.vector(2, 3), rng.rational(3)});
    for (const auto& [r, b] : rows) p.add(r, lp::Relation::LessEqual, b);

    std::optional<Rational> best;
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = i + 1; j < rows.size(); ++j) {
        MatrixQ a(2, 2);
        a.row(0) = rows[i].first.transpose();
        a.row(1) = rows[j].first.transpose();
        const auto v = condual::testing::solve_full_rank(a, make_vector({rows[i].second, rows[j].second}));
        if (!v || !lp::is_feasible(p, *v)) continue;
        const Rational value = p.objective.dot(*v);
        if (!best || (p.sense == lp::Sense::Maximize ? value > *best : value < *best)) best = value;
      }

    const auto out = lp::solve(p);
    CHECK(lp::verify(p, out));
    if (!best) {
      CHECK(std::holds_alternative<lp::Infeasible>(out));
      continue;
    }
    REQUIRE(std::holds_alternative<lp::Optimal<Rational>>(out));
    const auto& opt = std::get<lp::Optimal<Rational>>(out);
    CHECK(opt.value == *best);
    CHECK(p.objective.dot(opt.point) == opt.value);
    CHECK(lp::is_feasible(p, opt.point));
  }
}

TEST_CASE("separation: 1D segment against a point beyond it") {
  const auto sep = separate_point_from_atomwise_polytope(make_vector({2}), {make_vector({0}), make_vector({1})}, {},
                                                         make_vector({1}));
  REQUIRE(sep);
  CHECK(sep->functional == make_vector({1}));
  CHECK(sep->margin == 1);
}

TEST_CASE("separation: a point of the segment is not separated") {
  CHECK_FALSE(separate_point_from_atomwise_polytope(make_vector({q(1, 2)}), {make_vector({0}), make_vector({1})}, {},
                                                    make_vector({1})));
}

TEST_CASE("separation: the ray constraint fixes the direction") {
  const auto sep = separate_point_from_atomwise_polytope(make_vector({-1, 0}), {make_vector({0, 0})},
                                                         {make_vector({1, 0})}, make_vector({1, 1}));
  REQUIRE(sep);
  CHECK(sep->functional == make_vector({-1, 0}));
  CHECK(sep->margin == 1);
}

TEST_CASE("separation: input errors") {
  CHECK_THROWS_AS(separate_point_from_atomwise_polytope(make_vector({1}), {}, {}, make_vector({1})),
                  std::invalid_argument);
  CHECK_THROWS_AS(separate_point_from_atomwise_polytope(make_vector({1}), {make_vector({0})}, {}, make_vector({0})),
                  std::invalid_argument);
}

TEST_CASE("separation: certificates re-verify and agree with the Caratheodory oracle") {
  Rng rng(5);
  int separated = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const Index d = 1 + static_cast<Index>(rng.below(3));
    std::vector<VectorQ> vertices, rays;
    for (std::size_t k = 0, n = 1 + rng.below(4); k < n; ++k) vertices.push_back(rng.vector(d, 3));
    if (rng.below(3) == 0) rays.push_back(rng.vector(d, 2));
    VectorQ weights(d);
    for (Index i = 0; i < d; ++i) weights(i) = rng.positive(2);
    const VectorQ x = rng.vector(d, 4);

    const auto sep = separate_point_from_atomwise_polytope(x, vertices, rays, weights);
    const bool member = oracle_in_hull(x, vertices, rays);
    CHECK(member == !sep.has_value());
    CHECK(member == in_finitely_generated(x, vertices, rays));
    if (!sep) continue;
    ++separated;
    const auto pair = [&](const VectorQ& a) { return condual::testing::dot(a, sep->functional, weights); };
    CHECK(sep->functional.cwiseAbs().sum() == 1);
    Rational top = pair(vertices.front());
    for (const auto& v : vertices) top = std::max(top, pair(v));
    CHECK(sep->margin > 0);
    CHECK(pair(x) - top == sep->margin);
    for (const auto& r : rays) CHECK(pair(r) <= 0);
  }
  CHECK(separated > 100);
}
