#include "condual/separation.hpp"

#include "condual/simplex.hpp"

#include <stdexcept>

namespace condual {

namespace {

void check_generators(const VectorQ& point, const std::vector<VectorQ>& vertices, const std::vector<VectorQ>& rays) {
  if (vertices.empty()) throw std::invalid_argument("separation: empty vertex list");
  for (const auto& v : vertices)
    if (v.size() != point.size()) throw std::invalid_argument("separation: vertex dimension mismatch");
  for (const auto& r : rays)
    if (r.size() != point.size()) throw std::invalid_argument("separation: ray dimension mismatch");
}

}  // namespace

std::optional<LocalSeparation> separate_point_from_atomwise_polytope(const VectorQ& point,
                                                                     const std::vector<VectorQ>& vertices,
                                                                     const std::vector<VectorQ>& rays,
                                                                     const VectorQ& weights) {
  check_generators(point, vertices, rays);
  const Index d = point.size();
  if (weights.size() != d) throw std::invalid_argument("separation: weight dimension mismatch");
  for (Index i = 0; i < d; ++i)
    if (weights(i) <= 0) throw std::invalid_argument("separation: weights must be strictly positive");

  // Variables: w (d, free), s (d, |w| bounds), t (gap). Maximize t.
  const Index n = 2 * d + 1;
  const Index t = 2 * d;
  lp::LinearProgram<Rational> program(lp::Sense::Maximize, VectorQ::Zero(n));
  program.objective(t) = 1;
  for (const auto& v : vertices) {
    VectorQ row = VectorQ::Zero(n);
    row.head(d) = -weights.cwiseProduct(point - v);
    row(t) = 1;
    program.add(std::move(row), lp::Relation::LessEqual, Rational(0));
  }
  for (const auto& r : rays) {
    VectorQ row = VectorQ::Zero(n);
    row.head(d) = weights.cwiseProduct(r);
    program.add(std::move(row), lp::Relation::LessEqual, Rational(0));
  }
  VectorQ norm_row = VectorQ::Zero(n);
  for (Index i = 0; i < d; ++i) {
    VectorQ upper = VectorQ::Zero(n), lower = VectorQ::Zero(n);
    upper(i) = 1;
    upper(d + i) = -1;
    lower(i) = -1;
    lower(d + i) = -1;
    program.add(std::move(upper), lp::Relation::LessEqual, Rational(0));
    program.add(std::move(lower), lp::Relation::LessEqual, Rational(0));
    norm_row(d + i) = 1;
  }
  program.add(std::move(norm_row), lp::Relation::LessEqual, Rational(1));

  const auto outcome = lp::solve(program);
  const auto* opt = std::get_if<lp::Optimal<Rational>>(&outcome);
  if (opt == nullptr) throw std::logic_error("separation LP is bounded and feasible by construction");
  if (opt->value <= 0) return std::nullopt;

  VectorQ w = opt->point.head(d);
  const Rational l1 = w.cwiseAbs().sum();
  w /= l1;
  const Rational at_point = local_pairing(point, w, weights);
  Rational best = local_pairing(vertices.front(), w, weights);
  for (const auto& v : vertices) best = std::max(best, local_pairing(v, w, weights));
  return LocalSeparation{std::move(w), at_point - best};
}

bool in_finitely_generated(const VectorQ& point, const std::vector<VectorQ>& vertices,
                           const std::vector<VectorQ>& rays) {
  check_generators(point, vertices, rays);
  const Index d = point.size();
  const Index k = static_cast<Index>(vertices.size());
  const Index n = k + static_cast<Index>(rays.size());
  lp::LinearProgram<Rational> program(lp::Sense::Maximize, VectorQ::Zero(n));
  program.nonnegative.assign(static_cast<std::size_t>(n), true);
  for (Index i = 0; i < d; ++i) {
    VectorQ row(n);
    for (Index j = 0; j < k; ++j) row(j) = vertices[static_cast<std::size_t>(j)](i);
    for (Index j = k; j < n; ++j) row(j) = rays[static_cast<std::size_t>(j - k)](i);
    program.add(std::move(row), lp::Relation::Equal, point(i));
  }
  VectorQ simplex = VectorQ::Zero(n);
  simplex.head(k).setOnes();
  program.add(std::move(simplex), lp::Relation::Equal, Rational(1));
  return !std::holds_alternative<lp::Infeasible>(lp::solve(program));
}

const char* to_string(SeparationGrade grade) {
  return grade == SeparationGrade::Strict ? "strict" : "boundary";
}

}  // namespace condual
