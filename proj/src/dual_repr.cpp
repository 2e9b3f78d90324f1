#include "condual/dual_repr.hpp"

#include <algorithm>
#include <stdexcept>

namespace condual {

namespace {

std::string format(const VectorQ& v) {
  std::string s = "[";
  for (Index i = 0; i < v.size(); ++i) s += (i ? ", " : "") + to_string(v(i));
  return s + "]";
}

std::string format(const ExtendedVector& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + to_string(v[i]);
  return s + "]";
}

}  // namespace

std::vector<AtomInfimum> eval_R_detail(const QuasiMap& map, const AtomVector& level, const RandomVariable& density) {
  const auto& space = map.space();
  space.check_atoms(static_cast<std::size_t>(level.size()), "dual level");
  space.check_rv(density, "density");
  std::vector<AtomInfimum> out;
  out.reserve(space.atom_count());
  for (std::size_t a = 0; a < space.atom_count(); ++a)
    out.push_back(atom_infimum(map, a, Floor{space.restrict(density, a), level(static_cast<Index>(a))}));
  return out;
}

ExtendedVector eval_R(const QuasiMap& map, const AtomVector& level, const RandomVariable& density) {
  ExtendedVector out;
  for (auto& inf : eval_R_detail(map, level, density)) out.push_back(inf.value);
  return out;
}

ExtendedVector gap(const ExtendedVector& lhs, const ExtendedVector& rhs) {
  if (lhs.size() != rhs.size()) throw std::invalid_argument("gap: length mismatch");
  ExtendedVector out;
  for (std::size_t a = 0; a < lhs.size(); ++a) out.push_back(difference(lhs[a], rhs[a]));
  return out;
}

Schedule uniform_schedule(std::size_t atoms, const std::vector<Rational>& values) {
  Schedule s;
  for (const auto& e : values) {
    if (e <= 0) throw std::invalid_argument("schedule: epsilon must be positive, got " + to_string(e));
    s.push_back(AtomVector::Constant(static_cast<Index>(atoms), e));
  }
  return s;
}

Schedule default_schedule(std::size_t atoms) {
  return uniform_schedule(atoms, {Rational(1), Rational(1, 4), Rational(1, 16), Rational(1, 64)});
}

DualRegions dual_regions(const QuasiMap& map, const RandomVariable& x) {
  const auto inf = infinity_region(map);
  const auto con = constancy_region(map);
  const ExtendedVector value = eval(map, x);
  GSet bounded(value.size());
  for (std::size_t a = 0; a < value.size(); ++a) bounded.set(a, !value[a].is_pos_inf());
  return {inf.upsilon, inf.finite, con.constant, con.nonconstant, bounded};
}

namespace {

// The bound certified by each entry: weak duality everywhere, equality on
// A, and the ε-gap on G ∩ A⊢.
void check_entry(const DualRegions& r, const ExtendedVector& value, const DualEntry& e, const FiniteSpace& space,
                 std::size_t index, std::vector<std::string>& issues) {
  const auto where = [&](std::size_t a) {
    return "epsilon #" + std::to_string(index) + ", atom '" + space.atom_names()[a] + "': ";
  };
  for (std::size_t a = 0; a < space.atom_count(); ++a) {
    const Rational& eps = e.epsilon(static_cast<Index>(a));
    if (eps <= 0) issues.push_back(where(a) + "epsilon is not positive");
    if (e.value[a] > value[a]) issues.push_back(where(a) + "weak duality fails: R = " + to_string(e.value[a]));
    if (r.constant.contains(a) && e.value[a] != value[a])
      issues.push_back(where(a) + "R differs from the constant value " + to_string(value[a]));
    if (r.nonconstant.contains(a) && r.bounded.contains(a) && !(e.gap[a] < Extended(eps)))
      issues.push_back(where(a) + "gap " + to_string(e.gap[a]) + " is not below epsilon " + to_string(eps));
  }
}

}  // namespace

DualCertificate represent(const QuasiMap& map, const RandomVariable& x, const Schedule& schedule, Rng& rng,
                          std::size_t spot) {
  const auto& space = map.space();
  space.check_rv(x);
  const std::size_t n = space.atom_count();
  DualCertificate cert{x, eval(map, x), dual_regions(map, x), {}, {}};
  const auto& r = cert.regions;

  for (std::size_t index = 0; index < schedule.size(); ++index) {
    const AtomVector& eps = schedule[index];
    space.check_atoms(static_cast<std::size_t>(eps.size()), "epsilon");
    for (Index a = 0; a < eps.size(); ++a)
      if (eps(a) <= 0) throw std::invalid_argument("schedule: epsilon must be positive, got " + to_string(eps(a)));

    DualEntry e;
    e.epsilon = eps;
    e.target.resize(n);
    for (std::size_t a = 0; a < n; ++a) {
      const Rational& ea = eps(static_cast<Index>(a));
      if (r.upsilon.contains(a)) e.target[a] = Extended(Rational(0));
      else if (r.constant.contains(a)) e.target[a] = cert.value[a];
      else if (r.bounded.contains(a)) e.target[a] = cert.value[a] - ea;
      else e.target[a] = Extended(ea);
    }
    const ConditionalSet level = level_set(map, {e.target, false, std::nullopt});

    e.degenerate = GSet(n);
    GSet region(n);
    for (std::size_t a = 0; a < n; ++a) {
      if (!r.nonconstant.contains(a)) continue;
      if (level.atom_is_empty(a)) e.degenerate.set(a);
      else region.set(a);
    }
    bool inside = false;
    for (std::size_t a = 0; a < n; ++a)
      if (region.contains(a) && level.atom_contains(a, space.restrict(x, a))) {
        cert.issues.push_back("epsilon #" + std::to_string(index) + ": x lies in the level set on atom '" +
                              space.atom_names()[a] + "'");
        inside = true;
      }
    if (inside) continue;

    const auto sep = separate(level, x, region);
    if (!sep || !verify_separation(level, x, *sep)) {
      cert.issues.push_back("epsilon #" + std::to_string(index) + ": separation from the level set failed");
      continue;
    }
    e.density = sep->functional;
    e.margin = sep->margin;
    for (std::size_t a = 0; a < n; ++a)
      if (e.degenerate.contains(a)) e.margin[a] = Extended::pos_inf();
    e.level = pairing(x, e.density, space);
    e.value = eval_R(map, e.level, e.density);
    e.gap = gap(cert.value, e.value);
    check_entry(r, cert.value, e, space, index, cert.issues);

    // Every ξ with ⟨ξ, z_ε⟩ ≥ ⟨x, z_ε⟩ on A⊢ must exceed Y_ε there.
    for (std::size_t k = 0; k < spot; ++k) {
      ++e.spot_checks;
      for (std::size_t a = 0; a < n; ++a) {
        if (!r.nonconstant.contains(a)) continue;
        const VectorQ& w = space.conditional_weights(a);
        const VectorQ z = space.restrict(e.density, a);
        VectorQ v = rng.vector(space.atom_size(a), 6);
        const Rational need = e.level(static_cast<Index>(a)) - local_pairing(v, z, w);
        if (!z.isZero() && need > 0) v += (need / local_pairing(z, z, w) + Rational(rng.between(0, 4), 4)) * z;
        if (!z.isZero() && local_pairing(v, z, w) < e.level(static_cast<Index>(a))) continue;
        if (!(map.eval_atom(a, v) > e.target[a]))
          cert.issues.push_back("epsilon #" + std::to_string(index) + ", atom '" + space.atom_names()[a] +
                                "': half-space point " + format(v) + " is not above the level");
      }
    }
    cert.entries.push_back(std::move(e));
  }
  return cert;
}

std::vector<std::string> verify_certificate(const QuasiMap& map, const DualCertificate& cert) {
  const auto& space = map.space();
  std::vector<std::string> issues;
  const ExtendedVector value = eval(map, cert.x);
  if (value != cert.value) issues.push_back("stored pi(x) " + format(cert.value) + " differs from " + format(value));
  const DualRegions r = dual_regions(map, cert.x);
  if (r.upsilon != cert.regions.upsilon || r.constant != cert.regions.constant || r.bounded != cert.regions.bounded)
    issues.push_back("stored regions differ from the recomputed ones");
  for (std::size_t index = 0; index < cert.entries.size(); ++index) {
    const DualEntry& e = cert.entries[index];
    space.check_rv(e.density, "certificate density");
    space.check_atoms(static_cast<std::size_t>(e.epsilon.size()), "certificate epsilon");
    const AtomVector level = pairing(cert.x, e.density, space);
    if (level != e.level) issues.push_back("epsilon #" + std::to_string(index) + ": stored level differs");
    DualEntry fresh = e;
    fresh.value = eval_R(map, level, e.density);
    fresh.gap = gap(value, fresh.value);
    if (fresh.value != e.value)
      issues.push_back("epsilon #" + std::to_string(index) + ": stored R " + format(e.value) + " differs from " +
                       format(fresh.value));
    check_entry(r, value, fresh, space, index, issues);
  }
  return issues;
}

UscResult usc_max(const QuasiMap& map, const RandomVariable& x) {
  const auto& space = map.space();
  space.check_rv(x);
  const std::size_t n = space.atom_count();
  const DualRegions r = dual_regions(map, x);
  UscResult out{RandomVariable::Zero(space.outcome_count()), eval(map, x), {}, GSet(n), {}};

  ExtendedVector target(n, Extended::pos_inf());
  for (std::size_t a = 0; a < n; ++a)
    if (r.nonconstant.contains(a)) target[a] = out.value[a];
  const ConditionalSet open = level_set(map, {target, true, std::nullopt});
  for (std::size_t a = 0; a < n; ++a)
    if (r.nonconstant.contains(a) && !open.atom_is_empty(a)) out.separated.set(a);

  const auto sep = separate(open, x, out.separated);
  if (!sep || !verify_separation(open, x, *sep)) {
    out.issues.push_back("separation from the open level set failed");
    out.attained = ExtendedVector(n, Extended::neg_inf());
    return out;
  }
  out.density = sep->functional;
  out.attained = eval_R(map, pairing(x, out.density, space), out.density);
  for (std::size_t a = 0; a < n; ++a)
    if (out.attained[a] != out.value[a])
      out.issues.push_back("atom '" + space.atom_names()[a] + "': R = " + to_string(out.attained[a]) +
                           " but pi(x) = " + to_string(out.value[a]));
  return out;
}

bool PropertyReport::passed() const {
  for (const auto& p : properties)
    if (p.passed != p.checked) return false;
  return true;
}

void PropertyReport::merge(const PropertyReport& other) {
  for (const auto& o : other.properties) {
    auto it = std::find_if(properties.begin(), properties.end(), [&](const PropertyResult& p) { return p.name == o.name; });
    if (it == properties.end()) {
      properties.push_back(o);
      continue;
    }
    it->checked += o.checked;
    it->passed += o.passed;
    if (!it->counterexample) it->counterexample = o.counterexample;
  }
}

namespace {

ExtendedVector meet(const ExtendedVector& a, const ExtendedVector& b) {
  ExtendedVector out;
  for (std::size_t i = 0; i < a.size(); ++i) out.push_back(min(a[i], b[i]));
  return out;
}

ExtendedVector join(const ExtendedVector& a, const ExtendedVector& b) {
  ExtendedVector out;
  for (std::size_t i = 0; i < a.size(); ++i) out.push_back(max(a[i], b[i]));
  return out;
}

bool equal_on(const ExtendedVector& a, const ExtendedVector& b, const GSet& region) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (region.contains(i) && a[i] != b[i]) return false;
  return true;
}

class Tally {
public:
  explicit Tally(std::string name) { result_.name = std::move(name); }
  void record(bool ok, const std::string& context) {
    ++result_.checked;
    if (ok) ++result_.passed;
    else if (!result_.counterexample) result_.counterexample = context;
  }
  PropertyResult take() { return std::move(result_); }

private:
  PropertyResult result_;
};

}  // namespace

PropertyReport property_suite_R(const QuasiMap& map, Rng& rng, std::size_t instances) {
  const auto& space = map.space();
  const std::size_t n = space.atom_count();
  const Index m = space.outcome_count();
  const auto density = [&] {
    RandomVariable z = rng.vector(m, 3);
    if (rng.below(4) == 0) {
      const std::size_t a = rng.below(n);
      space.assign(z, a, VectorQ::Zero(space.atom_size(a)));
    }
    return z;
  };
  const auto atom_vector = [&](long span) {
    AtomVector y(static_cast<Index>(n));
    for (Index a = 0; a < y.size(); ++a) y(a) = rng.rational(span);
    return y;
  };
  const auto context = [&](const RandomVariable& x, const RandomVariable& z) {
    return "x = " + format(x) + ", z = " + format(z);
  };

  Tally monotone("monotone"), scaling("scaling"), witness("witness"), locality("locality"), lattice("lattice"),
      quasi_affine("quasi-affine"), grid("grid-infimum"), weak("weak-duality");

  for (std::size_t k = 0; k < instances; ++k) {
    const RandomVariable x = rng.vector(m), x2 = rng.vector(m);
    const RandomVariable z = density();
    const AtomVector mu = pairing(x, z, space), mu2 = pairing(x2, z, space);

    // Monotone in Y.
    AtomVector bump(static_cast<Index>(n));
    for (Index a = 0; a < bump.size(); ++a) bump(a) = Rational(rng.between(0, 8), 4);
    monotone.record(
        [&] {
          const ExtendedVector lo = eval_R(map, mu, z), hi = eval_R(map, mu + bump, z);
          for (std::size_t a = 0; a < n; ++a)
            if (lo[a] > hi[a]) return false;
          return true;
        }(),
        context(x, z));

    // Positive G-measurable scaling of the pair.
    AtomVector lambda(static_cast<Index>(n));
    for (Index a = 0; a < lambda.size(); ++a) lambda(a) = rng.positive(3);
    scaling.record(eval_R(map, lambda.cwiseProduct(mu), scale(lambda, z, space)) == eval_R(map, mu, z),
                   context(x, z) + ", lambda = " + format(lambda));

    // R(Y, z) < α produces a feasible ξ with π(ξ) < α.
    {
      const AtomVector y = mu + atom_vector(2);
      const ExtendedVector r = eval_R(map, y, z);
      bool ok = true;
      RandomVariable xi = RandomVariable::Zero(m);
      for (std::size_t a = 0; a < n && ok; ++a) {
        if (r[a].is_pos_inf()) continue;
        const Rational alpha = r[a].finite() ? r[a].value() + rng.positive(2) : rng.rational(8);
        const Floor floor{space.restrict(z, a), y(static_cast<Index>(a))};
        const auto v = descend_below(map, a, floor, alpha);
        ok = v && local_pairing(*v, floor.density, space.conditional_weights(a)) >= floor.level &&
             map.eval_atom(a, *v) < Extended(alpha);
        if (ok) space.assign(xi, a, *v);
      }
      witness.record(ok, context(x, z));
    }

    // Locality in Y and in the density.
    {
      GSet region(n);
      for (std::size_t a = 0; a < n; ++a) region.set(a, rng.coin());
      const AtomVector other = atom_vector(4);
      AtomVector pasted = mu;
      for (std::size_t a = 0; a < n; ++a)
        if (!region.contains(a)) pasted(static_cast<Index>(a)) = other(static_cast<Index>(a));
      const ExtendedVector base = eval_R(map, mu, z);
      const RandomVariable z_pasted = concat(z, density(), region, space);
      locality.record(equal_on(base, eval_R(map, pasted, z), region) &&
                          equal_on(base, eval_R(map, mu, z_pasted), region),
                      context(x, z));
    }

    // Lattice identities at μ(X₁), μ(X₂).
    {
      const ExtendedVector r1 = eval_R(map, mu, z), r2 = eval_R(map, mu2, z);
      const AtomVector lo = mu.cwiseMin(mu2), hi = mu.cwiseMax(mu2);
      lattice.record(eval_R(map, lo, z) == meet(r1, r2) && eval_R(map, hi, z) == join(r1, r2),
                     context(x, z) + ", x2 = " + format(x2));

      AtomVector t(static_cast<Index>(n));
      for (Index a = 0; a < t.size(); ++a) t(a) = Rational(rng.between(0, 8), 8);
      const AtomVector rest = AtomVector::Ones(t.size()) - t;
      const RandomVariable mix = scale(t, x, space) + scale(rest, x2, space);
      const ExtendedVector rm = eval_R(map, pairing(mix, z, space), z);
      bool ok = true;
      for (std::size_t a = 0; a < n; ++a) ok = ok && min(r1[a], r2[a]) <= rm[a] && rm[a] <= max(r1[a], r2[a]);
      quasi_affine.record(ok, context(x, z) + ", x2 = " + format(x2) + ", lambda = " + format(t));
    }

    // Grid infimum: inf over a 1/64-grid of Y against inf_ξ π(ξ).
    {
      const RandomVariable z2 = density();
      bool ok = true;
      for (std::size_t a = 0; a < n && ok; ++a) {
        const AtomInfimum floorless = atom_infimum(map, a);
        const VectorQ& w = space.conditional_weights(a);
        if (floorless.value.is_pos_inf()) {
          for (const auto* zz : {&z, &z2}) {
            const Floor f{space.restrict(*zz, a), Rational(0)};
            ok = ok && atom_infimum(map, a, f).value.is_pos_inf();
          }
          continue;
        }
        // A near-minimizer: exact when attained, else a point below −64 or
        // within 1/64 of the finite infimum.
        std::optional<VectorQ> anchor = floorless.point;
        Extended ceiling = floorless.value;
        if (!anchor) {
          const Rational alpha = floorless.value.finite() ? floorless.value.value() + Rational(1, 64) : Rational(-64);
          anchor = descend_below(map, a, std::nullopt, alpha);
          ceiling = Extended(alpha);
        }
        if (!anchor) {
          ok = false;
          break;
        }
        for (const auto* zz : {&z, &z2}) {
          const VectorQ zl = space.restrict(*zz, a);
          const Rational low = local_pairing(*anchor, zl, w) - 1;
          Extended best = Extended::pos_inf();
          for (int j = 0; j <= 8; ++j) best = min(best, atom_infimum(map, a, Floor{zl, low + Rational(j, 64)}).value);
          if (best > ceiling) ok = false;
          if (floorless.value.finite() && best < floorless.value) ok = false;
          if (floorless.value.finite() && !(difference(best, floorless.value) <= Extended(Rational(1, 64)))) ok = false;
        }
      }
      grid.record(ok, context(x, z) + ", z2 = " + format(z2));
    }

    // Weak duality: ξ = x is feasible for Y = ⟨x, z⟩.
    {
      const ExtendedVector r = eval_R(map, mu, z), value = eval(map, x);
      bool ok = true;
      for (std::size_t a = 0; a < n; ++a) ok = ok && r[a] <= value[a];
      weak.record(ok, context(x, z));
    }
  }

  PropertyReport report;
  for (auto* t : {&monotone, &scaling, &witness, &locality, &lattice, &quasi_affine, &grid, &weak})
    report.properties.push_back(t->take());
  return report;
}

}  // namespace condual
