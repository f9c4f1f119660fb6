#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "ghc/pairing.hpp"

using namespace ghc;

namespace {

std::shared_ptr<const CausalLattice> lat2(int n = 24, int x = 12, int margin = 3) {
  return std::make_shared<const CausalLattice>(2, n, std::vector<int>{x}, margin);
}

std::shared_ptr<const CausalLattice> lat3() {
  return std::make_shared<const CausalLattice>(3, 12, std::vector<int>{8, 8}, 3);
}

ModelSpec spec(ModelKind k, Q mass = 0, int m = 2, Q eps = 0) {
  ModelSpec s;
  s.kind = k;
  s.mass = mass;
  s.m = m;
  s.perturbation = eps;
  return s;
}

std::vector<ModelSpec> shipped() {
  return {spec(ModelKind::KleinGordon), spec(ModelKind::KleinGordon, 1), spec(ModelKind::DeRham),
          spec(ModelKind::ChernSimons, 0, 3), spec(ModelKind::MaxwellP)};
}

Stencil box(int m, int k) {
  Stencil b(m, k, k);
  if (k > 0) b = b + compose(exterior_derivative(m, k - 1), codifferential(m, k));
  if (k < m) b = b + compose(codifferential(m, k + 1), exterior_derivative(m, k));
  return b;
}

Field random_compact(const CausalLattice& lat, int form, std::mt19937_64& rng, int t_lo, int t_hi, int n) {
  Field f = Field::zero(lat, form);
  for (int i = 0; i < n; ++i) {
    const int idx = static_cast<int>(rng() % static_cast<unsigned>(lat.cell_count(form)));
    const Cell c = lat.cell(form, idx);
    if (c.base[0] < t_lo || span_of(c).hi > t_hi) continue;
    f.values[static_cast<std::size_t>(idx)] = make_q(static_cast<long>(rng() % 9) - 4, 1 + static_cast<long>(rng() % 3));
  }
  return f;
}

Field random_full(const CausalLattice& lat, int form, std::mt19937_64& rng) {
  Field f = Field::zero(lat, form);
  for (auto& v : f.values) v = make_q(static_cast<long>(rng() % 7) - 3);
  return f;
}

Q value(const Field& f, const CausalLattice& lat, int type, Point p) {
  const int idx = lat.cell_index({type, p});
  return idx < 0 ? Q(0) : f.values[static_cast<std::size_t>(idx)];
}

}  // namespace

TEST_CASE("shipped models: Q^2 = 0 and certified witnesses") {
  for (const auto& s : shipped()) {
    Model model = build_model(s, s.m == 3 ? lat3() : lat2());
    const WitnessReport r = validate_witness(model);
    INFO(describe(s));
    CHECK(r.q_squared_zero);
    CHECK(r.certified);
    CHECK(r.failures.empty());
  }
}

TEST_CASE("slab-level complexes square to zero") {
  for (const auto& s : shipped()) {
    auto lat = s.m == 3 ? std::make_shared<const CausalLattice>(3, 8, std::vector<int>{4, 4}, 2) : lat2(10, 6, 2);
    Model model = build_model(s, lat);
    const LadderComplex c = model.slab_complex();
    CHECK_NOTHROW(c.validate());
    CHECK(c.space.min_degree() == model.deg_lo());
    CHECK(c.space.max_degree() == model.deg_hi());
  }
}

TEST_CASE("operator tables") {
  Model kg = build_model(spec(ModelKind::KleinGordon, make_q(1, 2)), lat2());
  const Stencil p = box(2, 0) - Stencil::identity(2, 0).scaled(make_q(1, 4));
  CHECK(kg.Q(0) == p);
  CHECK(kg.P(0) == p);
  CHECK(kg.P(1) == p);
  CHECK(kg.W(1) == Stencil::identity(2, 0));

  Model dr = build_model(spec(ModelKind::DeRham), lat2());
  for (int n = 0; n <= 2; ++n) CHECK(dr.P(n) == box(2, n));

  Model mw = build_model(spec(ModelKind::MaxwellP), lat2());
  CHECK(mw.deg_lo() == -1);
  CHECK(mw.deg_hi() == 2);
  CHECK(mw.W(0) == codifferential(2, 1));
  CHECK(mw.W(1) == Stencil::identity(2, 1));
  CHECK(mw.W(2) == exterior_derivative(2, 0));
  CHECK(mw.Q(0) == compose(codifferential(2, 2), exterior_derivative(2, 1)));
  CHECK(mw.P(-1) == box(2, 0));
  CHECK(mw.P(0) == box(2, 1));
  CHECK(mw.P(1) == box(2, 1));
  CHECK(mw.P(2) == box(2, 0));

  Model pert = build_model(spec(ModelKind::DeRham, 0, 2, make_q(1, 2)), lat2());
  const auto cert = certify_causal(pert.P(1));
  CHECK(cert.ok);
  CHECK(cert.leading.at(1) == make_q(3, 2));
  CHECK(certify_causal(pert.P(0)).leading.at(0) == make_q(3, 2));
}

TEST_CASE("invalid model specifications are rejected") {
  CHECK_THROWS(build_model(spec(ModelKind::ChernSimons), lat2()));
  CHECK_THROWS(build_model(spec(ModelKind::KleinGordon, -1), lat2()));
  CHECK_THROWS(build_model(spec(ModelKind::KleinGordon, 0, 2, make_q(1, 2)), lat2()));
  ModelSpec mw = spec(ModelKind::MaxwellP);
  mw.p = 2;
  CHECK_THROWS(build_model(mw, lat2()));
  CHECK_THROWS(build_model(spec(ModelKind::DeRham, 0, 3), lat2()));
  CHECK_THROWS(parse_kind("yang_mills"));
  CHECK(parse_kind("maxwell_p") == ModelKind::MaxwellP);
}

TEST_CASE("Chern-Simons complex is the de Rham complex shifted by one") {
  auto lat = std::make_shared<const CausalLattice>(3, 8, std::vector<int>{4, 4}, 2);
  const LadderComplex cs = build_model(spec(ModelKind::ChernSimons, 0, 3), lat).slab_complex();
  const LadderComplex dr = shift(build_model(spec(ModelKind::DeRham, 0, 3), lat).slab_complex(), 1);
  CHECK(cs.space == dr.space);
  GradedMap iso = GradedMap::zero(cs.space, dr.space, 0);
  GradedMap inv = GradedMap::zero(dr.space, cs.space, 0);
  for (int n : cs.space.degrees()) {
    const Q sg = (n % 2 == 0) ? Q(1) : Q(-1);
    iso.set(n, SparseMatrix::identity(cs.space.dim(n)).scaled(sg));
    inv.set(n, SparseMatrix::identity(cs.space.dim(n)).scaled(sg));
  }
  CHECK(is_cochain_map(iso, cs, dr));
  CHECK(is_cochain_map(inv, dr, cs));
  CHECK(compose(inv, iso) == GradedMap::identity(cs.space));
  CHECK_FALSE(cs.Q == dr.Q);
}

TEST_CASE("pairings are antisymmetric and compatible") {
  for (const auto& s : {spec(ModelKind::KleinGordon), spec(ModelKind::KleinGordon, 1), spec(ModelKind::MaxwellP)}) {
    Model model = build_model(s, lat2());
    const DifferentialPairing pr = build_pairing(model);
    const PairingReport r = validate_pairing(model, pr, 11, 20);
    INFO(describe(s));
    CHECK(r.antisymmetric);
    CHECK(r.compatible);
    CHECK(r.evaluated);
    CHECK(r.failures.empty());
    for (const auto& [ab, b] : pr.components()) CHECK(b.out_form() == ab.first + ab.second + 1);
  }
  CHECK_THROWS(build_pairing(build_model(spec(ModelKind::ChernSimons, 0, 3), lat3())));
  CHECK_THROWS(build_pairing(build_model(spec(ModelKind::DeRham), lat2())));
}

TEST_CASE("KG top pairing is the pointwise product on cubes") {
  auto lat = lat2();
  Model model = build_model(spec(ModelKind::KleinGordon, 1), lat);
  const DifferentialPairing pr = build_pairing(model);
  std::mt19937_64 rng(3);
  const Field a = random_full(*lat, 0, rng), b = random_full(*lat, 0, rng);
  const Field v = evaluate(pr.component(1, 0), a, b, *lat);
  const Field w = evaluate(pr.component(0, 1), a, b, *lat);
  for (int i = 0; i < lat->cell_count(2); ++i) {
    const Cell c = lat->cell(2, i);
    const Q prod = value(a, *lat, 0, c.base) * value(b, *lat, 0, c.base);
    CHECK(v.values[static_cast<std::size_t>(i)] == prod);
    CHECK(w.values[static_cast<std::size_t>(i)] == -prod);
  }
}

TEST_CASE("a corrupted pairing is caught") {
  Model model = build_model(spec(ModelKind::MaxwellP), lat2());
  DifferentialPairing pr = build_pairing(model);
  BilinearStencil bad = pr.component(0, 0);
  bad.add(1 << 1, 1 << 0, {0, 0, 0}, 1 << 0, {0, 1, 0}, Q(1));
  pr.set(0, 0, bad);
  const PairingReport r = validate_pairing(model, pr, 4, 20);
  CHECK_FALSE(r.antisymmetric);
  CHECK_FALSE(r.compatible);
}

TEST_CASE("KG slice integral of the generated pairing matches the flux oracle") {
  auto lat = lat2();
  for (const Q mass : {Q(0), Q(1)}) {
    Model model = build_model(spec(ModelKind::KleinGordon, mass), lat);
    const DifferentialPairing pr = build_pairing(model);
    // independent primitive: j_a(u) = phi1(u) phi2(u + e_a) - phi2(u) phi1(u + e_a),
    // x-edge at w carries j_t(w - e_t), t-edge at w carries j_x(w - e_x)
    BilinearStencil flux(2, 0, 0, 1);
    flux.add(2, 0, {-1, 0, 0}, 0, {0, 0, 0}, Q(1));
    flux.add(2, 0, {0, 0, 0}, 0, {-1, 0, 0}, Q(-1));
    flux.add(1, 0, {0, -1, 0}, 0, {0, 0, 0}, Q(1));
    flux.add(1, 0, {0, 0, 0}, 0, {0, -1, 0}, Q(-1));
    CHECK(compose_out(exterior_derivative(2, 1), flux) == compatibility_source(model, pr, 0, 0));
    CHECK(flux == graded_swap(flux, 0, 0));

    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 10; ++trial) {
      const Field a = random_full(*lat, 0, rng), b = random_full(*lat, 0, rng);
      for (int t_sigma : {6, 12, 17}) {
        Q generated = 0, oracle = 0, closed_form = 0;
        for (int x = 0; x < 12; ++x) {
          const Cell e{2, {t_sigma, x, 0}};
          generated += evaluate_at(pr.component(0, 0), a, b, e, *lat);
          oracle += evaluate_at(flux, a, b, e, *lat);
          closed_form += value(a, *lat, 0, {t_sigma, x, 0}) * value(b, *lat, 0, {t_sigma - 1, x, 0}) -
                         value(b, *lat, 0, {t_sigma, x, 0}) * value(a, *lat, 0, {t_sigma - 1, x, 0});
        }
        CHECK(generated == oracle);
        CHECK(-oracle == closed_form);
      }
    }
  }
}

TEST_CASE("self-adjoint witnesses and their consequences") {
  for (const auto& s : {spec(ModelKind::KleinGordon), spec(ModelKind::KleinGordon, 1), spec(ModelKind::MaxwellP)}) {
    Model model = build_model(s, lat2());
    const SelfAdjointReport r = validate_self_adjoint_witness(model, build_pairing(model));
    INFO(describe(s));
    CHECK(r.qww);
    CHECK(r.integral);
    CHECK(r.pw);
    CHECK(r.p_symmetric);
  }

  Model mw = build_model(spec(ModelKind::MaxwellP), lat2());
  const DifferentialPairing pr = build_pairing(mw);
  std::mt19937_64 rng(17);
  for (int n = 0; n <= 2; ++n)
    for (Direction dir : {Direction::Retarded, Direction::Advanced}) {
      const Field f = random_compact(mw.lattice(), mw.form(n), rng, 9, 14, 8);
      const Field a = mw.green(n - 1, dir).solve(apply(mw.W(n), f, mw.lattice()));
      const Field b = apply(mw.W(n), mw.green(n, dir).solve(f), mw.lattice());
      CHECK_FALSE(first_difference(a, b, a.window.meet(b.window), mw.lattice()).has_value());
    }

  Model doubled = build_model(spec(ModelKind::MaxwellP), lat2());
  doubled.set_W(0, doubled.W(0).scaled(Q(2)));
  const SelfAdjointReport bad = validate_self_adjoint_witness(doubled, pr);
  CHECK_FALSE(bad.integral);
  CHECK_FALSE(bad.failures.empty());

  // a uniform rescaling of every witness component rescales both sides of (ii) alike
  Model uniform = build_model(spec(ModelKind::MaxwellP), lat2());
  for (int n = 0; n <= 2; ++n) uniform.set_W(n, uniform.W(n).scaled(Q(2)));
  CHECK(validate_self_adjoint_witness(uniform, pr).integral);
  CHECK(validate_witness(uniform).certified);
}

TEST_CASE("sparse cochain evaluation agrees with lattice evaluation") {
  auto lat = lat2(24, 12, 3);
  Model model = build_model(spec(ModelKind::MaxwellP), lat);
  const DifferentialPairing pr = build_pairing(model);
  std::mt19937_64 rng(5);
  const Field a = random_compact(*lat, 1, rng, 10, 13, 6), b = random_compact(*lat, 1, rng, 10, 13, 6);
  SparseCochain sa, sb;
  for (int i : a.support(*lat)) {
    const Cell c = lat->cell(1, i);
    sa[{c.type, c.base}] = a.values[static_cast<std::size_t>(i)];
  }
  for (int i : b.support(*lat)) {
    const Cell c = lat->cell(1, i);
    sb[{c.type, c.base}] = b.values[static_cast<std::size_t>(i)];
  }
  const SparseCochain s = evaluate(pr.component(0, 0), sa, sb);
  const Field f = evaluate(pr.component(0, 0), a, b, *lat);
  Q total_sparse = 0, total_field = 0;
  for (const auto& [c, v] : s) {
    Point p = c.second;
    p[1] = ((p[1] % 12) + 12) % 12;
    CHECK(value(f, *lat, c.first, p) == v);
    total_sparse += v;
  }
  for (const auto& v : f.values) total_field += v;
  CHECK(total_sparse == total_field);
}
