#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "ghc/poisson.hpp"

using namespace ghc;

namespace {

std::shared_ptr<const CausalLattice> lat2() {
  return std::make_shared<const CausalLattice>(2, 24, std::vector<int>{12}, 3);
}

ModelSpec spec(ModelKind k, Q mass = 0) {
  ModelSpec s;
  s.kind = k;
  s.mass = mass;
  return s;
}

BilinearForm random_form(std::mt19937_64& rng, const GradedSpace& v, int degree) {
  BilinearForm f = BilinearForm::zero(v, degree);
  for (int p : v.degrees()) {
    const int q = -degree - p;
    if (v.dim(p) == 0 || v.dim(q) == 0) continue;
    std::vector<Triplet> t;
    for (int i = 0; i < v.dim(p); ++i)
      for (int j = 0; j < v.dim(q); ++j)
        if (rng() % 2) t.push_back({i, j, make_q(static_cast<long>(rng() % 7) - 3, 1 + static_cast<long>(rng() % 2))});
    f.set(p, SparseMatrix::from_triplets(v.dim(p), v.dim(q), std::move(t)));
  }
  return f;
}

Vec random_vec(std::mt19937_64& rng, int n) {
  Vec v(static_cast<std::size_t>(n));
  for (auto& x : v) x = make_q(static_cast<long>(rng() % 9) - 4);
  return v;
}

// (d f)(x (x) y) = -(-1)^k [ f(Qx (x) y) + (-1)^p f(x (x) Qy) ], evaluated on vectors.
Q differential_oracle(const BilinearForm& f, const LadderComplex& v, int p, const Vec& x, const Vec& y) {
  const int q = -f.degree - 1 - p;
  Q s = 0;
  if (v.space.dim(p + 1) > 0) s += f.evaluate(p + 1, v.Q.apply(p, x), y);
  if (v.space.dim(q + 1) > 0) s += (p % 2 == 0 ? 1 : -1) * f.evaluate(p, x, v.Q.apply(q, y));
  return (f.degree % 2 == 0) ? -s : s;
}

struct Fixture {
  std::shared_ptr<const CausalLattice> lat = lat2();
  Model model;
  DifferentialPairing pr;
  QuasiIsoCertificate cert;
  HomotopyImages img;
  explicit Fixture(const ModelSpec& s) : model(s, lat), pr(build_pairing(model)) {
    std::mt19937_64 rng(5);
    cert = build_certificate(model, {8}, {14}, rng, false);
    img = witness_images(model, cert);
  }
};

}  // namespace

TEST_CASE("bilinear form algebra: braiding, asym and the differential") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 25; ++trial) {
    const LadderComplex v = random_complex(rng, -2, 2, 3);
    for (int k = -1; k <= 1; ++k) {
      const BilinearForm f = random_form(rng, v.space, k);
      CHECK(f.braided().braided() == f);
      CHECK(asym(f).antisymmetric());
      CHECK(asym(asym(f)) == asym(f));
      const BilinearForm df = differential(f, v);
      CHECK(differential(df, v).is_zero());
      CHECK(differential(f.braided(), v) == df.braided());
      for (int p : v.space.degrees()) {
        const int q = -k - 1 - p;
        if (v.space.dim(p) == 0 || v.space.dim(q) == 0) continue;
        const Vec x = random_vec(rng, v.space.dim(p)), y = random_vec(rng, v.space.dim(q));
        CHECK(df.evaluate(p, x, y) == differential_oracle(f, v, p, x, y));
      }
      const GradedMap id = GradedMap::identity(v.space);
      CHECK(precompose(f, id, id) == f);
    }
  }
}

TEST_CASE("precomposition with cochain maps commutes with the differential") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const LadderComplex v = random_complex(rng, -1, 2, 3);
    const BilinearForm f = random_form(rng, v.space, 0);
    const GradedMap h = random_map(rng, v.space, v.space, -1, 60);
    const GradedMap g = internal_hom_differential(h, v, v);  // a null-homotopic cochain map
    CHECK(differential(precompose(f, g, g), v) == precompose(differential(f, v), g, g));
  }
}

TEST_CASE("Poisson suite passes for KG and Maxwell") {
  for (const ModelSpec& s : {spec(ModelKind::KleinGordon), spec(ModelKind::KleinGordon, 1), spec(ModelKind::MaxwellP)}) {
    Model model(s, lat2());
    std::mt19937_64 rng(9);
    PoissonOptions opt;
    opt.minus = {8};
    opt.plus = {14};
    opt.slice = 10;
    opt.other_slice = 13;
    const PoissonReport r = run_poisson_suite(model, opt, rng);
    for (const Check& c : r.checks) {
      INFO(describe(s), ": ", c.name, " ", c.witness);
      CHECK(c.pass);
    }
    CHECK(r.ok());
    CHECK(r.checks.size() >= 20);
    bool perturbed = false;
    for (const Check& c : r.checks) perturbed = perturbed || c.name == "perturbed: tau+ - tau nonzero";
    CHECK(perturbed == (s.kind == ModelKind::MaxwellP));
  }
}

TEST_CASE("KG: tau is <<-, G(-)>> with G from the dense oracle") {
  Fixture fx(spec(ModelKind::KleinGordon, 1));
  const CovariantPoisson cp = covariant_poisson(fx.model, fx.pr, fx.cert, fx.img);
  const FiniteSpace& s = fx.cert.compact.at(1);
  const SparseMatrix tau = cp.tau.at(0);
  const Stencil box = fx.model.Q(0);
  for (int j = 0; j < s.dim(); j += 5) {
    const Field e = Field::basis(*fx.lat, s.form, s.cells[static_cast<std::size_t>(j)]);
    const Field g = *dense_green_solve(box, e, *fx.lat, Direction::Retarded) -
                    *dense_green_solve(box, e, *fx.lat, Direction::Advanced);
    for (int i = 0; i < s.dim(); ++i) CHECK(tau.get(i, j) == g.values[static_cast<std::size_t>(s.cells[static_cast<std::size_t>(i)])]);
  }
}

TEST_CASE("KG: sigma matches the fixed-time flux formula") {
  Fixture fx(spec(ModelKind::KleinGordon));
  const FiniteSpace& s = fx.cert.sc.at(0);
  std::mt19937_64 rng(12);
  for (int slice : {9, 12, 15}) {
    const BilinearForm sg = sigma(fx.model, fx.pr, fx.cert, slice);
    for (int trial = 0; trial < 10; ++trial) {
      const Vec a = random_vec(rng, s.dim()), b = random_vec(rng, s.dim());
      const Field fa = field_from(s, a, *fx.lat, {}), fb = field_from(s, b, *fx.lat, {});
      auto at = [&](const Field& f, int t, int x) {
        return f.values[static_cast<std::size_t>(fx.lat->cell_index({0, {t, x, 0}}))];
      };
      Q expect = 0;
      for (int x = 0; x < 12; ++x)
        expect += at(fa, slice, x) * at(fb, slice - 1, x) - at(fb, slice, x) * at(fa, slice - 1, x);
      CHECK(sg.evaluate(0, a, b) == expect);
    }
  }
}

TEST_CASE("self-adjoint Maxwell: lambda_M is a nonzero cycle") {
  Fixture fx(spec(ModelKind::MaxwellP));
  const CovariantPoisson cp = covariant_poisson(fx.model, fx.pr, fx.cert, fx.img);
  CHECK_FALSE(cp.lambda_m.is_zero());
  CHECK(differential(cp.lambda_m, fx.cert.fc1).is_zero());
  CHECK(cp.lambda_m == asym(cp.lambda_m_tilde));
  CHECK(cp.tau_plus == cp.tau);
  CHECK_FALSE(cp.tau.is_zero());
}

TEST_CASE("integrals of total differentials vanish") {
  for (const ModelSpec& s : {spec(ModelKind::KleinGordon), spec(ModelKind::MaxwellP)}) {
    Fixture fx(s);
    const Stencil d = exterior_derivative(2, 1);
    std::map<int, SlabImage> compact;
    for (const auto& [n, fs] : fx.cert.compact) compact[n] = compact_image(fs, *fx.lat);
    for (const auto& [ab, b] : fx.pr.components()) {
      if (b.out_form() != 1) continue;
      const SparseMatrix m =
          region_integral(compose_out(d, b), top_cells(*fx.lat), compact.at(ab.first), compact.at(ab.second), *fx.lat);
      CHECK(m.is_zero());
    }
  }
}

TEST_CASE("Cauchy homotopy: equal slices give zero, swapping negates") {
  Fixture fx(spec(ModelKind::MaxwellP));
  const BilinearForm s1 = sigma(fx.model, fx.pr, fx.cert, 10), s2 = sigma(fx.model, fx.pr, fx.cert, 13);
  const BilinearForm l1 = compatibility_homotopy(fx.model, fx.pr, fx.cert, fx.img, 10).lambda;
  const BilinearForm l2 = compatibility_homotopy(fx.model, fx.pr, fx.cert, fx.img, 13).lambda;
  CHECK(s1 != s2);
  CHECK(cauchy_homotopy(s1, s1, l1, l1, fx.cert).is_zero());
  const BilinearForm fwd = cauchy_homotopy(s1, s2, l1, l2, fx.cert);
  const BilinearForm back = cauchy_homotopy(s2, s1, l2, l1, fx.cert);
  CHECK(differential(fwd, fx.cert.fsc) == s1 - s2);
  CHECK(back == fwd.scaled(Q(-1)));
}

TEST_CASE("undetermined integrands are rejected") {
  Fixture fx(spec(ModelKind::KleinGordon));
  // Lambda+ is not known to vanish past the top of the slab
  const SlabImage& plus = fx.img.plus.at(0);
  BilinearStencil sq(2, plus.form, plus.form, 2);
  sq.add(3, 0, {2, 0, 0}, 0, {2, 0, 0}, Q(1));
  CHECK_THROWS_AS(region_integral(sq, top_cells(*fx.lat), plus, plus, *fx.lat), GeometryTooTight);
}
