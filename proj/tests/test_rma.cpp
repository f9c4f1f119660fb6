#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "ghc/rma.hpp"

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

Model make(const ModelSpec& s) { return Model(s, s.m == 3 ? lat3() : lat2()); }

std::vector<ModelSpec> all_models() {
  return {spec(ModelKind::KleinGordon),           spec(ModelKind::KleinGordon, 1),
          spec(ModelKind::DeRham),                spec(ModelKind::DeRham, 0, 2, make_q(1, 2)),
          spec(ModelKind::ChernSimons, 0, 3),     spec(ModelKind::MaxwellP)};
}

}  // namespace

TEST_CASE("Green's homotopies contract and respect causal support") {
  std::mt19937_64 rng(11);
  for (const ModelSpec& s : all_models()) {
    const Model model = make(s);
    for (Direction dir : {Direction::Retarded, Direction::Advanced}) {
      INFO(describe(s), dir == Direction::Retarded ? " retarded" : " advanced");
      const HomotopyReport r = check_green_homotopy(model, dir, rng, s.m == 3 ? 3 : 6);
      CHECK_MESSAGE(r.homotopy.pass, r.homotopy.witness);
      CHECK_MESSAGE(r.support.pass, r.support.witness);
      CHECK_MESSAGE(r.two_homotopy.pass, r.two_homotopy.witness);
      CHECK(r.homotopy.cases > 0);
      CHECK(r.two_homotopy.cases > 0);
    }
  }
}

TEST_CASE("perturbed de Rham witness separates the two homotopies") {
  const Model model = make(spec(ModelKind::DeRham, 0, 2, make_q(1, 2)));
  const Model plain = make(spec(ModelKind::DeRham));
  std::mt19937_64 rng(3);
  bool perturbed_differs = false;
  for (int trial = 0; trial < 10; ++trial) {
    const Field phi = random_admissible_field(model.lattice(), model.form(1), rng, 3);
    const Field a = green_homotopy(model, 1, Direction::Retarded, phi);
    const Field b = green_homotopy_alt(model, 1, Direction::Retarded, phi);
    const Window w = a.window.meet(b.window);
    if (first_difference(a, b, w, model.lattice())) perturbed_differs = true;
    CHECK(!a.is_zero());
    CHECK(!b.is_zero());
    const Field c = green_homotopy(plain, 1, Direction::Retarded, phi);
    const Field d = green_homotopy_alt(plain, 1, Direction::Retarded, phi);
    CHECK_FALSE(first_difference(c, d, c.window.meet(d.window), plain.lattice()).has_value());
  }
  CHECK(perturbed_differs);
}

TEST_CASE("Green's homotopy rejects the bottom degree") {
  const Model model = make(spec(ModelKind::KleinGordon));
  const Field phi = Field::zero(model.lattice(), model.form(0));
  CHECK_THROWS_AS(green_homotopy(model, 0, Direction::Retarded, phi), std::invalid_argument);
}

TEST_CASE("KG: Lambda equals G+ - G- from the dense oracle") {
  for (Q mass : {Q(0), Q(1)}) {
    const Model model = make(spec(ModelKind::KleinGordon, mass));
    const CausalLattice& lat = model.lattice();
    std::mt19937_64 rng(5);
    const QuasiIsoCertificate c = build_certificate(model, {8}, {14}, rng, false);
    const FiniteSpace& src = c.compact.at(1);
    const FiniteSpace& dst = c.sc.at(0);
    const SparseMatrix& lam = c.lambda.at(0);
    REQUIRE(lam.cols() == src.dim());
    const Stencil box = model.Q(0);
    for (int j = 0; j < src.dim(); j += 7) {
      const Field e = Field::basis(lat, src.form, src.cells[static_cast<std::size_t>(j)]);
      const auto gp = dense_green_solve(box, e, lat, Direction::Retarded);
      const auto gm = dense_green_solve(box, e, lat, Direction::Advanced);
      REQUIRE(gp.has_value());
      REQUIRE(gm.has_value());
      Vec expect = vector_of(dst, *gp - *gm, lat);
      Vec column(static_cast<std::size_t>(dst.dim()));
      const SparseMatrix t = lam.transpose();
      for (const auto& [row, v] : t.row(j)) column[static_cast<std::size_t>(row)] = v;
      CHECK(column == expect);
    }
  }
}

TEST_CASE("quasi-isomorphism certificates for KG and Maxwell") {
  const std::vector<ModelSpec> specs = {spec(ModelKind::KleinGordon), spec(ModelKind::KleinGordon, 1),
                                        spec(ModelKind::MaxwellP)};
  for (const ModelSpec& s : specs) {
    INFO(describe(s));
    const Model model = make(s);
    std::mt19937_64 rng(17);
    const QuasiIsoCertificate c = build_certificate(model, {8}, {14}, rng);
    CHECK_MESSAGE(c.lambda_cochain.pass, c.lambda_cochain.witness);
    CHECK_MESSAGE(c.theta_cochain.pass, c.theta_cochain.witness);
    CHECK_MESSAGE(c.xi_identity.pass, c.xi_identity.witness);
    CHECK_MESSAGE(c.upsilon_identity.pass, c.upsilon_identity.witness);
    CHECK_MESSAGE(c.theta_branches.pass, c.theta_branches.witness);
    CHECK_MESSAGE(c.cone_acyclic.pass, c.cone_acyclic.witness);
    for (const auto& [n, d] : c.cone_dims) CHECK(d == 0);
    // Lambda is a quasi-isomorphism, so both sides carry the same cohomology
    for (int g = c.fc1.space.min_degree(); g <= c.fsc.space.max_degree(); ++g) {
      const int a = c.fc1_dims.count(g) ? c.fc1_dims.at(g) : 0;
      const int b = c.fsc_dims.count(g) ? c.fsc_dims.at(g) : 0;
      CHECK(a == b);
    }
    if (s.kind == ModelKind::KleinGordon) {
      CHECK(c.fsc_dims.at(0) == 24);
      CHECK(c.fsc_dims.at(1) == 0);
    }
  }
}

TEST_CASE("de Rham certificate recovers the circle's cohomology") {
  const Model model = make(spec(ModelKind::DeRham));
  std::mt19937_64 rng(2);
  const QuasiIsoCertificate c = build_certificate(model, {9}, {13}, rng);
  CHECK(c.ok());
  CHECK(c.fsc_dims.at(0) == 1);
  CHECK(c.fsc_dims.at(1) == 1);
  CHECK(c.fsc_dims.at(2) == 0);
}

TEST_CASE("a broken Lambda is caught") {
  const Model model = make(spec(ModelKind::KleinGordon));
  std::mt19937_64 rng(1);
  QuasiIsoCertificate c = build_certificate(model, {8}, {14}, rng, false);
  const GradedMap zero = GradedMap::zero(c.fc1.space, c.fsc.space, 0);
  bool nonzero = false;
  for (const auto& [n, d] : cohomology_dims(cone(zero, c.fc1, c.fsc))) nonzero = nonzero || d != 0;
  CHECK(nonzero);
  const GradedMap half = c.lambda.scaled(make_q(1, 2));
  CHECK_FALSE(internal_hom_differential(c.xi, c.fc1, c.fc1) ==
              GradedMap::identity(c.fc1.space) - compose(c.theta, half));
}

TEST_CASE("certificate geometry that does not fit is rejected") {
  const Model model = make(spec(ModelKind::MaxwellP));
  std::mt19937_64 rng(1);
  CHECK_THROWS_AS(build_certificate(model, {4}, {19}, rng, false), GeometryTooTight);
  const Model cs = make(spec(ModelKind::ChernSimons, 0, 3));
  CHECK_THROWS_AS(build_certificate(cs, {4}, {7}, rng, false), GeometryTooTight);
}

TEST_CASE("sections supported in J(K) form an acyclic complex") {
  std::mt19937_64 rng(23);
  for (const ModelSpec& s : all_models()) {
    const Model model = make(s);
    for (int trial = 0; trial < 3; ++trial) {
      const Region k = random_admissible_region(model.lattice(), rng, 3);
      for (Direction dir : {Direction::Retarded, Direction::Advanced}) {
        INFO(describe(s), " trial ", trial);
        const AcyclicityReport r = check_support_acyclicity(model, k, dir, rng);
        CHECK_MESSAGE(r.acyclic.pass, r.acyclic.witness);
        CHECK_MESSAGE(r.contraction.pass, r.contraction.witness);
        int total = 0;
        for (const auto& [n, d] : r.e_dims) total += d;
        CHECK(total > 0);
      }
    }
  }
}

TEST_CASE("admissible regions stay inside the margin band") {
  const auto lat = lat2();
  std::mt19937_64 rng(9);
  for (int i = 0; i < 50; ++i) {
    const Region k = random_admissible_region(*lat, rng, 4);
    const auto sites = k.sorted_sites();
    CHECK(!sites.empty());
    CHECK(sites.size() <= 4);
    for (int site : sites) {
      const int t = lat->site(site)[0];
      CHECK(t >= lat->margin());
      CHECK(t <= lat->n_time() - 1 - lat->margin());
    }
  }
}

TEST_CASE("full-slab de Rham complex has nonzero H0") {
  const Model model = make(spec(ModelKind::DeRham));
  const auto dims = cohomology_dims(model.slab_complex());
  CHECK(dims.at(0) == 1);
}
