#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "ghc/graded.hpp"

using namespace ghc;

namespace {

std::vector<Vec> random_dense(std::mt19937_64& rng, int r, int c, int zero_pct) {
  std::uniform_int_distribution<int> v(-4, 4), p(0, 99);
  std::vector<Vec> a(static_cast<std::size_t>(r), Vec(static_cast<std::size_t>(c)));
  for (auto& row : a)
    for (auto& x : row)
      if (p(rng) >= zero_pct) x = make_q(v(rng), 1 + static_cast<int>(rng() % 3));
  return a;
}

// Low-rank matrix as a product of thin factors.
std::vector<Vec> random_low_rank(std::mt19937_64& rng, int r, int c, int k) {
  auto a = SparseMatrix::from_dense(random_dense(rng, r, k, 20));
  auto b = SparseMatrix::from_dense(random_dense(rng, k, c, 20));
  return (a * b).to_dense();
}

GradedSpace space(std::map<int, int> d) {
  GradedSpace s;
  s.dims = std::move(d);
  return s;
}

// Cubical cochain complex of the n x n periodic square, built directly.
LadderComplex torus_de_rham(int n) {
  auto v = [n](int x, int y) { return ((x + n) % n) * n + (y + n) % n; };
  std::vector<Triplet> d0, d1;
  // edges: 0..n^2-1 along x, n^2..2n^2-1 along y
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      const int ex = v(x, y), ey = n * n + v(x, y);
      d0.push_back({ex, v(x + 1, y), Q(1)});
      d0.push_back({ex, v(x, y), Q(-1)});
      d0.push_back({ey, v(x, y + 1), Q(1)});
      d0.push_back({ey, v(x, y), Q(-1)});
      // face (x,y): boundary x-edges at y and y+1, y-edges at x and x+1
      const int f = v(x, y);
      d1.push_back({f, v(x, y), Q(1)});
      d1.push_back({f, v(x, y + 1), Q(-1)});
      d1.push_back({f, n * n + v(x + 1, y), Q(1)});
      d1.push_back({f, n * n + v(x, y), Q(-1)});
    }
  std::map<int, SparseMatrix> q;
  q[0] = SparseMatrix::from_triplets(2 * n * n, n * n, d0);
  q[1] = SparseMatrix::from_triplets(n * n, 2 * n * n, d1);
  return make_complex(space({{0, n * n}, {1, 2 * n * n}, {2, n * n}}), q);
}

}  // namespace

TEST_CASE("sparse rank agrees with dense Bareiss on random matrices") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    const int r = 1 + static_cast<int>(rng() % 12), c = 1 + static_cast<int>(rng() % 12);
    std::vector<Vec> a = (trial % 2) ? random_dense(rng, r, c, 60)
                                     : random_low_rank(rng, r, c, 1 + static_cast<int>(rng() % 4));
    SparseMatrix m = SparseMatrix::from_dense(a);
    const int rk = rank(m);
    CHECK(rk == bareiss_rank(a));
    CHECK(rk == rank(m.transpose()));
    CHECK(rk + static_cast<int>(kernel_basis(a, c).size()) == c);
  }
}

TEST_CASE("kernel vectors are annihilated and solve is consistent") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 30; ++trial) {
    auto a = random_low_rank(rng, 6, 8, 3);
    SparseMatrix m = SparseMatrix::from_dense(a);
    for (const Vec& k : kernel_basis(a, 8))
      for (const Q& x : m.apply(k)) CHECK(x == 0);
    Vec x0(8);
    for (auto& x : x0) x = Q(static_cast<int>(rng() % 7) - 3);
    Vec b = m.apply(x0);
    auto sol = solve(a, b, 8);
    REQUIRE(sol.has_value());
    CHECK(m.apply(*sol) == b);
  }
}

TEST_CASE("internal hom differential squares to zero") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 25; ++trial) {
    auto V = random_complex(rng, -1, 2, 3);
    auto W = random_complex(rng, -1, 2, 3);
    const int deg = static_cast<int>(rng() % 3) - 1;
    auto f = random_map(rng, V.space, W.space, deg);
    auto df = internal_hom_differential(f, V, W);
    CHECK(df.degree == deg + 1);
    CHECK(internal_hom_differential(df, V, W).is_zero());
  }
}

TEST_CASE("differential is a derivation for composition") {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 20; ++trial) {
    auto U = random_complex(rng, 0, 2, 3);
    auto V = random_complex(rng, 0, 2, 3);
    auto W = random_complex(rng, 0, 2, 3);
    const int a = static_cast<int>(rng() % 2), b = static_cast<int>(rng() % 2);
    auto f = random_map(rng, U.space, V.space, a);
    auto g = random_map(rng, V.space, W.space, b);
    auto lhs = internal_hom_differential(compose(g, f), U, W);
    auto rhs = compose(internal_hom_differential(g, V, W), f) +
               compose(g, internal_hom_differential(f, U, V)).scaled(Q(parity_sign(b)));
    CHECK(lhs == rhs);
  }
}

TEST_CASE("shift laws") {
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 10; ++trial) {
    auto V = random_complex(rng, 0, 3, 3);
    auto V1 = shift(V, 1);
    CHECK(V1.space.dim(-1) == V.space.dim(0));
    CHECK(V1.Q.at(0) == V.Q.at(1).scaled(Q(-1)));
    auto V2 = shift(V1, 1);
    auto V2d = shift(V, 2);
    CHECK(V2.Q == V2d.Q);
    CHECK(cohomology_dims(V1).size() == cohomology_dims(V).size());
    for (auto [n, h] : cohomology_dims(V)) CHECK(cohomology_dims(V1)[n - 1] == h);
  }
}

TEST_CASE("cone of identity is acyclic") {
  std::mt19937_64 rng(16);
  for (int trial = 0; trial < 10; ++trial) {
    auto V = random_complex(rng, -1, 2, 4);
    CHECK(is_acyclic(cone(GradedMap::identity(V.space), V, V)));
  }
}

TEST_CASE("cone rejects non-cochain maps") {
  std::mt19937_64 rng(17);
  auto V = random_complex(rng, 0, 2, 3);
  V = make_complex(space({{0, 1}, {1, 1}}), {{0, SparseMatrix::identity(1)}});
  auto f = GradedMap::zero(V.space, V.space, 0);
  f.set(0, SparseMatrix::identity(1));
  CHECK_THROWS(cone(f, V, V));
}

TEST_CASE("cone acyclic iff quasi-isomorphism on random complexes") {
  std::mt19937_64 rng(18);
  int acyclic = 0, not_acyclic = 0;
  for (int trial = 0; trial < 10; ++trial) {
    auto V = random_complex(rng, 0, 2, 3);
    // W = V (+) (K -> K), f = inclusion
    GradedSpace ws = V.space;
    ws.dims[0] += 1;
    ws.dims[1] += 1;
    std::map<int, SparseMatrix> q;
    q[0] = SparseMatrix::block2x2(V.Q.at(0), SparseMatrix(V.space.dim(1), 1), SparseMatrix(1, V.space.dim(0)),
                                  SparseMatrix::identity(1));
    q[1] = SparseMatrix::block2x2(V.Q.at(1), SparseMatrix(V.space.dim(2), 1), SparseMatrix(0, V.space.dim(1)),
                                  SparseMatrix(0, 1));
    q[2] = V.Q.at(2);
    auto W = make_complex(ws, q);
    auto incl = GradedMap::zero(V.space, W.space, 0);
    for (int n : V.space.degrees()) {
      std::vector<Triplet> t;
      for (int i = 0; i < V.space.dim(n); ++i) t.push_back({i, i, Q(1)});
      incl.set(n, SparseMatrix::from_triplets(W.space.dim(n), V.space.dim(n), t));
    }
    auto nonzero = [](std::map<int, int> h) {
      std::erase_if(h, [](const auto& e) { return e.second == 0; });
      return h;
    };
    // inclusion of a direct summand: iso on H iff dims agree
    const bool qiso = nonzero(cohomology_dims(V)) == nonzero(cohomology_dims(W));
    CHECK(qiso);
    CHECK(is_acyclic(cone(incl, V, W)) == qiso);
    acyclic += is_acyclic(cone(incl, V, W));

    // zero map V -> V is a qiso iff V is acyclic
    auto z = GradedMap::zero(V.space, V.space, 0);
    const bool vac = is_acyclic(V);
    CHECK(is_acyclic(cone(z, V, V)) == vac);
    not_acyclic += !vac;
  }
  CHECK(acyclic == 10);
  CHECK(not_acyclic > 0);
}

TEST_CASE("cubical de Rham of the periodic square has Betti numbers 1,2,1") {
  for (int n : {3, 4, 5}) {
    auto T = torus_de_rham(n);
    auto h = cohomology_dims(T);
    CHECK(h[0] == 1);
    CHECK(h[1] == 2);
    CHECK(h[2] == 1);
  }
}

TEST_CASE("check_homotopy detects exact and perturbed homotopies") {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 15; ++trial) {
    auto V = random_complex(rng, 0, 2, 3);
    auto W = random_complex(rng, 0, 2, 3);
    auto h = random_map(rng, V.space, W.space, -1);
    auto f = GradedMap::zero(V.space, W.space, 0);
    auto g = internal_hom_differential(h, V, W);
    CHECK(check_homotopy(f, g, h, V, W));
    if (!g.is_zero()) {
      auto g2 = g.scaled(Q(2));
      CHECK_FALSE(check_homotopy(f, g2, h, V, W));
    }
  }
}

TEST_CASE("graded map JSON roundtrip") {
  std::mt19937_64 rng(20);
  auto V = random_complex(rng, -1, 1, 3);
  auto f = random_map(rng, V.space, V.space, 1);
  auto g = graded_map_from_json(to_json(f));
  CHECK(f == g);
}
