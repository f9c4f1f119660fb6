#include "ghc/graded.hpp"

#include <stdexcept>

namespace ghc {

int GradedSpace::total_dim() const {
  int t = 0;
  for (const auto& [n, d] : dims) t += d;
  return t;
}

int GradedSpace::min_degree() const {
  for (const auto& [n, d] : dims)
    if (d > 0) return n;
  return 0;
}

int GradedSpace::max_degree() const {
  int m = 0;
  bool any = false;
  for (const auto& [n, d] : dims)
    if (d > 0) {
      m = n;
      any = true;
    }
  return any ? m : 0;
}

std::vector<int> GradedSpace::degrees() const {
  std::vector<int> out;
  for (const auto& [n, d] : dims)
    if (d > 0) out.push_back(n);
  return out;
}

std::map<int, int> GradedSpace::dims_normalized() const {
  std::map<int, int> out;
  for (const auto& [n, d] : dims)
    if (d > 0) out[n] = d;
  return out;
}

GradedMap GradedMap::zero(const GradedSpace& src, const GradedSpace& dst, int degree) {
  GradedMap f;
  f.degree = degree;
  f.src = src;
  f.dst = dst;
  return f;
}

GradedMap GradedMap::identity(const GradedSpace& v) {
  GradedMap f = zero(v, v, 0);
  for (int n : v.degrees()) f.block[n] = SparseMatrix::identity(v.dim(n));
  return f;
}

SparseMatrix GradedMap::at(int n) const {
  auto it = block.find(n);
  if (it != block.end()) return it->second;
  return SparseMatrix(dst.dim(n + degree), src.dim(n));
}

void GradedMap::set(int n, SparseMatrix m) {
  if (m.rows() != dst.dim(n + degree) || m.cols() != src.dim(n))
    throw std::invalid_argument("graded map block shape mismatch at degree " + std::to_string(n));
  block[n] = std::move(m);
}

namespace {

void require_same_type(const GradedMap& a, const GradedMap& b) {
  if (a.degree != b.degree || !(a.src == b.src) || !(a.dst == b.dst))
    throw std::invalid_argument("graded maps of different type");
}

std::vector<int> union_degrees(const GradedMap& a, const GradedMap& b) {
  std::vector<int> out;
  for (const auto& [n, m] : a.block) out.push_back(n);
  for (const auto& [n, m] : b.block)
    if (!a.block.count(n)) out.push_back(n);
  return out;
}

}  // namespace

GradedMap GradedMap::operator+(const GradedMap& o) const {
  require_same_type(*this, o);
  GradedMap r = zero(src, dst, degree);
  for (int n : union_degrees(*this, o)) r.block[n] = at(n) + o.at(n);
  return r;
}

GradedMap GradedMap::operator-(const GradedMap& o) const {
  require_same_type(*this, o);
  GradedMap r = zero(src, dst, degree);
  for (int n : union_degrees(*this, o)) r.block[n] = at(n) - o.at(n);
  return r;
}

GradedMap GradedMap::scaled(const Q& s) const {
  GradedMap r = zero(src, dst, degree);
  for (const auto& [n, m] : block) r.block[n] = m.scaled(s);
  return r;
}

bool GradedMap::operator==(const GradedMap& o) const {
  if (degree != o.degree || !(src == o.src) || !(dst == o.dst)) return false;
  for (int n : union_degrees(*this, o))
    if (at(n) != o.at(n)) return false;
  return true;
}

bool GradedMap::is_zero() const {
  for (const auto& [n, m] : block)
    if (!m.is_zero()) return false;
  return true;
}

Vec GradedMap::apply(int n, const Vec& x) const { return at(n).apply(x); }

GradedMap compose(const GradedMap& g, const GradedMap& f) {
  if (!(f.dst == g.src)) throw std::invalid_argument("compose: space mismatch");
  GradedMap r = GradedMap::zero(f.src, g.dst, f.degree + g.degree);
  for (int n : f.src.degrees()) {
    SparseMatrix m = g.at(n + f.degree) * f.at(n);
    if (!m.is_zero()) r.block[n] = std::move(m);
  }
  return r;
}

void LadderComplex::validate() const {
  if (Q.degree != 1) throw std::invalid_argument("differential must have degree 1");
  if (!(Q.src == space) || !(Q.dst == space)) throw std::invalid_argument("differential space mismatch");
  for (int n : space.degrees()) {
    SparseMatrix m = Q.at(n);
    if (m.rows() != space.dim(n + 1) || m.cols() != space.dim(n))
      throw std::invalid_argument("differential block shape mismatch");
  }
  if (!compose(Q, Q).is_zero()) throw std::invalid_argument("Q o Q != 0");
}

LadderComplex make_complex(const GradedSpace& space, std::map<int, SparseMatrix> q_blocks) {
  LadderComplex c;
  c.space = space;
  c.Q = GradedMap::zero(space, space, 1);
  for (auto& [n, m] : q_blocks) c.Q.set(n, std::move(m));
  c.validate();
  return c;
}

GradedMap internal_hom_differential(const GradedMap& f, const LadderComplex& V, const LadderComplex& W) {
  if (!(f.src == V.space) || !(f.dst == W.space))
    throw std::invalid_argument("internal_hom_differential: space mismatch");
  GradedMap left = compose(W.Q, f);
  GradedMap right = compose(f, V.Q);
  GradedMap r = left + right.scaled(Q(sign(SignRule::InternalHom, f.degree)));
  r.support_radius = f.support_radius;
  r.causal_class = f.causal_class;
  return r;
}

LadderComplex shift(const LadderComplex& V, int p) {
  GradedSpace s;
  for (const auto& [n, d] : V.space.dims) s.dims[n - p] = d;
  for (const auto& [n, l] : V.space.labels) s.labels[n - p] = l;
  std::map<int, SparseMatrix> q;
  const Q sg(sign(SignRule::Shift, p));
  for (const auto& [n, m] : V.Q.block) q[n - p] = m.scaled(sg);
  return make_complex(s, std::move(q));
}

LadderComplex cone(const GradedMap& f, const LadderComplex& V, const LadderComplex& W) {
  if (f.degree != 0) throw std::invalid_argument("cone: map must have degree 0");
  if (!is_cochain_map(f, V, W)) throw std::invalid_argument("cone: map is not a cochain map");
  GradedSpace s;
  std::vector<int> degs;
  for (int n : V.space.degrees()) degs.push_back(n - 1);
  for (int n : W.space.degrees()) degs.push_back(n);
  for (int n : degs) s.dims[n] = V.space.dim(n + 1) + W.space.dim(n);
  std::map<int, SparseMatrix> q;
  for (const auto& [n, d] : s.dims) {
    // (v, w) in V^{n+1} + W^n  ->  V^{n+2} + W^{n+1}
    SparseMatrix a = V.Q.at(n + 1).scaled(Q(-1));
    SparseMatrix b(V.space.dim(n + 2), W.space.dim(n));
    SparseMatrix c = f.at(n + 1);
    SparseMatrix e = W.Q.at(n);
    q[n] = SparseMatrix::block2x2(a, b, c, e);
  }
  return make_complex(s, std::move(q));
}

std::map<int, int> cohomology_dims(const LadderComplex& V) {
  std::map<int, int> ranks;
  for (int n : V.space.degrees()) ranks[n] = rank(V.Q.at(n));
  std::map<int, int> h;
  for (int n : V.space.degrees()) {
    int prev = ranks.count(n - 1) ? ranks[n - 1] : 0;
    h[n] = V.space.dim(n) - ranks[n] - prev;
  }
  return h;
}

bool is_acyclic(const LadderComplex& V) {
  for (const auto& [n, d] : cohomology_dims(V))
    if (d != 0) return false;
  return true;
}

bool check_homotopy(const GradedMap& f, const GradedMap& g, const GradedMap& h,
                    const LadderComplex& V, const LadderComplex& W) {
  if (f.degree != g.degree || h.degree != f.degree - 1)
    throw std::invalid_argument("check_homotopy: degree mismatch");
  if (!(f.src == g.src) || !(f.dst == g.dst) || !(h.src == f.src) || !(h.dst == f.dst))
    throw std::invalid_argument("check_homotopy: shape mismatch");
  return internal_hom_differential(h, V, W) == g - f;
}

bool is_cochain_map(const GradedMap& f, const LadderComplex& V, const LadderComplex& W) {
  return f.degree == 0 && internal_hom_differential(f, V, W).is_zero();
}

namespace {

Q random_small(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> num(-3, 3);
  std::uniform_int_distribution<int> den(1, 2);
  Q q(num(rng), den(rng));
  q.canonicalize();
  return q;
}

}  // namespace

GradedMap random_map(std::mt19937_64& rng, const GradedSpace& src, const GradedSpace& dst, int degree,
                     int density_percent) {
  std::uniform_int_distribution<int> pct(0, 99);
  GradedMap f = GradedMap::zero(src, dst, degree);
  for (int n : src.degrees()) {
    const int r = dst.dim(n + degree);
    const int c = src.dim(n);
    if (r == 0) continue;
    std::vector<Triplet> t;
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j)
        if (pct(rng) < density_percent) t.push_back({i, j, random_small(rng)});
    f.block[n] = SparseMatrix::from_triplets(r, c, std::move(t));
  }
  return f;
}

LadderComplex random_complex(std::mt19937_64& rng, int lo, int hi, int max_dim) {
  // Built as a direct sum of elementary pieces K->K and K, then conjugated by
  // random invertible triangular changes of basis.
  std::uniform_int_distribution<int> dimd(0, max_dim);
  GradedSpace s;
  std::map<int, std::vector<Triplet>> qt;
  std::map<int, int> fill;
  for (int n = lo; n <= hi; ++n) s.dims[n] = 0;
  for (int n = lo; n <= hi; ++n) {
    int pieces = dimd(rng);
    for (int k = 0; k < pieces; ++k) {
      const bool pair = n < hi && (rng() % 2 == 0);
      if (pair) {
        if (s.dims[n] >= max_dim || s.dims[n + 1] >= max_dim) continue;
        int i = s.dims[n]++;
        int j = s.dims[n + 1]++;
        qt[n].push_back({j, i, Q(1)});
      } else {
        if (s.dims[n] >= max_dim) continue;
        s.dims[n]++;
      }
    }
  }
  std::map<int, SparseMatrix> basis_change;
  std::map<int, SparseMatrix> inverse;
  for (int n = lo; n <= hi; ++n) {
    const int d = s.dims[n];
    // unipotent lower triangular L and its inverse by forward substitution
    std::vector<Vec> L(static_cast<std::size_t>(d), Vec(static_cast<std::size_t>(d)));
    for (int i = 0; i < d; ++i) {
      L[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1;
      for (int j = 0; j < i; ++j) L[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = random_small(rng);
    }
    std::vector<Vec> inv(static_cast<std::size_t>(d), Vec(static_cast<std::size_t>(d)));
    for (int col = 0; col < d; ++col) {
      for (int i = 0; i < d; ++i) {
        Q v = (i == col) ? Q(1) : Q(0);
        for (int j = 0; j < i; ++j)
          v -= L[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * inv[static_cast<std::size_t>(j)][static_cast<std::size_t>(col)];
        inv[static_cast<std::size_t>(i)][static_cast<std::size_t>(col)] = v;
      }
    }
    basis_change[n] = SparseMatrix::from_dense(L);
    inverse[n] = SparseMatrix::from_dense(inv);
  }
  std::map<int, SparseMatrix> q;
  for (int n = lo; n < hi; ++n) {
    SparseMatrix raw = SparseMatrix::from_triplets(s.dims[n + 1], s.dims[n], qt[n]);
    q[n] = basis_change[n + 1] * raw * inverse[n];
  }
  return make_complex(s, std::move(q));
}

nlohmann::json to_json(const SparseMatrix& m) {
  nlohmann::json arr = nlohmann::json::array();
  for (int i = 0; i < m.rows(); ++i)
    for (const auto& [j, v] : m.row(i))
      arr.push_back({i, j, v.get_num().get_str(), v.get_den().get_str()});
  return arr;
}

nlohmann::json to_json(const GradedMap& f) {
  nlohmann::json j;
  j["degree_shift"] = f.degree;
  nlohmann::json sd, dd;
  for (const auto& [n, d] : f.src.dims) sd[std::to_string(n)] = d;
  for (const auto& [n, d] : f.dst.dims) dd[std::to_string(n)] = d;
  j["src_dims"] = sd;
  j["dst_dims"] = dd;
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& [n, m] : f.block)
    for (int r = 0; r < m.rows(); ++r)
      for (const auto& [c, v] : m.row(r))
        entries.push_back({{"degree", n}, {"row", r}, {"col", c},
                           {"num", v.get_num().get_str()}, {"den", v.get_den().get_str()}});
  j["entries"] = entries;
  j["support_radius"] = f.support_radius;
  return j;
}

GradedMap graded_map_from_json(const nlohmann::json& j) {
  GradedSpace s, d;
  for (const auto& [k, v] : j.at("src_dims").items()) s.dims[std::stoi(k)] = v.get<int>();
  for (const auto& [k, v] : j.at("dst_dims").items()) d.dims[std::stoi(k)] = v.get<int>();
  GradedMap f = GradedMap::zero(s, d, j.at("degree_shift").get<int>());
  std::map<int, std::vector<Triplet>> t;
  for (const auto& e : j.at("entries")) {
    Q v(Z(e.at("num").get<std::string>()), Z(e.at("den").get<std::string>()));
    v.canonicalize();
    t[e.at("degree").get<int>()].push_back({e.at("row").get<int>(), e.at("col").get<int>(), v});
  }
  for (auto& [n, tr] : t)
    f.set(n, SparseMatrix::from_triplets(d.dim(n + f.degree), s.dim(n), std::move(tr)));
  f.support_radius = j.value("support_radius", 0);
  return f;
}

}  // namespace ghc
