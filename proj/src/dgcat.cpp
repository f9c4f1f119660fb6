#include "ghc/dgcat.hpp"

#include <functional>
#include <optional>
#include <stdexcept>

namespace ghc {

namespace {

Chain drop(const Chain& c, std::size_t k) {
  Chain r;
  r.reserve(c.size() - 1);
  for (std::size_t i = 0; i < c.size(); ++i)
    if (i != k) r.push_back(c[i]);
  return r;
}

Chain slice(const Chain& c, std::size_t lo, std::size_t hi) {  // c_lo .. c_hi inclusive
  return Chain(c.begin() + static_cast<long>(lo), c.begin() + static_cast<long>(hi) + 1);
}

int arrows(const Chain& c) { return static_cast<int>(c.size()) - 1; }

void add_block(std::vector<Triplet>& t, int row_off, int col_off, const SparseMatrix& m, const Q& s) {
  for (int i = 0; i < m.rows(); ++i)
    for (const auto& [j, v] : m.row(i)) t.push_back({row_off + i, col_off + j, s * v});
}

SparseMatrix column_range(const SparseMatrix& m, int first, int width) {
  std::vector<Triplet> t;
  for (int i = 0; i < m.rows(); ++i)
    for (const auto& [j, v] : m.row(i))
      if (j >= first && j < first + width) t.push_back({i, j - first, v});
  return SparseMatrix::from_triplets(m.rows(), width, std::move(t));
}

// Direct sum with per-summand offsets in each degree.
struct DirectSum {
  LadderComplex complex;
  std::vector<std::map<int, int>> offset;
};

DirectSum direct_sum(const std::vector<const LadderComplex*>& parts) {
  DirectSum s;
  s.offset.resize(parts.size());
  std::map<int, int> dims;
  for (std::size_t i = 0; i < parts.size(); ++i)
    for (int n : parts[i]->space.degrees()) {
      s.offset[i][n] = dims[n];
      dims[n] += parts[i]->space.dim(n);
    }
  GradedSpace space;
  for (const auto& [n, d] : dims)
    if (d > 0) space.dims[n] = d;
  std::map<int, SparseMatrix> q;
  for (const auto& [n, d] : dims) {
    if (dims.count(n + 1) == 0 || d == 0) continue;
    std::vector<Triplet> t;
    for (std::size_t i = 0; i < parts.size(); ++i)
      if (parts[i]->space.dim(n) > 0 && parts[i]->space.dim(n + 1) > 0)
        add_block(t, s.offset[i].at(n + 1), s.offset[i].at(n), parts[i]->Q.at(n), Q(1));
    q[n] = SparseMatrix::from_triplets(dims[n + 1], d, std::move(t));
  }
  s.complex = make_complex(space, std::move(q));
  return s;
}

LadderComplex random_piece(std::mt19937_64& rng, int max_dim, bool acyclic) {
  const LadderComplex x = random_complex(rng, -1, 1, max_dim);
  if (!acyclic) return x;
  return cone(GradedMap::identity(x.space), x, x);
}

}  // namespace

static FiniteDiagram random_diagram_once(std::mt19937_64& rng, const Poset& p, int max_dim, bool acyclic);

// ---- posets ----

Poset::Poset(int n, const std::vector<std::pair<int, int>>& less) : n_(n), lt_(static_cast<std::size_t>(n * n), 0) {
  for (const auto& [a, b] : less) {
    if (a < 0 || b < 0 || a >= n || b >= n) throw std::invalid_argument("poset relation out of range");
    lt_[static_cast<std::size_t>(a * n + b)] = 1;
  }
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (lt(i, k) && lt(k, j)) lt_[static_cast<std::size_t>(i * n + j)] = 1;
  for (int i = 0; i < n; ++i)
    if (lt(i, i)) throw std::invalid_argument("poset relations contain a cycle");
  std::vector<Chain> level;
  for (int i = 0; i < n; ++i) level.push_back({i});
  while (!level.empty()) {
    chains_.push_back(level);
    std::vector<Chain> next;
    for (const Chain& c : level)
      for (int j = 0; j < n; ++j)
        if (lt(c.back(), j)) {
          Chain e = c;
          e.push_back(j);
          next.push_back(std::move(e));
        }
    level = std::move(next);
  }
}

const std::vector<Chain>& Poset::chains(int q) const {
  static const std::vector<Chain> none;
  return q >= 0 && q < static_cast<int>(chains_.size()) ? chains_[static_cast<std::size_t>(q)] : none;
}

std::optional<int> Poset::top() const {
  for (int t = 0; t < n_; ++t) {
    bool ok = true;
    for (int a = 0; a < n_ && ok; ++a) ok = le(a, t);
    if (ok) return t;
  }
  return std::nullopt;
}

Poset random_poset(std::mt19937_64& rng, int max_objects) {
  const int n = 1 + static_cast<int>(rng() % static_cast<unsigned>(max_objects));
  std::vector<std::pair<int, int>> less;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng() % 2) less.emplace_back(i, j);
  return Poset(n, less);
}

// ---- diagrams ----

GradedMap FiniteDiagram::arrow(int a, int b) const {
  if (a == b) return GradedMap::identity(at(a).space);
  auto it = arrows.find({a, b});
  if (it == arrows.end()) throw std::invalid_argument("no arrow " + std::to_string(a) + " -> " + std::to_string(b));
  return it->second;
}

void FiniteDiagram::validate() const {
  if (static_cast<int>(values.size()) != poset.size()) throw std::invalid_argument("diagram: wrong number of values");
  for (const LadderComplex& v : values) v.validate();
  for (int a = 0; a < poset.size(); ++a)
    for (int b = 0; b < poset.size(); ++b) {
      if (!poset.lt(a, b)) continue;
      const GradedMap f = arrow(a, b);
      if (f.degree != 0 || !(f.src == at(a).space) || !(f.dst == at(b).space))
        throw std::invalid_argument("diagram: arrow has the wrong shape");
      if (!is_cochain_map(f, at(a), at(b))) throw std::invalid_argument("diagram: arrow is not a cochain map");
    }
  for (const Chain& c : poset.chains(2))
    if (!(compose(arrow(c[1], c[2]), arrow(c[0], c[1])) == arrow(c[0], c[2])))
      throw std::invalid_argument("diagram: arrows do not compose");
}

int FiniteDiagram::total_dim() const {
  int s = 0;
  for (const LadderComplex& v : values) s += v.space.total_dim();
  return s;
}

FiniteDiagram constant_diagram(const Poset& p, const LadderComplex& v) {
  FiniteDiagram d;
  d.poset = p;
  d.values.assign(static_cast<std::size_t>(p.size()), v);
  for (int a = 0; a < p.size(); ++a)
    for (int b = 0; b < p.size(); ++b)
      if (p.lt(a, b)) d.arrows[{a, b}] = GradedMap::identity(v.space);
  return d;
}

FiniteDiagram random_diagram(std::mt19937_64& rng, const Poset& p, int max_dim, bool acyclic, int max_total) {
  for (;;) {
    FiniteDiagram d = random_diagram_once(rng, p, max_dim, acyclic);
    if (d.total_dim() <= max_total) return d;
  }
}

static FiniteDiagram random_diagram_once(std::mt19937_64& rng, const Poset& p, int max_dim, bool acyclic) {
  const int n = p.size();
  std::vector<LadderComplex> x;
  for (int a = 0; a < n; ++a) x.push_back(random_piece(rng, max_dim, acyclic));
  const LadderComplex y = random_piece(rng, max_dim, acyclic);
  std::map<std::pair<int, int>, GradedMap> s;  // a <= c: X_a -> Y
  for (int a = 0; a < n; ++a)
    for (int c = 0; c < n; ++c)
      if (p.le(a, c))
        s[{a, c}] = internal_hom_differential(random_map(rng, x[static_cast<std::size_t>(a)].space, y.space, -1, 50),
                                              x[static_cast<std::size_t>(a)], y);

  FiniteDiagram d;
  d.poset = p;
  std::vector<DirectSum> sums;
  std::vector<std::vector<int>> members(static_cast<std::size_t>(n));
  for (int c = 0; c < n; ++c) {
    std::vector<const LadderComplex*> parts;
    for (int a = 0; a < n; ++a)
      if (p.le(a, c)) {
        parts.push_back(&x[static_cast<std::size_t>(a)]);
        members[static_cast<std::size_t>(c)].push_back(a);
      }
    parts.push_back(&y);
    sums.push_back(direct_sum(parts));
    d.values.push_back(sums.back().complex);
  }
  for (int c = 0; c < n; ++c)
    for (int e = 0; e < n; ++e) {
      if (!p.lt(c, e)) continue;
      const DirectSum& src = sums[static_cast<std::size_t>(c)];
      const DirectSum& dst = sums[static_cast<std::size_t>(e)];
      const auto& ms = members[static_cast<std::size_t>(c)];
      const auto& md = members[static_cast<std::size_t>(e)];
      GradedMap f = GradedMap::zero(src.complex.space, dst.complex.space, 0);
      for (int deg : src.complex.space.degrees()) {
        std::vector<Triplet> t;
        const std::size_t ys = ms.size(), yd = md.size();
        for (std::size_t i = 0; i < ms.size(); ++i) {
          const int a = ms[i];
          const int dim = x[static_cast<std::size_t>(a)].space.dim(deg);
          if (dim == 0) continue;
          std::size_t j = 0;
          while (md[j] != a) ++j;
          add_block(t, dst.offset[j].at(deg), src.offset[i].at(deg), SparseMatrix::identity(dim), Q(1));
          if (y.space.dim(deg) > 0)
            add_block(t, dst.offset[yd].at(deg), src.offset[i].at(deg),
                      s.at({a, e}).at(deg) - s.at({a, c}).at(deg), Q(1));
        }
        if (y.space.dim(deg) > 0)
          add_block(t, dst.offset[yd].at(deg), src.offset[ys].at(deg), SparseMatrix::identity(y.space.dim(deg)), Q(1));
        f.set(deg, SparseMatrix::from_triplets(dst.complex.space.dim(deg), src.complex.space.dim(deg), std::move(t)));
      }
      d.arrows[{c, e}] = std::move(f);
    }
  d.validate();
  return d;
}

// ---- mapping cochains ----

GradedMap MappingCochain::at(const Chain& c, const FiniteDiagram& v, const FiniteDiagram& w) const {
  auto it = components.find(c);
  if (it != components.end()) return it->second;
  return GradedMap::zero(v.at(c.front()).space, w.at(c.back()).space, degree - arrows(c));
}

bool MappingCochain::is_zero() const {
  for (const auto& [c, f] : components)
    if (!f.is_zero()) return false;
  return true;
}

MappingCochain MappingCochain::operator+(const MappingCochain& o) const {
  if (degree != o.degree) throw std::invalid_argument("mapping cochains of different degree");
  MappingCochain r = *this;
  for (const auto& [c, f] : o.components) {
    auto it = r.components.find(c);
    if (it == r.components.end())
      r.components.emplace(c, f);
    else
      it->second = it->second + f;
  }
  return r;
}

MappingCochain MappingCochain::operator-(const MappingCochain& o) const { return *this + o.scaled(Q(-1)); }

MappingCochain MappingCochain::scaled(const Q& s) const {
  MappingCochain r;
  r.degree = degree;
  for (const auto& [c, f] : components) r.components.emplace(c, f.scaled(s));
  return r;
}

bool MappingCochain::operator==(const MappingCochain& o) const {
  return degree == o.degree && (*this - o).is_zero();
}

MappingCochain mapping_zero(int degree) {
  MappingCochain r;
  r.degree = degree;
  return r;
}

MappingCochain mapping_identity(const FiniteDiagram& v) {
  MappingCochain r;
  for (int c = 0; c < v.poset.size(); ++c) r.components.emplace(Chain{c}, GradedMap::identity(v.at(c).space));
  return r;
}

MappingCochain embed_natural(const std::vector<GradedMap>& eta) {
  MappingCochain r;
  r.degree = eta.empty() ? 0 : eta.front().degree;
  for (std::size_t c = 0; c < eta.size(); ++c) r.components.emplace(Chain{static_cast<int>(c)}, eta[c]);
  return r;
}

MappingCochain random_mapping_cochain(std::mt19937_64& rng, const FiniteDiagram& v, const FiniteDiagram& w,
                                      int degree, int density_percent) {
  MappingCochain r;
  r.degree = degree;
  for (int q = 0; q <= v.poset.max_chain_length(); ++q)
    for (const Chain& c : v.poset.chains(q))
      r.components.emplace(c, random_map(rng, v.at(c.front()).space, w.at(c.back()).space, degree - q,
                                         density_percent));
  return r;
}

MappingCochain mapping_differential(const MappingCochain& eta, const FiniteDiagram& v, const FiniteDiagram& w) {
  MappingCochain r;
  r.degree = eta.degree + 1;
  for (int q = 0; q <= v.poset.max_chain_length(); ++q)
    for (const Chain& c : v.poset.chains(q)) {
      GradedMap sum = internal_hom_differential(eta.at(c, v, w), v.at(c.front()), w.at(c.back()))
                          .scaled(Q(sign(SignRule::MappingVertical, q)));
      for (int k = 0; k < q + 1 && q >= 1; ++k) {
        const int j = q - k;  // coface d^j
        const Chain face = drop(c, static_cast<std::size_t>(j));
        GradedMap term = eta.at(face, v, w);
        if (j == 0) term = compose(term, v.arrow(c[0], c[1]));
        if (j == q) term = compose(w.arrow(c[static_cast<std::size_t>(q - 1)], c.back()), term);
        sum = sum + term.scaled(Q(sign(SignRule::MappingHorizontal, k)));
      }
      if (!sum.is_zero()) r.components.emplace(c, std::move(sum));
    }
  return r;
}

MappingCochain mapping_compose(const MappingCochain& g, const MappingCochain& f, const FiniteDiagram& u,
                               const FiniteDiagram& v, const FiniteDiagram& w) {
  MappingCochain r;
  r.degree = g.degree + f.degree;
  for (int q = 0; q <= u.poset.max_chain_length(); ++q)
    for (const Chain& c : u.poset.chains(q)) {
      GradedMap sum = GradedMap::zero(u.at(c.front()).space, w.at(c.back()).space, r.degree - q);
      for (int k = 0; k <= q; ++k) {
        const auto ks = static_cast<std::size_t>(k), qs = static_cast<std::size_t>(q);
        const GradedMap term = compose(g.at(slice(c, ks, qs), v, w), f.at(slice(c, 0, ks), u, v));
        sum = sum + term.scaled(Q(sign(SignRule::MappingComposition, k, q, g.degree)));
      }
      if (!sum.is_zero()) r.components.emplace(c, std::move(sum));
    }
  return r;
}

// ---- the mapping complex as a finite complex ----

MappingComplex mapping_complex(const FiniteDiagram& v, const FiniteDiagram& w) {
  MappingComplex mc;
  std::map<int, int> dims;
  for (int q = 0; q <= v.poset.max_chain_length(); ++q)
    for (const Chain& c : v.poset.chains(q)) {
      const GradedSpace& a = v.at(c.front()).space;
      const GradedSpace& b = w.at(c.back()).space;
      for (int j : a.degrees())
        for (int t : b.degrees()) {
          if (a.dim(j) == 0 || b.dim(t) == 0) continue;
          const int n = t - j + q;
          mc.slots[n].push_back({c, j, dims[n], b.dim(t), a.dim(j)});
          dims[n] += b.dim(t) * a.dim(j);
        }
    }
  GradedSpace space;
  for (const auto& [n, d] : dims) space.dims[n] = d;
  mc.complex.space = space;
  std::map<int, SparseMatrix> q;
  for (const auto& [n, d] : dims) {
    if (dims.count(n + 1) == 0) continue;
    std::vector<Triplet> t;
    for (int i = 0; i < d; ++i) {
      Vec e(static_cast<std::size_t>(d));
      e[static_cast<std::size_t>(i)] = Q(1);
      const Vec col = coordinates(mc, mapping_differential(cochain_at(mc, n, e, v, w), v, w));
      for (std::size_t r = 0; r < col.size(); ++r)
        if (sgn(col[r]) != 0) t.push_back({static_cast<int>(r), i, col[r]});
    }
    q[n] = SparseMatrix::from_triplets(dims.at(n + 1), d, std::move(t));
  }
  mc.complex = make_complex(space, std::move(q));
  return mc;
}

Vec coordinates(const MappingComplex& mc, const MappingCochain& eta) {
  auto it = mc.slots.find(eta.degree);
  Vec x(static_cast<std::size_t>(mc.complex.space.dim(eta.degree)));
  if (it == mc.slots.end()) {
    if (!eta.is_zero()) throw std::invalid_argument("coordinates: cochain outside the mapping complex");
    return x;
  }
  for (const MappingComplex::Slot& s : it->second) {
    auto ct = eta.components.find(s.chain);
    if (ct == eta.components.end()) continue;
    const SparseMatrix m = ct->second.at(s.src_degree);
    for (int i = 0; i < m.rows(); ++i)
      for (const auto& [j, val] : m.row(i)) x[static_cast<std::size_t>(s.offset + i * s.cols + j)] = val;
  }
  return x;
}

MappingCochain cochain_at(const MappingComplex& mc, int degree, const Vec& x, const FiniteDiagram& v,
                          const FiniteDiagram& w) {
  MappingCochain r;
  r.degree = degree;
  auto it = mc.slots.find(degree);
  if (it == mc.slots.end()) return r;
  for (const MappingComplex::Slot& s : it->second) {
    std::vector<Triplet> t;
    for (int i = 0; i < s.rows; ++i)
      for (int j = 0; j < s.cols; ++j) {
        const Q& val = x[static_cast<std::size_t>(s.offset + i * s.cols + j)];
        if (sgn(val) != 0) t.push_back({i, j, val});
      }
    if (t.empty()) continue;
    auto [ct, inserted] = r.components.try_emplace(s.chain, r.at(s.chain, v, w));
    (void)inserted;
    ct->second.set(s.src_degree, SparseMatrix::from_triplets(s.rows, s.cols, std::move(t)));
  }
  return r;
}

// ---- homotopy colimits ----

HocolimComplex hocolim(const FiniteDiagram& v) {
  HocolimComplex h;
  for (int q = 0; q <= v.poset.max_chain_length(); ++q)
    for (const Chain& c : v.poset.chains(q)) {
      h.chain_id[c] = static_cast<int>(h.chains.size());
      h.chains.push_back(c);
    }
  std::map<int, int> dims;
  for (std::size_t id = 0; id < h.chains.size(); ++id) {
    const Chain& c = h.chains[id];
    const GradedSpace& s = v.at(c.front()).space;
    for (int j : s.degrees()) {
      if (s.dim(j) == 0) continue;
      const int n = j - arrows(c);
      h.offset[{static_cast<int>(id), n}] = dims[n];
      dims[n] += s.dim(j);
    }
  }
  GradedSpace space;
  for (const auto& [n, d] : dims) space.dims[n] = d;

  std::map<int, std::vector<Triplet>> t;
  for (std::size_t id = 0; id < h.chains.size(); ++id) {
    const Chain& c = h.chains[id];
    const int q = arrows(c);
    const LadderComplex& vc = v.at(c.front());
    for (int j : vc.space.degrees()) {
      if (vc.space.dim(j) == 0) continue;
      const int n = j - q;
      const int col = h.offset.at({static_cast<int>(id), n});
      if (vc.space.dim(j + 1) > 0)
        add_block(t[n], h.offset_of(c, n + 1), col, vc.Q.at(j), Q(sign(SignRule::HocolimVertical, q)));
      for (int k = 0; k <= q && q >= 1; ++k) {
        const Chain face = drop(c, static_cast<std::size_t>(k));
        const GradedSpace& fs = v.at(face.front()).space;
        if (fs.dim(j) == 0) continue;
        const SparseMatrix m = k == 0 ? v.arrow(c[0], c[1]).at(j) : SparseMatrix::identity(vc.space.dim(j));
        add_block(t[n], h.offset_of(face, n + 1), col, m, Q(sign(SignRule::HocolimHorizontal, k)));
      }
    }
  }
  std::map<int, SparseMatrix> q;
  for (const auto& [n, d] : dims)
    if (dims.count(n + 1)) q[n] = SparseMatrix::from_triplets(dims.at(n + 1), d, std::move(t[n]));
  h.complex = make_complex(space, std::move(q));
  return h;
}

namespace {

// Map out of hocolim(V) given on each iota_{0,c} block; higher chains go to zero.
GradedMap from_vertices(const HocolimComplex& h, const FiniteDiagram& v, const GradedSpace& dst,
                        const std::function<GradedMap(int)>& leg) {
  GradedMap f = GradedMap::zero(h.complex.space, dst, 0);
  for (int n : h.complex.space.degrees()) {
    std::vector<Triplet> t;
    for (int c = 0; c < v.poset.size(); ++c) {
      if (v.at(c).space.dim(n) == 0 || dst.dim(n) == 0) continue;
      add_block(t, 0, h.offset_of({c}, n), leg(c).at(n), Q(1));
    }
    f.set(n, SparseMatrix::from_triplets(dst.dim(n), h.complex.space.dim(n), std::move(t)));
  }
  return f;
}

}  // namespace

GradedMap hocolim_to_colim(const HocolimComplex& h, const FiniteDiagram& v) {
  const auto top = v.poset.top();
  if (!top) throw std::invalid_argument("hocolim_to_colim: poset has no top element");
  return from_vertices(h, v, v.at(*top).space, [&](int c) { return v.arrow(c, *top); });
}

GradedMap collapse(const HocolimComplex& h, const FiniteDiagram& constant) {
  const GradedSpace& s = constant.at(0).space;
  return from_vertices(h, constant, s, [&](int) { return GradedMap::identity(s); });
}

GradedMap hocolim_on_morphisms(const MappingCochain& eta, const HocolimComplex& hv, const FiniteDiagram& v,
                               const HocolimComplex& hw, const FiniteDiagram& w) {
  const int m = eta.degree;
  std::map<int, std::vector<Triplet>> t;
  for (std::size_t id = 0; id < hv.chains.size(); ++id) {
    const Chain& c = hv.chains[id];
    const int q = arrows(c);
    const GradedSpace& s = v.at(c.front()).space;
    for (int j : s.degrees()) {
      if (s.dim(j) == 0) continue;
      const int n = j - q;
      const int col = hv.offset.at({static_cast<int>(id), n});
      for (int k = 0; k <= q; ++k) {
        const Chain lower = slice(c, 0, static_cast<std::size_t>(k));
        const Chain upper = slice(c, static_cast<std::size_t>(k), static_cast<std::size_t>(q));
        const SparseMatrix block = eta.at(lower, v, w).at(j);
        if (block.is_zero()) continue;
        add_block(t[n], hw.offset_of(upper, n + m), col, block, Q(sign(SignRule::HocolimMorphism, q, m, k)));
      }
    }
  }
  GradedMap f = GradedMap::zero(hv.complex.space, hw.complex.space, m);
  for (int n : hv.complex.space.degrees())
    f.set(n, SparseMatrix::from_triplets(hw.complex.space.dim(n + m), hv.complex.space.dim(n), std::move(t[n])));
  return f;
}

GradedMap adjunct(const MappingCochain& eta, const HocolimComplex& hv, const FiniteDiagram& v,
                  const LadderComplex& target) {
  const int m = eta.degree;
  std::map<int, std::vector<Triplet>> t;
  for (const auto& [c, comp] : eta.components) {
    const int q = arrows(c);
    const GradedSpace& s = v.at(c.front()).space;
    for (int j : s.degrees()) {
      if (s.dim(j) == 0) continue;
      const SparseMatrix block = comp.at(j);
      if (block.is_zero()) continue;
      add_block(t[j - q], 0, hv.offset_of(c, j - q), block, Q(sign(SignRule::Adjunction, q, m)));
    }
  }
  GradedMap f = GradedMap::zero(hv.complex.space, target.space, m);
  for (int n : hv.complex.space.degrees())
    f.set(n, SparseMatrix::from_triplets(target.space.dim(n + m), hv.complex.space.dim(n), std::move(t[n])));
  return f;
}

MappingCochain unadjunct(const GradedMap& f, const HocolimComplex& hv, const FiniteDiagram& v,
                         const LadderComplex& target) {
  MappingCochain r;
  r.degree = f.degree;
  for (const Chain& c : hv.chains) {
    const int q = arrows(c);
    const GradedSpace& s = v.at(c.front()).space;
    GradedMap comp = GradedMap::zero(s, target.space, f.degree - q);
    for (int j : s.degrees()) {
      if (s.dim(j) == 0) continue;
      const SparseMatrix block = column_range(f.at(j - q), hv.offset_of(c, j - q), s.dim(j));
      if (!block.is_zero()) comp.set(j, block.scaled(Q(sign(SignRule::Adjunction, q, f.degree))));
    }
    if (!comp.is_zero()) r.components.emplace(c, std::move(comp));
  }
  return r;
}

// ---- randomized suite ----

namespace {

struct CaseCheck {
  Check check;
  int cases = 0;
  void record(bool ok, const std::string& witness, Stopwatch& sw) {
    ++cases;
    check.wall_time += sw.lap();
    if (!ok && check.pass) check.witness = witness;
    check.pass = check.pass && ok;
  }
};

std::string describe_case(std::uint64_t seed, const Poset& p) {
  std::string s = "case seed " + std::to_string(seed) + ", poset on " + std::to_string(p.size()) + " objects:";
  for (int a = 0; a < p.size(); ++a)
    for (int b = 0; b < p.size(); ++b)
      if (p.lt(a, b)) s += " " + std::to_string(a) + "<" + std::to_string(b);
  return s;
}

int small_degree(std::mt19937_64& rng) { return static_cast<int>(rng() % 3) - 1; }

}  // namespace

std::vector<Check> run_dgcat_suite(std::mt19937_64& rng, int cases) {
  const std::vector<std::string> names = {"delta^2 = 0",
                                          "hocolim d^2 = 0",
                                          "composition associative",
                                          "composition Leibniz",
                                          "adjunction roundtrip",
                                          "adjunct is a cochain map",
                                          "hocolim is a dg-functor",
                                          "map into acyclic diagram is acyclic"};
  std::vector<CaseCheck> c(names.size());
  for (std::size_t i = 0; i < names.size(); ++i) c[i].check = {names[i], true, "", 0};

  for (int i = 0; i < cases; ++i) {
    Stopwatch sw;
    const std::uint64_t seed = rng();
    std::mt19937_64 r(seed);
    const Poset p = random_poset(r, 4);
    const std::string w = describe_case(seed, p);
    const FiniteDiagram u = random_diagram(r, p, 1), v = random_diagram(r, p, 1), x = random_diagram(r, p, 1),
                        z = random_diagram(r, p, 1);
    const MappingCochain f = random_mapping_cochain(r, u, v, small_degree(r));
    const MappingCochain g = random_mapping_cochain(r, v, x, small_degree(r));
    const MappingCochain h = random_mapping_cochain(r, x, z, small_degree(r));

    c[0].record(mapping_differential(mapping_differential(f, u, v), u, v).is_zero(), w, sw);

    const HocolimComplex hu = hocolim(u), hv = hocolim(v), hx = hocolim(x);
    bool d2 = true;
    for (int n : hu.complex.space.degrees())
      d2 = d2 && (hu.complex.Q.at(n + 1) * hu.complex.Q.at(n)).is_zero();
    c[1].record(d2, w, sw);

    c[2].record(mapping_compose(h, mapping_compose(g, f, u, v, x), u, x, z) ==
                    mapping_compose(mapping_compose(h, g, v, x, z), f, u, v, z),
                w, sw);
    const MappingCochain lhs = mapping_differential(mapping_compose(g, f, u, v, x), u, x);
    const MappingCochain rhs = mapping_compose(mapping_differential(g, v, x), f, u, v, x) +
                               mapping_compose(g, mapping_differential(f, u, v), u, v, x)
                                   .scaled(Q(parity_sign(g.degree)));
    c[3].record(lhs == rhs, w, sw);

    const LadderComplex t = random_complex(r, -1, 1, 2);
    const FiniteDiagram dt = constant_diagram(p, t);
    const MappingCochain eta = random_mapping_cochain(r, u, dt, small_degree(r));
    const GradedMap a = adjunct(eta, hu, u, t);
    const GradedMap b = random_map(r, hu.complex.space, t.space, eta.degree, 40);
    c[4].record(unadjunct(a, hu, u, t) == eta && adjunct(unadjunct(b, hu, u, t), hu, u, t) == b, w, sw);
    c[5].record(adjunct(mapping_differential(eta, u, dt), hu, u, t) == internal_hom_differential(a, hu.complex, t), w,
                sw);

    c[6].record(hocolim_on_morphisms(mapping_compose(g, f, u, v, x), hu, u, hx, x) ==
                        compose(hocolim_on_morphisms(g, hv, v, hx, x), hocolim_on_morphisms(f, hu, u, hv, v)) &&
                    hocolim_on_morphisms(mapping_differential(f, u, v), hu, u, hv, v) ==
                        internal_hom_differential(hocolim_on_morphisms(f, hu, u, hv, v), hu.complex, hv.complex),
                w, sw);

    const FiniteDiagram acyclic = random_diagram(r, p, 1, true);
    c[7].record(is_acyclic(mapping_complex(u, acyclic).complex), w, sw);
  }
  std::vector<Check> out;
  for (CaseCheck& k : c) {
    k.check.name += " (" + std::to_string(k.cases) + " cases)";
    out.push_back(k.check);
  }
  return out;
}

}  // namespace ghc
