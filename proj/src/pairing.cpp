#include "ghc/pairing.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <stdexcept>
#include <tuple>

namespace ghc {

namespace {

Point add(const Point& a, const Point& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
Point sub(const Point& a, const Point& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }

auto key(const BilinearEntry& e) { return std::tie(e.out_type, e.t1, e.o1, e.t2, e.o2); }

Q sign_of(int exponent) { return (exponent % 2 == 0) ? Q(1) : Q(-1); }

}  // namespace

void BilinearStencil::add(int out_type, int t1, Point o1, int t2, Point o2, const Q& c) {
  entries_.push_back({out_type, t1, o1, t2, o2, c});
  normalize();
}

void BilinearStencil::add_all(std::vector<BilinearEntry> es) {
  entries_.insert(entries_.end(), std::make_move_iterator(es.begin()), std::make_move_iterator(es.end()));
  normalize();
}

void BilinearStencil::normalize() {
  std::sort(entries_.begin(), entries_.end(), [](const BilinearEntry& a, const BilinearEntry& b) { return key(a) < key(b); });
  std::vector<BilinearEntry> out;
  for (auto& e : entries_) {
    if (!out.empty() && key(out.back()) == key(e))
      out.back().coeff += e.coeff;
    else
      out.push_back(std::move(e));
  }
  out.erase(std::remove_if(out.begin(), out.end(), [](const BilinearEntry& e) { return sgn(e.coeff) == 0; }), out.end());
  entries_ = std::move(out);
}

BilinearStencil BilinearStencil::operator+(const BilinearStencil& o) const {
  if (f1_ != o.f1_ || f2_ != o.f2_ || out_ != o.out_) throw std::invalid_argument("bilinear stencil: form mismatch");
  BilinearStencil r = *this;
  r.add_all(o.entries_);
  return r;
}

BilinearStencil BilinearStencil::operator-(const BilinearStencil& o) const { return *this + o.scaled(Q(-1)); }

BilinearStencil BilinearStencil::scaled(const Q& s) const {
  BilinearStencil r(m_, f1_, f2_, out_);
  std::vector<BilinearEntry> es = entries_;
  for (auto& e : es) e.coeff *= s;
  r.add_all(std::move(es));
  return r;
}

bool BilinearStencil::operator==(const BilinearStencil& o) const {
  if (f1_ != o.f1_ || f2_ != o.f2_ || out_ != o.out_ || entries_.size() != o.entries_.size()) return false;
  for (std::size_t i = 0; i < entries_.size(); ++i)
    if (key(entries_[i]) != key(o.entries_[i]) || entries_[i].coeff != o.entries_[i].coeff) return false;
  return true;
}

BilinearStencil BilinearStencil::swapped() const {
  BilinearStencil r(m_, f2_, f1_, out_);
  std::vector<BilinearEntry> es;
  for (const auto& e : entries_) es.push_back({e.out_type, e.t2, e.o2, e.t1, e.o1, e.coeff});
  r.add_all(std::move(es));
  return r;
}

int BilinearStencil::radius() const {
  int r = 0;
  for (const auto& e : entries_)
    for (int i = 0; i < 3; ++i) r = std::max({r, std::abs(e.o1[static_cast<std::size_t>(i)]), std::abs(e.o2[static_cast<std::size_t>(i)])});
  return r;
}

BilinearStencil compose_first(const BilinearStencil& b, const Stencil& s) {
  if (s.out_form() != b.form1()) throw std::invalid_argument("compose_first: form mismatch");
  BilinearStencil r(b.m(), s.in_form(), b.form2(), b.out_form());
  std::vector<BilinearEntry> acc;
  for (const auto& e : b.entries())
    for (const auto& se : s.entries())
      if (se.out_type == e.t1) acc.push_back({e.out_type, se.in_type, add(e.o1, se.off), e.t2, e.o2, e.coeff * se.coeff});
  r.add_all(std::move(acc));
  return r;
}

BilinearStencil compose_second(const BilinearStencil& b, const Stencil& s) {
  if (s.out_form() != b.form2()) throw std::invalid_argument("compose_second: form mismatch");
  BilinearStencil r(b.m(), b.form1(), s.in_form(), b.out_form());
  std::vector<BilinearEntry> acc;
  for (const auto& e : b.entries())
    for (const auto& se : s.entries())
      if (se.out_type == e.t2) acc.push_back({e.out_type, e.t1, e.o1, se.in_type, add(e.o2, se.off), e.coeff * se.coeff});
  r.add_all(std::move(acc));
  return r;
}

BilinearStencil compose_out(const Stencil& s, const BilinearStencil& b) {
  if (s.in_form() != b.out_form()) throw std::invalid_argument("compose_out: form mismatch");
  BilinearStencil r(b.m(), b.form1(), b.form2(), s.out_form());
  std::vector<BilinearEntry> acc;
  for (const auto& se : s.entries())
    for (const auto& e : b.entries())
      if (se.in_type == e.out_type)
        acc.push_back({se.out_type, e.t1, add(e.o1, se.off), e.t2, add(e.o2, se.off), e.coeff * se.coeff});
  r.add_all(std::move(acc));
  return r;
}

SparseCochain apply(const Stencil& s, const SparseCochain& f) {
  SparseCochain out;
  for (const auto& [cell, v] : f)
    for (const auto& e : s.entries())
      if (e.in_type == cell.first) out[{e.out_type, sub(cell.second, e.off)}] += e.coeff * v;
  for (auto it = out.begin(); it != out.end();) it = (sgn(it->second) == 0) ? out.erase(it) : std::next(it);
  return out;
}

SparseCochain evaluate(const BilinearStencil& b, const SparseCochain& f1, const SparseCochain& f2) {
  SparseCochain out;
  for (const auto& e : b.entries())
    for (const auto& [c1, v1] : f1) {
      if (c1.first != e.t1) continue;
      const Point p = sub(c1.second, e.o1);
      auto it = f2.find({e.t2, add(p, e.o2)});
      if (it != f2.end()) out[{e.out_type, p}] += e.coeff * v1 * it->second;
    }
  for (auto it = out.begin(); it != out.end();) it = (sgn(it->second) == 0) ? out.erase(it) : std::next(it);
  return out;
}

namespace {

struct Lookup {
  bool valid;
  Q value;
};

Lookup lookup(const Field& f, int type, const Point& p, const CausalLattice& lat) {
  const int idx = lat.cell_index({type, p});
  if (idx < 0) return {p[0] < 0 ? f.window.lo == kNegInf : f.window.hi == kPosInf, Q(0)};
  return {f.valid(lat, idx), f.values[static_cast<std::size_t>(idx)]};
}

}  // namespace

Q evaluate_at(const BilinearStencil& b, const Field& f1, const Field& f2, const Cell& out, const CausalLattice& lat) {
  Q acc = 0;
  for (const auto& e : b.entries()) {
    if (e.out_type != out.type) continue;
    const Lookup a = lookup(f1, e.t1, add(out.base, e.o1), lat);
    const Lookup c = lookup(f2, e.t2, add(out.base, e.o2), lat);
    const bool determined = (a.valid && (sgn(a.value) == 0 || c.valid)) || (c.valid && sgn(c.value) == 0);
    if (!determined) throw GeometryTooTight("bilinear evaluation reads outside the validity windows");
    if (a.valid && c.valid) acc += e.coeff * a.value * c.value;
  }
  return acc;
}

Field evaluate(const BilinearStencil& b, const Field& f1, const Field& f2, const CausalLattice& lat) {
  Field out = Field::zero(lat, b.out_form());
  for (int i = 0; i < lat.cell_count(b.out_form()); ++i)
    out.values[static_cast<std::size_t>(i)] = evaluate_at(b, f1, f2, lat.cell(b.out_form(), i), lat);
  return out;
}

BilinearMatrix bilinear_matrix(const BilinearStencil& b, const std::vector<Cell>& cells, const CausalLattice& lat) {
  std::multimap<int, const BilinearEntry*> by_out;
  for (const auto& e : b.entries()) by_out.emplace(e.out_type, &e);
  std::vector<Triplet> t;
  std::set<int> c1, c2;
  for (const Cell& c : cells) {
    auto [lo, hi] = by_out.equal_range(c.type);
    for (auto it = lo; it != hi; ++it) {
      const BilinearEntry& e = *it->second;
      const int i1 = lat.cell_index({e.t1, add(c.base, e.o1)});
      const int i2 = lat.cell_index({e.t2, add(c.base, e.o2)});
      if (i1 < 0 || i2 < 0) throw GeometryTooTight("bilinear matrix reads outside the slab");
      t.push_back({i1, i2, e.coeff});
      c1.insert(i1);
      c2.insert(i2);
    }
  }
  return {SparseMatrix::from_triplets(lat.cell_count(b.form1()), lat.cell_count(b.form2()), std::move(t)),
          {c1.begin(), c1.end()},
          {c2.begin(), c2.end()}};
}

Stencil DifferentialPairing::integrated(int a, int b) const {
  auto it = comps_.find({a, b});
  if (it == comps_.end()) throw std::invalid_argument("pairing has no component (" + std::to_string(a) + ", " + std::to_string(b) + ")");
  const BilinearStencil& bs = it->second;
  if (bs.out_form() != m_) throw std::invalid_argument("integrated: component does not land in top forms");
  Stencil k(m_, bs.form2(), bs.form1());
  std::vector<StencilEntry> es;
  for (const auto& e : bs.entries()) es.push_back({e.t1, e.t2, sub(e.o2, e.o1), e.coeff});
  k.add_all(std::move(es));
  return k;
}

BilinearStencil graded_swap(const BilinearStencil& b_ba, int a, int b) { return b_ba.swapped().scaled(-sign_of(a * b)); }

BilinearStencil compatibility_source(const Model& model, const DifferentialPairing& pr, int a, int b) {
  const int m = model.spec().m;
  BilinearStencil r(m, model.form(a), model.form(b), a + b + m);
  if (model.has_degree(a + 1) && pr.has(a + 1, b)) r = r + compose_first(pr.component(a + 1, b), model.Q(a));
  if (model.has_degree(b + 1) && pr.has(a, b + 1))
    r = r + compose_second(pr.component(a, b + 1), model.Q(b)).scaled(sign_of(a));
  return r.scaled(sign_of(m - 1));
}

BilinearStencil solve_local_primitive(const BilinearStencil& r, int m) {
  const int k = r.out_form() - 1;
  if (k < 0) {
    if (!r.is_zero()) throw std::runtime_error("nonzero closed 0-form source has no compactly supported primitive");
    return BilinearStencil(m, r.form1(), r.form2(), 0);
  }
  const Stencil d = exterior_derivative(m, k);
  std::vector<int> types;
  for (int t = 0; t < (1 << m); ++t)
    if (popcount(t) == k) types.push_back(t);

  // group by (t1, t2, o2 - o1): the source for delta inputs at 0 and o2 - o1
  std::map<std::tuple<int, int, Point>, std::vector<const BilinearEntry*>> groups;
  for (const auto& e : r.entries()) groups[{e.t1, e.t2, sub(e.o2, e.o1)}].push_back(&e);

  BilinearStencil out(m, r.form1(), r.form2(), k);
  std::vector<BilinearEntry> acc;
  for (const auto& [g, es] : groups) {
    const auto& [t1, t2, delta] = g;
    SparseCochain src;
    for (const BilinearEntry* e : es) src[{e->out_type, sub({0, 0, 0}, e->o1)}] += e->coeff;
    Point lo{0, 0, 0}, hi{0, 0, 0};
    bool first = true;
    for (const auto& [c, v] : src)
      for (int i = 0; i < m; ++i) {
        const auto u = static_cast<std::size_t>(i);
        lo[u] = first ? c.second[u] : std::min(lo[u], c.second[u]);
        hi[u] = first ? c.second[u] : std::max(hi[u], c.second[u]);
        if (i == m - 1) first = false;
      }
    std::optional<Vec> sol;
    std::vector<std::pair<int, Point>> unknowns;
    for (int pad = 1; pad <= 3 && !sol; ++pad) {
      Point blo = lo, bhi = hi;
      for (int i = 0; i < m; ++i) {
        blo[static_cast<std::size_t>(i)] -= pad;
        bhi[static_cast<std::size_t>(i)] += pad;
      }
      auto box_points = [&](const Point& a, const Point& b) {
        std::vector<Point> pts;
        for (int x0 = a[0]; x0 <= b[0]; ++x0)
          for (int x1 = (m > 1 ? a[1] : 0); x1 <= (m > 1 ? b[1] : 0); ++x1)
            for (int x2 = (m > 2 ? a[2] : 0); x2 <= (m > 2 ? b[2] : 0); ++x2) pts.push_back({x0, x1, x2});
        return pts;
      };
      unknowns.clear();
      std::map<std::pair<int, Point>, int> uidx;
      for (const Point& p : box_points(blo, bhi))
        for (int t : types) {
          uidx[{t, p}] = static_cast<int>(unknowns.size());
          unknowns.push_back({t, p});
        }
      Point elo = blo;
      for (int i = 0; i < m; ++i) elo[static_cast<std::size_t>(i)] -= 1;
      std::vector<Vec> a;
      Vec rhs;
      for (const Point& p : box_points(elo, bhi))
        for (int t = 0; t < (1 << m); ++t) {
          if (popcount(t) != k + 1) continue;
          Vec row(unknowns.size());
          bool any = false;
          for (const auto& de : d.entries()) {
            if (de.out_type != t) continue;
            auto it = uidx.find({de.in_type, add(p, de.off)});
            if (it == uidx.end()) continue;
            row[static_cast<std::size_t>(it->second)] += de.coeff;
            any = true;
          }
          auto sit = src.find({t, p});
          const Q v = (sit == src.end()) ? Q(0) : sit->second;
          if (!any && sgn(v) == 0) continue;
          a.push_back(std::move(row));
          rhs.push_back(v);
        }
      sol = solve(a, rhs, static_cast<int>(unknowns.size()));
    }
    if (!sol) throw std::runtime_error("compatibility source is not exact on a local box");
    for (std::size_t j = 0; j < unknowns.size(); ++j) {
      const Q& v = (*sol)[j];
      if (sgn(v) == 0) continue;
      const auto& [type, p] = unknowns[j];
      acc.push_back({type, t1, sub({0, 0, 0}, p), t2, sub(delta, p), v});
    }
  }
  out.add_all(std::move(acc));
  return out;
}

DifferentialPairing build_pairing(const Model& model) {
  const int m = model.spec().m;
  const int top = (1 << m) - 1;
  DifferentialPairing pr(m);
  auto put_antisymmetric = [&](int a, int b, BilinearStencil s) {
    pr.set(b, a, graded_swap(s, b, a));
    pr.set(a, b, std::move(s));
  };
  switch (model.spec().kind) {
    case ModelKind::KleinGordon: {
      BilinearStencil s(m, 0, 0, m);
      s.add(top, 0, {0, 0, 0}, 0, {0, 0, 0}, Q(1));
      put_antisymmetric(1, 0, std::move(s));
      break;
    }
    case ModelKind::MaxwellP: {
      BilinearStencil ghost(m, 0, 0, m);
      ghost.add(top, 0, {0, 0, 0}, 0, {0, 0, 0}, Q(1));
      put_antisymmetric(2, -1, std::move(ghost));
      BilinearStencil gauge(m, 1, 1, m);
      for (int a = 0; a < m; ++a) gauge.add(top, 1 << a, {0, 0, 0}, 1 << a, {0, 0, 0}, Q(hodge_sign(1 << a)));
      put_antisymmetric(1, 0, std::move(gauge));
      break;
    }
    default:
      throw std::invalid_argument("differential pairings are provided for Klein-Gordon and Maxwell only");
  }
  const int lo = model.deg_lo(), hi = model.deg_hi();
  for (int s = 0; s + m - 1 >= 0; --s) {
    std::vector<std::pair<int, int>> pairs;
    for (int a = lo; a <= hi; ++a)
      if (s - a >= lo && s - a <= hi) pairs.push_back({a, s - a});
    std::map<std::pair<int, int>, BilinearStencil> raw;
    for (const auto& [a, b] : pairs) raw[{a, b}] = solve_local_primitive(compatibility_source(model, pr, a, b), m);
    for (const auto& [a, b] : pairs)
      pr.set(a, b, (raw.at({a, b}) + graded_swap(raw.at({b, a}), a, b)).scaled(make_q(1, 2)));
  }
  return pr;
}

namespace {

Field random_compact_field(const CausalLattice& lat, int form, std::mt19937_64& rng, int cells) {
  Field f = Field::zero(lat, form);
  const int n = lat.n_time();
  for (int i = 0; i < cells; ++i) {
    const int idx = static_cast<int>(rng() % static_cast<std::uint64_t>(lat.cell_count(form)));
    const Cell c = lat.cell(form, idx);
    if (c.base[0] < n / 2 - 2 || c.base[0] > n / 2 + 1) continue;
    f.values[static_cast<std::size_t>(idx)] = make_q(static_cast<long>(rng() % 7) - 3, 1 + static_cast<long>(rng() % 2));
  }
  return f;
}

std::string pair_name(int a, int b) { return "(" + std::to_string(a) + ", " + std::to_string(b) + ")"; }

}  // namespace

PairingReport validate_pairing(const Model& model, const DifferentialPairing& pr, std::uint64_t seed, int samples) {
  PairingReport rep;
  const int m = model.spec().m;
  const int lo = model.deg_lo(), hi = model.deg_hi();
  auto comp = [&](int a, int b, int out) {
    return pr.has(a, b) ? pr.component(a, b) : BilinearStencil(m, model.form(a), model.form(b), out);
  };
  rep.antisymmetric = true;
  rep.compatible = true;
  for (int a = lo; a <= hi; ++a)
    for (int b = lo; b <= hi; ++b) {
      const int k = a + b + m - 1;
      if (k > m) continue;
      if (k >= 0 && comp(a, b, k) != graded_swap(comp(b, a, k), a, b)) {
        rep.antisymmetric = false;
        rep.failures.push_back("antisymmetry fails for component " + pair_name(a, b));
      }
      if (k < -1 || k >= m) continue;
      const BilinearStencil lhs = (k >= 0) ? compose_out(exterior_derivative(m, k), comp(a, b, k))
                                           : BilinearStencil(m, model.form(a), model.form(b), 0);
      if (lhs != compatibility_source(model, pr, a, b)) {
        rep.compatible = false;
        rep.failures.push_back("compatibility fails for component " + pair_name(a, b));
      }
    }

  rep.evaluated = true;
  std::mt19937_64 rng(seed);
  const CausalLattice& lat = model.lattice();
  std::vector<std::pair<int, int>> comps;
  for (const auto& [ab, s] : pr.components()) comps.push_back(ab);
  for (int i = 0; i < samples && !comps.empty(); ++i) {
    const auto [a, b] = comps[static_cast<std::size_t>(rng() % comps.size())];
    const int k = a + b + m - 1;
    const Field f1 = random_compact_field(lat, model.form(a), rng, 6);
    const Field f2 = random_compact_field(lat, model.form(b), rng, 6);
    const Field v = evaluate(pr.component(a, b), f1, f2, lat);
    const Field w = evaluate(comp(b, a, k), f2, f1, lat).scaled(-sign_of(a * b));
    if (v.values != w.values) {
      rep.evaluated = false;
      rep.failures.push_back("antisymmetry fails on a random pair for " + pair_name(a, b));
    }
    if (k == m) continue;
    const Field lhs = apply(exterior_derivative(m, k), v, lat).scaled(sign_of(m - 1));
    Field rhs = Field::zero(lat, k + 1);
    if (model.has_degree(a + 1) && pr.has(a + 1, b))
      rhs = rhs + evaluate(pr.component(a + 1, b), apply(model.Q(a), f1, lat), f2, lat);
    if (model.has_degree(b + 1) && pr.has(a, b + 1))
      rhs = rhs + evaluate(pr.component(a, b + 1), f1, apply(model.Q(b), f2, lat), lat).scaled(sign_of(a));
    if (lhs.values != rhs.values) {
      rep.evaluated = false;
      rep.failures.push_back("compatibility fails on a random pair for " + pair_name(a, b));
    }
  }
  return rep;
}

SelfAdjointReport validate_self_adjoint_witness(const Model& model, const DifferentialPairing& pr) {
  SelfAdjointReport rep;
  const int lo = model.deg_lo(), hi = model.deg_hi();
  const int m = model.spec().m;
  auto in = [&](int n) { return model.has_degree(n); };
  rep.qww = true;
  rep.pw = true;
  for (int n = lo; n <= hi; ++n) {
    if (in(n - 1) && in(n - 2)) {
      const Stencil ww = compose(model.W(n - 1), model.W(n));
      const Stencil lhs = compose(model.Q(n - 2), ww);
      Stencil rhs(m, model.form(n), model.form(n - 1));
      if (in(n + 1)) rhs = compose(model.W(n), compose(model.W(n + 1), model.Q(n)));
      if (lhs != rhs) {
        rep.qww = false;
        rep.failures.push_back("Q W W != W W Q in degree " + std::to_string(n));
      }
    } else if (in(n - 1) && in(n + 1)) {
      const Stencil rhs = compose(model.W(n), compose(model.W(n + 1), model.Q(n)));
      if (!rhs.is_zero()) {
        rep.qww = false;
        rep.failures.push_back("W W Q != 0 in degree " + std::to_string(n));
      }
    }
    if (in(n - 1) && compose(model.P(n - 1), model.W(n)) != compose(model.W(n), model.P(n))) {
      rep.pw = false;
      rep.failures.push_back("P W != W P in degree " + std::to_string(n));
    }
  }
  auto k_or_zero = [&](int a, int b) {
    return pr.has(a, b) ? pr.integrated(a, b) : Stencil(m, model.form(b), model.form(a));
  };
  rep.integral = true;
  rep.p_symmetric = true;
  for (int a = lo; a <= hi; ++a) {
    const int b = 2 - a;
    if (in(b) && (in(a - 1) || in(b - 1))) {
      Stencil lhs(m, model.form(b), model.form(a)), rhs(m, model.form(b), model.form(a));
      if (in(a - 1)) lhs = compose(model.W(a).transpose(), k_or_zero(a - 1, b));
      if (in(b - 1)) rhs = compose(k_or_zero(a, b - 1), model.W(b)).scaled(sign_of(a));
      if (lhs != rhs) {
        rep.integral = false;
        rep.failures.push_back("witness is not formally self-adjoint on " + pair_name(a, b));
      }
    }
    const int c = 1 - a;
    if (in(c) && pr.has(a, c)) {
      const Stencil k = pr.integrated(a, c);
      if (compose(model.P(a).transpose(), k) != compose(k, model.P(c))) {
        rep.p_symmetric = false;
        rep.failures.push_back("P is not formally self-adjoint on " + pair_name(a, c));
      }
    }
  }
  return rep;
}

}  // namespace ghc
