#include "ghc/green.hpp"

#include <algorithm>
#include <stdexcept>

namespace ghc {

namespace {

int tbit(int type) { return has_time(type) ? 1 : 0; }

std::vector<Point> raw_vertices(int type, const Point& base, int m) {
  std::vector<Point> out;
  for (int sub = type;; sub = (sub - 1) & type) {
    Point p = base;
    for (int a = 0; a < m; ++a)
      if (sub & (1 << a)) p[static_cast<std::size_t>(a)] += 1;
    out.push_back(p);
    if (sub == 0) break;
  }
  return out;
}

// v in the unwrapped taxicab future of w
bool in_future(const Point& v, const Point& w, int m) {
  int d = 0;
  for (int a = 1; a < m; ++a) d += std::abs(v[static_cast<std::size_t>(a)] - w[static_cast<std::size_t>(a)]);
  return v[0] - w[0] >= d;
}

}  // namespace

Stencil reflect_time(const Stencil& s) {
  Stencil r(s.m(), s.in_form(), s.out_form());
  std::vector<StencilEntry> es;
  for (const auto& e : s.entries())
    es.push_back({e.out_type, e.in_type, {-e.off[0] - tbit(e.in_type) + tbit(e.out_type), e.off[1], e.off[2]}, e.coeff});
  r.add_all(std::move(es));
  return r;
}

Field reflect_time(const Field& f, const CausalLattice& lat) {
  Field r = Field::zero(lat, f.form);
  const int n = lat.n_time();
  for (int i = 0; i < lat.cell_count(f.form); ++i) {
    Cell c = lat.cell(f.form, i);
    c.base[0] = n - 1 - c.base[0] - tbit(c.type);
    r.values[static_cast<std::size_t>(lat.cell_index(c))] = f.values[static_cast<std::size_t>(i)];
  }
  r.window.lo = (f.window.hi >= kPosInf) ? kNegInf : n - 1 - f.window.hi;
  r.window.hi = (f.window.lo <= kNegInf) ? kPosInf : n - 1 - f.window.lo;
  return r;
}

CausalCertificate certify_causal(const Stencil& p_in, Direction dir) {
  CausalCertificate cert;
  if (p_in.in_form() != p_in.out_form()) {
    cert.failures.push_back({-1, "operator is not degree preserving"});
    return cert;
  }
  const Stencil p = (dir == Direction::Retarded) ? p_in : reflect_time(p_in);
  const int m = p.m();
  for (int type = 0; type < (1 << m); ++type) {
    if (popcount(type) != p.in_form()) continue;
    std::vector<const StencilEntry*> later, rest;
    for (const auto& e : p.entries()) {
      if (e.out_type != type) continue;
      (e.off[0] > 0 ? later : rest).push_back(&e);
    }
    if (later.size() != 1) {
      cert.failures.push_back({type, later.empty() ? "no leading time-level coefficient"
                                                   : "more than one later time-level coefficient"});
      continue;
    }
    const StencilEntry& lead = *later.front();
    if (lead.in_type != type || lead.off != Point{1, 0, 0}) {
      cert.failures.push_back({type, "leading coefficient does not sit on the time-shifted cell"});
      continue;
    }
    cert.leading[type] = lead.coeff;
    const auto lv = raw_vertices(type, {1, 0, 0}, m);
    for (const StencilEntry* e : rest) {
      const auto cv = raw_vertices(e->in_type, e->off, m);
      for (const Point& v : lv) {
        const bool reached = std::any_of(cv.begin(), cv.end(), [&](const Point& w) { return in_future(v, w, m); });
        if (!reached) cert.failures.push_back({type, "input outside the causal cone of the leading cell"});
      }
    }
  }
  cert.ok = cert.failures.empty();
  return cert;
}

GreenSolver::GreenSolver(const Stencil& p, const CausalLattice& lat, Direction dir)
    : p_(p), work_(dir == Direction::Retarded ? p : reflect_time(p)), lat_(&lat), dir_(dir) {
  const CausalCertificate cert = certify_causal(work_, Direction::Retarded);
  if (!cert.ok) throw std::invalid_argument("operator is not causally solvable: " + cert.failures.front().reason);
  lat.register_radius(p.radius());
  lead_ = cert.leading;
  rows_by_type_.assign(static_cast<std::size_t>(1 << p.m()), {});
  for (const auto& e : work_.entries())
    if (e.off[0] <= 0) rows_by_type_[static_cast<std::size_t>(e.out_type)].push_back(&e);
}

Field GreenSolver::sweep_retarded(const Field& phi) const {
  const CausalLattice& lat = *lat_;
  if (phi.window.lo != kNegInf) throw GeometryTooTight("retarded solve needs a source known to vanish in the past");
  const int n = lat.n_time();
  const int V = lat.spatial_volume();
  Field psi = Field::zero(lat, phi.form);
  const auto& types = lat.types(phi.form);
  for (int t = 0; t + 1 < n; ++t) {
    for (int type : types) {
      if (t + 1 >= lat.type_levels(type)) continue;
      const Q& lead = lead_.at(type);
      for (int s = 0; s < V; ++s) {
        Point base = lat.spatial_point(s);
        base[0] = t;
        Q acc = phi.values[static_cast<std::size_t>(lat.cell_index({type, base}))];
        for (const StencilEntry* e : rows_by_type_[static_cast<std::size_t>(type)]) {
          const int idx = lat.cell_index({e->in_type, {t + e->off[0], base[1] + e->off[1], base[2] + e->off[2]}});
          if (idx < 0) continue;
          const Q& v = psi.values[static_cast<std::size_t>(idx)];
          if (sgn(v) != 0) acc -= e->coeff * v;
        }
        if (sgn(acc) != 0) {
          Point lb = base;
          lb[0] = t + 1;
          psi.values[static_cast<std::size_t>(lat.cell_index({type, lb}))] = acc / lead;
        }
      }
    }
  }
  psi.window.lo = kNegInf;
  psi.window.hi = (phi.window.hi >= kPosInf) ? n - 1 : std::min(phi.window.hi + 1, n - 1);
  return psi;
}

const std::vector<std::pair<int, Q>>& GreenSolver::kernel(int type) const {
  auto it = kernels_.find(type);
  if (it != kernels_.end()) return it->second;
  const CausalLattice& lat = *lat_;
  const Field src = Field::basis(lat, popcount(type), lat.cell_index({type, {0, 0, 0}}));
  const Field k = sweep_retarded(src);
  std::vector<std::pair<int, Q>> out;
  for (int i : k.support(lat)) out.emplace_back(i, k.values[static_cast<std::size_t>(i)]);
  return kernels_.emplace(type, std::move(out)).first->second;
}

Field GreenSolver::solve_retarded(const Field& phi) const {
  const CausalLattice& lat = *lat_;
  if (phi.window.lo != kNegInf) throw GeometryTooTight("retarded solve needs a source known to vanish in the past");
  const std::vector<int> supp = phi.support(lat);
  std::size_t kernel_work = 0;
  for (int type : lat.types(phi.form)) kernel_work = std::max(kernel_work, kernel(type).size());
  const std::size_t sweep_work = static_cast<std::size_t>(lat.cell_count(phi.form)) * (work_.entries().size() + 1);
  if (supp.size() * kernel_work > sweep_work) return sweep_retarded(phi);

  const int n = lat.n_time();
  Field psi = Field::zero(lat, phi.form);
  for (int src : supp) {
    const Cell sc = lat.cell(phi.form, src);
    const Q& a = phi.values[static_cast<std::size_t>(src)];
    for (const auto& [ki, kv] : kernel(sc.type)) {
      Cell c = lat.cell(phi.form, ki);
      c.base[0] += sc.base[0];
      c.base[1] += sc.base[1];
      c.base[2] += sc.base[2];
      const int idx = lat.cell_index(c);
      if (idx >= 0) psi.values[static_cast<std::size_t>(idx)] += a * kv;
    }
  }
  psi.window.lo = kNegInf;
  psi.window.hi = (phi.window.hi >= kPosInf) ? n - 1 : std::min(phi.window.hi + 1, n - 1);
  return psi;
}

Field GreenSolver::solve(const Field& phi) const {
  if (phi.form != p_.in_form()) throw std::invalid_argument("green solve: form mismatch");
  if (dir_ == Direction::Retarded) return solve_retarded(phi);
  return reflect_time(solve_retarded(reflect_time(phi, *lat_)), *lat_);
}

Field GreenSolver::sweep(const Field& phi) const {
  if (dir_ == Direction::Retarded) return sweep_retarded(phi);
  return reflect_time(sweep_retarded(reflect_time(phi, *lat_)), *lat_);
}

Field GreenSolver::solve_admissible(const Field& phi) const {
  const CausalLattice& lat = *lat_;
  const auto sp = phi.support_span(lat);
  if (sp) {
    if (dir_ == Direction::Retarded && sp->lo < lat.margin())
      throw std::invalid_argument("inadmissible support: source starts before the margin");
    if (dir_ == Direction::Advanced && sp->hi > lat.n_time() - 1 - lat.margin())
      throw std::invalid_argument("inadmissible support: source ends after the margin");
  }
  Field f = phi;
  f.window = {};
  return solve(f);
}

std::optional<Field> dense_green_solve(const Stencil& p, const Field& phi, const CausalLattice& lat, Direction dir) {
  const int k = phi.form;
  const int nc = lat.cell_count(k);
  const int n = lat.n_time();
  std::vector<Vec> a;
  Vec b;
  const SparseMatrix pm = p.materialize(lat);
  for (int i = 0; i < nc; ++i) {
    const Cell c = lat.cell(k, i);
    Cell lead = c;
    lead.base[0] += (dir == Direction::Retarded) ? 1 : -1;
    if (lat.cell_index(lead) < 0) continue;
    Vec row(static_cast<std::size_t>(nc));
    for (const auto& [j, v] : pm.row(i)) row[static_cast<std::size_t>(j)] = v;
    a.push_back(std::move(row));
    b.push_back(phi.values[static_cast<std::size_t>(i)]);
  }
  for (int i = 0; i < nc; ++i) {
    const Span s = span_of(lat.cell(k, i));
    const bool boundary = (dir == Direction::Retarded) ? s.lo == 0 : s.hi == n - 1;
    if (!boundary) continue;
    Vec row(static_cast<std::size_t>(nc));
    row[static_cast<std::size_t>(i)] = 1;
    a.push_back(std::move(row));
    b.push_back(0);
  }
  if (bareiss_rank(a) != nc) return std::nullopt;
  auto x = solve(a, b, nc);
  if (!x) return std::nullopt;
  Field out = Field::zero(lat, k);
  out.values = *x;
  return out;
}

}  // namespace ghc
