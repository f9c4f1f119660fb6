#include "ghc/rma.hpp"

#include <algorithm>
#include <functional>
#include <optional>
#include <set>
#include <stdexcept>

namespace ghc {

namespace {

int tbit(int type) { return has_time(type) ? 1 : 0; }

// Time-offset statistics of a stencil in span coordinates.
struct Offsets {
  int min_off = 0;  // min off0
  int max_off = 0;  // max off0
  int min_top = 0;  // min (off0 + tbit(in) - tbit(out))
  int max_top = 0;  // max (off0 + tbit(in) - tbit(out))
  int max_in = 0;   // max (off0 + tbit(in))
  bool zero = true;
};

Offsets offsets(const Stencil& s) {
  Offsets o;
  for (const auto& e : s.entries()) {
    const int top = e.off[0] + tbit(e.in_type) - tbit(e.out_type);
    const int in = e.off[0] + tbit(e.in_type);
    if (o.zero) {
      o = {e.off[0], e.off[0], top, top, in, false};
      continue;
    }
    o.min_off = std::min(o.min_off, e.off[0]);
    o.max_off = std::max(o.max_off, e.off[0]);
    o.min_top = std::min(o.min_top, top);
    o.max_top = std::max(o.max_top, top);
    o.max_in = std::max(o.max_in, in);
  }
  return o;
}

SpanWindow hull(const SpanWindow& a, const SpanWindow& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)};
}

SpanWindow meet(const SpanWindow& a, const SpanWindow& b) { return {std::max(a.lo, b.lo), std::min(a.hi, b.hi)}; }

bool same(const SpanWindow& a, const SpanWindow& b) { return a.lo == b.lo && a.hi == b.hi; }

// Where a section supported in w can be nonzero after applying s.
SpanWindow support_image(const Offsets& o, const SpanWindow& w) {
  if (w.empty() || o.zero) return {};
  return {w.lo - o.max_off, w.hi - o.min_top};
}

std::string window_text(const SpanWindow& w) { return "[" + std::to_string(w.lo) + ", " + std::to_string(w.hi) + "]"; }

Window as_window(const SpanWindow& w) { return {w.lo, w.hi}; }

Field zero_like(const CausalLattice& lat, int form) { return Field::zero(lat, form); }

std::string first_nonzero(const GradedMap& g) {
  for (const auto& [n, m] : g.block)
    for (int r = 0; r < m.rows(); ++r)
      if (!m.row(r).empty())
        return "degree " + std::to_string(n) + ", row " + std::to_string(r) + ", column " +
               std::to_string(m.row(r).front().first) + ", value " + m.row(r).front().second.get_str();
  return "";
}

}  // namespace

Field green_homotopy(const Model& model, int n, Direction dir, const Field& phi) {
  if (!model.has_degree(n - 1)) throw std::invalid_argument("green homotopy leaves the degree range");
  return apply(model.W(n), model.green(n, dir).solve(phi), model.lattice());
}

Field green_homotopy_alt(const Model& model, int n, Direction dir, const Field& phi) {
  if (!model.has_degree(n - 1)) throw std::invalid_argument("green homotopy leaves the degree range");
  return model.green(n - 1, dir).solve(apply(model.W(n), phi, model.lattice()));
}

Field green_two_homotopy(const Model& model, int n, Direction dir, const Field& phi) {
  if (!model.has_degree(n - 2)) throw std::invalid_argument("two-homotopy leaves the degree range");
  const CausalLattice& lat = model.lattice();
  const GreenSolver& g = model.green(n - 1, dir);
  return apply(model.W(n - 1), g.solve(g.solve(apply(model.W(n), phi, lat))), lat);
}

Field retarded_minus_advanced(const Model& model, int n, const Field& phi) {
  return green_homotopy(model, n, Direction::Retarded, phi) - green_homotopy(model, n, Direction::Advanced, phi);
}

Field random_admissible_field(const CausalLattice& lat, int form, std::mt19937_64& rng, int cells) {
  Field f = Field::zero(lat, form);
  const int lo = lat.margin(), hi = lat.n_time() - 1 - lat.margin();
  int placed = 0;
  while (placed < std::max(cells, 1)) {
    const int idx = static_cast<int>(rng() % static_cast<std::uint64_t>(lat.cell_count(form)));
    const Span s = span_of(lat.cell(form, idx));
    if (s.lo < lo || s.hi > hi) continue;
    const long v = static_cast<long>(rng() % 9) - 4;
    if (v == 0) continue;
    f.values[static_cast<std::size_t>(idx)] = make_q(v, 1 + static_cast<long>(rng() % 3));
    ++placed;
  }
  return f;
}

std::string describe_field(const Field& f, const CausalLattice& lat) {
  std::string out = "form " + std::to_string(f.form) + " window " + f.window.describe() + ":";
  int shown = 0;
  for (int i : f.support(lat)) {
    if (shown++ == 24) {
      out += " ...";
      break;
    }
    const Cell c = lat.cell(f.form, i);
    out += " (type " + std::to_string(c.type) + " @ " + std::to_string(c.base[0]) + "," + std::to_string(c.base[1]) +
           "," + std::to_string(c.base[2]) + ")=" + f.values[static_cast<std::size_t>(i)].get_str();
  }
  return out;
}

namespace {

std::string mismatch(const std::string& what, int n, const Field& src, const Field& a, const Field& b, int cell,
                     const CausalLattice& lat) {
  const Cell c = lat.cell(a.form, cell);
  return what + " in degree " + std::to_string(n) + " at cell (type " + std::to_string(c.type) + " @ " +
         std::to_string(c.base[0]) + "," + std::to_string(c.base[1]) + "," + std::to_string(c.base[2]) +
         "): " + a.values[static_cast<std::size_t>(cell)].get_str() + " vs " +
         b.values[static_cast<std::size_t>(cell)].get_str() + "; source " + describe_field(src, lat);
}

// Compares on the common validity window, which must contain the support span of `src`.
void compare(Outcome& out, const std::string& what, int n, const Field& src, const Field& a, const Field& b,
             const CausalLattice& lat) {
  ++out.cases;
  const Window w = a.window.meet(b.window);
  const auto sp = src.support_span(lat);
  if (sp && (w.lo > std::max(sp->lo, 0) || w.hi < std::min(sp->hi, lat.n_time() - 1))) {
    out.fail(what + " in degree " + std::to_string(n) + ": comparison window " + w.describe() +
             " misses the source support; source " + describe_field(src, lat));
    return;
  }
  if (auto d = first_difference(a, b, w, lat)) out.fail(mismatch(what, n, src, a, b, *d, lat));
}

}  // namespace

HomotopyReport check_green_homotopy(const Model& model, Direction dir, std::mt19937_64& rng, int samples_per_degree) {
  HomotopyReport rep;
  const CausalLattice& lat = model.lattice();
  for (int n = model.deg_lo(); n <= model.deg_hi(); ++n) {
    for (int s = 0; s < samples_per_degree; ++s) {
      const Field phi = random_admissible_field(lat, model.form(n), rng, 1 + static_cast<int>(rng() % 5));
      Field lhs = zero_like(lat, model.form(n));
      std::optional<Field> lam;
      if (model.has_degree(n - 1)) {
        lam = green_homotopy(model, n, dir, phi);
        lhs = lhs + apply(model.Q(n - 1), *lam, lat);
      }
      std::optional<Field> qphi;
      if (model.has_degree(n + 1)) {
        qphi = apply(model.Q(n), phi, lat);
        lhs = lhs + green_homotopy(model, n + 1, dir, *qphi);
      }
      compare(rep.homotopy, "d Lambda != id", n, phi, lhs, phi, lat);

      if (!lam) continue;
      ++rep.support.cases;
      const Region src = phi.support_sites(lat);
      const Region cone = (dir == Direction::Retarded) ? causal_future(lat, src) : causal_past(lat, src);
      Field valid_part = *lam;
      for (std::size_t i = 0; i < valid_part.values.size(); ++i)
        if (!lam->valid(lat, static_cast<int>(i))) valid_part.values[i] = 0;
      if (!valid_part.support_sites(lat).subset_of(cone))
        rep.support.fail("degree " + std::to_string(n) + ": Lambda phi leaves the causal cone; source " +
                         describe_field(phi, lat));

      Field dl = zero_like(lat, model.form(n - 1));
      if (model.has_degree(n - 2)) dl = dl + apply(model.Q(n - 2), green_two_homotopy(model, n, dir, phi), lat);
      if (qphi) dl = dl - green_two_homotopy(model, n + 1, dir, *qphi);
      const Field diff = green_homotopy_alt(model, n, dir, phi) - *lam;
      compare(rep.two_homotopy, "d lambda != Lambda~ - Lambda", n, phi, dl, diff, lat);
    }
  }
  return rep;
}

FiniteSpace finite_space(const CausalLattice& lat, int form, SpanWindow w) {
  FiniteSpace s;
  s.form = form;
  s.window = w;
  for (int i = 0; i < lat.cell_count(form); ++i)
    if (w.contains(span_of(lat.cell(form, i)))) {
      s.position[i] = static_cast<int>(s.cells.size());
      s.cells.push_back(i);
    }
  return s;
}

Field field_from(const FiniteSpace& s, const Vec& v, const CausalLattice& lat, Window window) {
  Field f = Field::zero(lat, s.form, window);
  for (std::size_t j = 0; j < s.cells.size(); ++j) f.values[static_cast<std::size_t>(s.cells[j])] = v[j];
  return f;
}

Vec vector_of(const FiniteSpace& s, const Field& f, const CausalLattice& lat) { return restrict_to(f, s.cells, lat); }

CertificateWindows certificate_windows(const Model& model, const PartitionOfUnity& pu) {
  const CausalLattice& lat = model.lattice();
  const int N = lat.n_time();
  const int lo = model.deg_lo(), hi = model.deg_hi();
  std::map<int, Offsets> q, w;
  for (int n = lo; n <= hi; ++n) {
    if (model.has_degree(n + 1)) q[n] = offsets(model.Q(n));
    if (model.has_degree(n - 1)) w[n] = offsets(model.W(n));
  }
  auto theta_rows = [&](int n) -> SpanWindow {
    const Offsets& o = q.at(n);
    return {pu.t_minus - std::max(0, o.max_off) + 1, pu.t_plus - std::min(0, o.min_off) - 1};
  };

  CertificateWindows cw;
  for (int n = lo; n <= hi; ++n) cw.compact[n] = {};
  for (int n = lo; n < hi; ++n) {
    if (q.at(n).zero) continue;
    const SpanWindow r = theta_rows(n);
    cw.compact[n + 1] = hull(cw.compact[n + 1], {r.lo, r.hi + 1});
  }
  const SpanWindow band{lat.margin(), N - 1 - lat.margin()};
  for (int iter = 0;; ++iter) {
    if (iter > 4 * N) throw GeometryTooTight("compact windows do not stabilize");
    bool changed = false;
    auto grow = [&](int n, const SpanWindow& add) {
      const SpanWindow h = hull(cw.compact[n], add);
      if (!same(h, cw.compact[n])) {
        cw.compact[n] = h;
        changed = true;
      }
    };
    for (int k = lo; k <= hi; ++k) {
      const SpanWindow c = cw.compact[k];
      if (c.empty()) continue;
      if (model.has_degree(k + 1)) grow(k + 1, support_image(q.at(k), c));
      if (model.has_degree(k - 1) && !w.at(k).zero) {
        SpanWindow plus = support_image(w.at(k), {c.lo + 1, N - 1});
        plus.hi = std::min(plus.hi, pu.t_plus);
        SpanWindow minus = support_image(w.at(k), {0, c.hi - 1});
        minus.lo = std::max(minus.lo, pu.t_minus + 1);
        grow(k - 1, hull(plus, minus));
      }
    }
    if (!changed) break;
  }
  for (const auto& [n, c] : cw.compact)
    if (!c.empty() && (c.lo < band.lo || c.hi > band.hi))
      throw GeometryTooTight("compact window " + window_text(c) + " in degree " + std::to_string(n) +
                             " leaves the admissible band " + window_text(band) + "; grow n_time or move the slices");

  for (int n = lo; n <= hi; ++n) cw.sc[n] = {0, N - 1};
  for (int iter = 0;; ++iter) {
    if (iter > 4 * N) throw GeometryTooTight("restriction windows do not stabilize");
    bool changed = false;
    auto shrink = [&](int n, const SpanWindow& cap) {
      const SpanWindow m = meet(cw.sc[n], cap);
      if (!same(m, cw.sc[n])) {
        cw.sc[n] = m;
        changed = true;
      }
    };
    for (int n = lo; n <= hi; ++n) {
      const SpanWindow a = cw.sc[n];
      if (model.has_degree(n + 1) && !q.at(n).zero) shrink(n + 1, {a.lo - q.at(n).min_off, a.hi - q.at(n).max_top});
      if (model.has_degree(n - 1) && !w.at(n).zero) {
        const Offsets& o = w.at(n);
        shrink(n - 1, {std::max(a.lo - 1, 0) - o.min_off, std::min(a.hi + 1, N - 1) - o.max_top});
        shrink(n - 1, {-o.min_off, N - 1 - o.max_top});
      }
    }
    if (!changed) break;
  }
  for (int n = lo; n <= hi; ++n) {
    const SpanWindow a = cw.sc[n];
    if (model.has_degree(n + 1) && !q.at(n).zero) {
      const SpanWindow r = theta_rows(n);
      const SpanWindow need{r.lo + std::min(0, q.at(n).min_off), r.hi + std::max(1, q.at(n).max_in)};
      if (a.lo > need.lo || a.hi < need.hi)
        throw GeometryTooTight("restriction window " + window_text(a) + " in degree " + std::to_string(n) +
                               " does not cover the commutator strip " + window_text(need) + "; grow n_time");
    }
    if (model.has_degree(n - 1) && !w.at(n).zero && (a.lo > pu.t_minus + 1 || a.hi < pu.t_plus))
      throw GeometryTooTight("restriction window " + window_text(a) + " in degree " + std::to_string(n) +
                             " does not contain the slices; grow n_time");
  }
  return cw;
}

namespace {

using FieldOp = std::function<std::optional<Field>(int, const Field&)>;

// Columns of a field-level operator. Spaces are keyed by degree of F; graded degree g of the
// source corresponds to F-degree g + src_shift.
GradedMap assemble(const GradedSpace& src_space, const std::map<int, FiniteSpace>& src, bool src_compact, int src_shift,
                   const GradedSpace& dst_space, const std::map<int, FiniteSpace>& dst, bool dst_compact,
                   int dst_shift, int degree, const FieldOp& op, const CausalLattice& lat) {
  GradedMap g = GradedMap::zero(src_space, dst_space, degree);
  for (const auto& [fdeg, s] : src) {
    const int gdeg = fdeg - src_shift;
    const int tdeg = gdeg + degree + dst_shift;
    auto dit = dst.find(tdeg);
    if (dit == dst.end() || s.dim() == 0 || dit->second.dim() == 0) continue;
    const FiniteSpace& d = dit->second;
    std::vector<Triplet> t;
    for (int j = 0; j < s.dim(); ++j) {
      Field e = Field::zero(lat, s.form, src_compact ? Window{} : as_window(s.window));
      e.values[static_cast<std::size_t>(s.cells[static_cast<std::size_t>(j)])] = 1;
      const std::optional<Field> img = op(fdeg, e);
      if (!img) break;
      if (dst_compact) {
        if (!img->window.compact()) throw GeometryTooTight("image of a compact section is not known to be compact");
        for (int i : img->support(lat)) {
          auto p = d.position.find(i);
          if (p == d.position.end())
            throw GeometryTooTight("image leaves the compact window " + window_text(d.window) + " of degree " +
                                   std::to_string(tdeg));
          t.push_back({p->second, j, img->values[static_cast<std::size_t>(i)]});
        }
      } else {
        const Vec v = vector_of(d, *img, lat);
        for (std::size_t i = 0; i < v.size(); ++i)
          if (sgn(v[i]) != 0) t.push_back({static_cast<int>(i), j, v[i]});
      }
    }
    g.set(gdeg, SparseMatrix::from_triplets(d.dim(), s.dim(), std::move(t)));
  }
  return g;
}

GradedSpace space_of(const std::map<int, FiniteSpace>& s, int shift) {
  GradedSpace g;
  for (const auto& [n, f] : s) g.dims[n - shift] = f.dim();
  return g;
}

void check_equal(Outcome& out, const GradedMap& a, const GradedMap& b, const std::string& what) {
  ++out.cases;
  if (!(a == b)) out.fail(what + ": first difference at " + first_nonzero(a - b));
}

}  // namespace

QuasiIsoCertificate build_certificate(const Model& model, CauchySlice minus, CauchySlice plus, std::mt19937_64& rng,
                                      bool with_cohomology) {
  const CausalLattice& lat = model.lattice();
  QuasiIsoCertificate c;
  c.pu = partition_of_unity(lat, minus, plus);
  c.windows = certificate_windows(model, c.pu);
  const int lo = model.deg_lo(), hi = model.deg_hi();
  for (int n = lo; n <= hi; ++n) {
    c.compact[n] = finite_space(lat, model.form(n), c.windows.compact.at(n));
    c.sc[n] = finite_space(lat, model.form(n), c.windows.sc.at(n));
  }

  std::map<int, SparseMatrix> qc, qsc;
  for (int n = lo; n < hi; ++n) {
    const SparseMatrix full = model.Q(n).materialize(lat);
    const FiniteSpace& src = c.compact.at(n);
    const FiniteSpace& dst = c.compact.at(n + 1);
    const SparseMatrix ft = full.transpose();
    for (int col : src.cells)
      for (const auto& [row, v] : ft.row(col))
        if (!dst.position.count(row))
          throw GeometryTooTight("Q leaves the compact window of degree " + std::to_string(n + 1));
    qc[n] = full.select(dst.cells, src.cells);
    const FiniteSpace& s2 = c.sc.at(n);
    const FiniteSpace& d2 = c.sc.at(n + 1);
    for (int row : d2.cells)
      for (const auto& [col, v] : full.row(row))
        if (!s2.position.count(col))
          throw GeometryTooTight("restricted Q reads outside the window of degree " + std::to_string(n));
    qsc[n] = full.select(d2.cells, s2.cells);
  }
  c.fc = make_complex(space_of(c.compact, 0), qc);
  c.fc1 = shift(c.fc, 1);
  c.fsc = make_complex(space_of(c.sc, 0), qsc);

  const FieldOp lambda_op = [&](int n, const Field& phi) -> std::optional<Field> {
    if (!model.has_degree(n - 1)) return std::nullopt;
    return retarded_minus_advanced(model, n, phi);
  };
  const FieldOp theta_op = [&](int n, const Field& psi) -> std::optional<Field> {
    if (!model.has_degree(n + 1)) return std::nullopt;
    return chi_commutator(model.Q(n), psi, c.pu, lat);
  };
  const FieldOp xi_op = [&](int n, const Field& phi) -> std::optional<Field> {
    if (!model.has_degree(n - 1)) return std::nullopt;
    const Field a = multiply_chi(green_homotopy(model, n, Direction::Retarded, phi), c.pu, false, lat);
    const Field b = multiply_chi(green_homotopy(model, n, Direction::Advanced, phi), c.pu, true, lat);
    return (a + b).scaled(Q(-1));
  };
  const FieldOp upsilon_op = [&](int n, const Field& psi) -> std::optional<Field> {
    if (!model.has_degree(n - 1)) return std::nullopt;
    return green_homotopy(model, n, Direction::Retarded, multiply_chi(psi, c.pu, true, lat)) +
           green_homotopy(model, n, Direction::Advanced, multiply_chi(psi, c.pu, false, lat));
  };
  const GradedSpace s_fc1 = c.fc1.space, s_sc = c.fsc.space;
  c.lambda = assemble(s_fc1, c.compact, true, 1, s_sc, c.sc, false, 0, 0, lambda_op, lat);
  c.theta = assemble(s_sc, c.sc, false, 0, s_fc1, c.compact, true, 1, 0, theta_op, lat);
  c.xi = assemble(s_fc1, c.compact, true, 1, s_fc1, c.compact, true, 1, -1, xi_op, lat);
  c.upsilon = assemble(s_sc, c.sc, false, 0, s_sc, c.sc, false, 0, -1, upsilon_op, lat);
  c.lambda.causal_class = CausalClass::Mixed;
  c.theta.causal_class = CausalClass::Local;

  check_equal(c.lambda_cochain, internal_hom_differential(c.lambda, c.fc1, c.fsc),
              GradedMap::zero(s_fc1, s_sc, 1), "Lambda is not a cochain map");
  check_equal(c.theta_cochain, internal_hom_differential(c.theta, c.fsc, c.fc1), GradedMap::zero(s_sc, s_fc1, 1),
              "Theta is not a cochain map");
  check_equal(c.xi_identity, internal_hom_differential(c.xi, c.fc1, c.fc1),
              GradedMap::identity(s_fc1) - compose(c.theta, c.lambda), "d Xi != id - Theta Lambda");
  check_equal(c.upsilon_identity, internal_hom_differential(c.upsilon, c.fsc, c.fsc),
              GradedMap::identity(s_sc) - compose(c.lambda, c.theta), "d Upsilon != id - Lambda Theta");

  for (int n = lo; n < hi; ++n) {
    const FiniteSpace& s = c.sc.at(n);
    const Stencil& qn = model.Q(n);
    const int row_lo = c.pu.t_minus - std::max(0, qn.max_time_offset()) + 1;
    const int row_hi = c.pu.t_plus - std::min(0, qn.min_time_offset()) - 1;
    for (int trial = 0; trial < 20; ++trial) {
      Vec v(static_cast<std::size_t>(s.dim()));
      for (auto& x : v) x = make_q(static_cast<long>(rng() % 7) - 3);
      const Field psi = field_from(s, v, lat, as_window(s.window));
      const Field a = chi_commutator(qn, psi, c.pu, lat);
      const Field b = (apply(qn, multiply_chi(psi, c.pu, false, lat), lat) -
                       multiply_chi(apply(qn, psi, lat), c.pu, false, lat))
                          .scaled(Q(-1));
      ++c.theta_branches.cases;
      const Window w = a.window.meet(b.window);
      if (w.lo > row_lo || w.hi < row_hi + 1) {
        c.theta_branches.fail("branch comparison window " + w.describe() + " misses the strip in degree " +
                              std::to_string(n));
        continue;
      }
      if (auto d = first_difference(a, b, w, lat))
        c.theta_branches.fail(mismatch("Theta branches differ", n, psi, a, b, *d, lat));
      Field outside = b;
      for (std::size_t i = 0; i < outside.values.size(); ++i) {
        const Cell cell = lat.cell(outside.form, static_cast<int>(i));
        if ((cell.base[0] >= row_lo && cell.base[0] <= row_hi) || !b.valid(lat, static_cast<int>(i)))
          outside.values[i] = 0;
      }
      if (!outside.is_zero()) c.theta_branches.fail("Theta branch is nonzero outside the strip in degree " + std::to_string(n));
    }
  }

  if (with_cohomology) {
    c.cone_dims = cohomology_dims(cone(c.lambda, c.fc1, c.fsc));
    c.fc1_dims = cohomology_dims(c.fc1);
    c.fsc_dims = cohomology_dims(c.fsc);
    ++c.cone_acyclic.cases;
    for (const auto& [n, d] : c.cone_dims)
      if (d != 0) c.cone_acyclic.fail("cone(Lambda) has H^" + std::to_string(n) + " of dimension " + std::to_string(d));
  }
  return c;
}

Region random_admissible_region(const CausalLattice& lat, std::mt19937_64& rng, int max_sites) {
  Region r(lat);
  const int count = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(std::max(max_sites, 1)));
  const int lo = lat.margin(), hi = lat.n_time() - 1 - lat.margin();
  for (int i = 0; i < count; ++i) {
    Point p = lat.spatial_point(static_cast<int>(rng() % static_cast<std::uint64_t>(lat.spatial_volume())));
    p[0] = lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
    r.insert(lat.site_index(p));
  }
  return r;
}

AcyclicityReport check_support_acyclicity(const Model& model, const Region& k, Direction dir, std::mt19937_64& rng) {
  const CausalLattice& lat = model.lattice();
  const int N = lat.n_time();
  const int lo = model.deg_lo(), hi = model.deg_hi();
  const bool ret = dir == Direction::Retarded;
  AcyclicityReport rep;
  rep.dir = dir;
  rep.k_sites = k.sorted_sites();
  const Region j = ret ? causal_future(lat, k) : causal_past(lat, k);

  std::map<int, Offsets> q, w;
  for (int n = lo; n <= hi; ++n) {
    q[n] = model.has_degree(n + 1) ? offsets(model.Q(n)) : Offsets{};
    w[n] = model.has_degree(n - 1) ? offsets(model.W(n)) : Offsets{};
  }
  // open-side restriction windows
  std::map<int, SpanWindow> win;
  for (int n = lo; n <= hi; ++n) win[n] = {0, N - 1};
  for (int iter = 0;; ++iter) {
    if (iter > 4 * N) throw GeometryTooTight("support windows do not stabilize");
    bool changed = false;
    auto cap = [&](int n, SpanWindow c) {
      const SpanWindow m = meet(win[n], c);
      if (!same(m, win[n])) {
        win[n] = m;
        changed = true;
      }
    };
    for (int n = lo; n <= hi; ++n) {
      const SpanWindow a = win[n];
      if (ret) {
        if (!q[n].zero) cap(n + 1, {0, a.hi - q[n].max_top});
        if (!w[n].zero) cap(n - 1, {0, std::min(a.hi + 1, N - 1) - w[n].max_top});
      } else {
        if (!q[n].zero) cap(n + 1, {a.lo - q[n].min_off, N - 1});
        if (!w[n].zero) cap(n - 1, {std::max(a.lo - 1, 0) - w[n].min_off, N - 1});
      }
    }
    if (!changed) break;
  }

  auto in_j = [&](const Cell& c) {
    for (const Point& v : lat.vertices(c))
      if (!j.contains(lat.site_index(v))) return false;
    return true;
  };
  std::map<int, std::vector<int>> e, rows;
  std::map<int, std::set<int>> e_set;
  for (int n = lo; n <= hi; ++n) {
    for (int i = 0; i < lat.cell_count(model.form(n)); ++i) {
      const Cell c = lat.cell(model.form(n), i);
      if (!win[n].contains(span_of(c))) continue;
      rows[n].push_back(i);
      if (in_j(c)) {
        e[n].push_back(i);
        e_set[n].insert(i);
      }
    }
    rep.e_dims[n] = static_cast<int>(e[n].size());
  }

  std::map<int, int> rank_full, rank_out;
  for (int n = lo; n < hi; ++n) {
    const SparseMatrix full = model.Q(n).materialize(lat);
    for (int r : rows[n + 1])
      for (const auto& [col, v] : full.row(r))
        if (!win[n].contains(span_of(lat.cell(model.form(n), col))))
          throw GeometryTooTight("support complex: Q reads outside the window of degree " + std::to_string(n));
    std::vector<int> outside;
    for (int r : rows[n + 1])
      if (!e_set[n + 1].count(r)) outside.push_back(r);
    rank_full[n] = rank(full.select(rows[n + 1], e[n]));
    rank_out[n] = rank(full.select(outside, e[n]));
  }
  ++rep.acyclic.cases;
  for (int n = lo; n <= hi; ++n) {
    int h = rep.e_dims[n];
    if (rank_full.count(n)) h -= rank_full[n];
    if (rank_full.count(n - 1)) h -= rank_full[n - 1] - rank_out[n - 1];
    rep.h_dims[n] = h;
    if (h != 0) rep.acyclic.fail("H^" + std::to_string(n) + " of the support complex has dimension " + std::to_string(h));
  }

  // footprint of the homotopy on E, from translated single-cell images
  for (int n = lo; n <= hi; ++n) {
    if (!model.has_degree(n - 1) || w[n].zero) continue;
    const int form = model.form(n);
    std::map<int, std::pair<Point, std::vector<Cell>>> foot;
    for (int type : lat.types(form)) {
      const Point base{ret ? 0 : N - 1 - tbit(type), 0, 0};
      const Field img = green_homotopy(model, n, dir, Field::basis(lat, form, lat.cell_index({type, base})));
      std::vector<Cell> cells;
      for (int i : img.support(lat))
        if (img.valid(lat, i)) cells.push_back(lat.cell(model.form(n - 1), i));
      foot[type] = {base, std::move(cells)};
    }
    for (int src : e[n]) {
      ++rep.contraction.cases;
      const Cell c = lat.cell(form, src);
      const auto& [base, cells] = foot.at(c.type);
      for (const Cell& f : cells) {
        const Cell t{f.type, {f.base[0] - base[0] + c.base[0], f.base[1] + c.base[1], f.base[2] + c.base[2]}};
        const int idx = lat.cell_index(t);
        if (idx < 0 || !win[n - 1].contains(span_of(t))) continue;
        if (!e_set[n - 1].count(idx)) {
          rep.contraction.fail("Lambda maps the cell (type " + std::to_string(c.type) + " @ " + std::to_string(c.base[0]) +
                               "," + std::to_string(c.base[1]) + "," + std::to_string(c.base[2]) + ") of degree " +
                               std::to_string(n) + " outside J(K)");
          break;
        }
      }
    }
  }
  // d Lambda = id on random sections of E
  for (int n = lo; n <= hi; ++n) {
    if (e[n].empty()) continue;
    for (int trial = 0; trial < 2; ++trial) {
      const Window wn = ret ? Window{kNegInf, win[n].hi} : Window{win[n].lo, kPosInf};
      Field phi = Field::zero(lat, model.form(n), wn);
      for (int i : e[n])
        if (rng() % 3 == 0) phi.values[static_cast<std::size_t>(i)] = make_q(static_cast<long>(rng() % 7) - 3);
      Field lhs = Field::zero(lat, model.form(n));
      if (model.has_degree(n - 1)) lhs = lhs + apply(model.Q(n - 1), green_homotopy(model, n, dir, phi), lat);
      if (model.has_degree(n + 1)) lhs = lhs + green_homotopy(model, n + 1, dir, apply(model.Q(n), phi, lat));
      ++rep.contraction.cases;
      const Window cmp{std::max(win[n].lo, 0), win[n].hi};
      const Window m = lhs.window.meet(phi.window);
      if (m.lo > cmp.lo || m.hi < cmp.hi) {
        rep.contraction.fail("d Lambda validity " + m.describe() + " misses the window " + cmp.describe());
        continue;
      }
      if (auto d = first_difference(lhs, phi, cmp, lat))
        rep.contraction.fail(mismatch("d Lambda != id on the support complex", n, phi, lhs, phi, *d, lat));
    }
  }
  return rep;
}

}  // namespace ghc
