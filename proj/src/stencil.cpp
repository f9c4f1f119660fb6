#include "ghc/stencil.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <tuple>

namespace ghc {

namespace {

auto entry_key(const StencilEntry& e) { return std::tie(e.out_type, e.in_type, e.off); }

std::string bound_str(int v) {
  if (v <= kNegInf) return "-inf";
  if (v >= kPosInf) return "+inf";
  return std::to_string(v);
}

int tbit(int type) { return has_time(type) ? 1 : 0; }

}  // namespace

Stencil Stencil::identity(int m, int form) {
  Stencil s(m, form, form);
  for (int t = 0; t < (1 << m); ++t)
    if (popcount(t) == form) s.entries_.push_back({t, t, {0, 0, 0}, Q(1)});
  return s;
}

void Stencil::add(int out_type, int in_type, Point off, const Q& coeff) {
  if (popcount(out_type) != out_form_ || popcount(in_type) != in_form_)
    throw std::invalid_argument("stencil entry type does not match form degree");
  entries_.push_back({out_type, in_type, off, coeff});
  normalize();
}

void Stencil::add_all(std::vector<StencilEntry> entries) {
  for (const auto& e : entries)
    if (popcount(e.out_type) != out_form_ || popcount(e.in_type) != in_form_)
      throw std::invalid_argument("stencil entry type does not match form degree");
  entries_.insert(entries_.end(), entries.begin(), entries.end());
  normalize();
}

void Stencil::normalize() {
  std::sort(entries_.begin(), entries_.end(),
            [](const StencilEntry& a, const StencilEntry& b) { return entry_key(a) < entry_key(b); });
  std::vector<StencilEntry> out;
  for (auto& e : entries_) {
    if (!out.empty() && entry_key(out.back()) == entry_key(e))
      out.back().coeff += e.coeff;
    else
      out.push_back(e);
  }
  std::erase_if(out, [](const StencilEntry& e) { return sgn(e.coeff) == 0; });
  entries_ = std::move(out);
}

Stencil Stencil::operator+(const Stencil& o) const {
  if (m_ != o.m_ || in_form_ != o.in_form_ || out_form_ != o.out_form_)
    throw std::invalid_argument("stencil sum: shape mismatch");
  Stencil r = *this;
  r.entries_.insert(r.entries_.end(), o.entries_.begin(), o.entries_.end());
  r.normalize();
  return r;
}

Stencil Stencil::operator-(const Stencil& o) const { return *this + o.scaled(Q(-1)); }

Stencil Stencil::scaled(const Q& s) const {
  Stencil r = *this;
  for (auto& e : r.entries_) e.coeff *= s;
  r.normalize();
  return r;
}

bool Stencil::operator==(const Stencil& o) const {
  if (m_ != o.m_ || in_form_ != o.in_form_ || out_form_ != o.out_form_) return false;
  if (entries_.size() != o.entries_.size()) return false;
  for (std::size_t i = 0; i < entries_.size(); ++i)
    if (entry_key(entries_[i]) != entry_key(o.entries_[i]) || entries_[i].coeff != o.entries_[i].coeff)
      return false;
  return true;
}

Stencil Stencil::transpose() const {
  Stencil r(m_, out_form_, in_form_);
  for (const auto& e : entries_) r.entries_.push_back({e.in_type, e.out_type, {-e.off[0], -e.off[1], -e.off[2]}, e.coeff});
  r.normalize();
  return r;
}

int Stencil::radius() const {
  int r = 0;
  for (const auto& e : entries_)
    for (int v : e.off) r = std::max(r, std::abs(v));
  return r;
}

Reach Stencil::reach() const {
  Reach r{0, 0};
  bool first = true;
  for (const auto& e : entries_) {
    const int back = e.off[0];
    const int front = e.off[0] + tbit(e.in_type) - tbit(e.out_type);
    if (first) {
      r = {back, front};
      first = false;
    } else {
      r.back = std::min(r.back, back);
      r.front = std::max(r.front, front);
    }
  }
  return r;
}

int Stencil::min_time_offset() const {
  int v = 0;
  for (const auto& e : entries_) v = std::min(v, e.off[0]);
  return v;
}

int Stencil::max_time_offset() const {
  int v = 0;
  for (const auto& e : entries_) v = std::max(v, e.off[0]);
  return v;
}

SparseMatrix Stencil::materialize(const CausalLattice& lat) const {
  std::vector<int> rows(static_cast<std::size_t>(lat.cell_count(out_form_)));
  std::vector<int> cols(static_cast<std::size_t>(lat.cell_count(in_form_)));
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = static_cast<int>(i);
  for (std::size_t i = 0; i < cols.size(); ++i) cols[i] = static_cast<int>(i);
  return materialize(lat, rows, cols);
}

SparseMatrix Stencil::materialize(const CausalLattice& lat, const std::vector<int>& rows,
                                  const std::vector<int>& cols) const {
  std::vector<int> col_pos(static_cast<std::size_t>(lat.cell_count(in_form_)), -1);
  for (std::size_t j = 0; j < cols.size(); ++j) col_pos[static_cast<std::size_t>(cols[j])] = static_cast<int>(j);
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Cell c = lat.cell(out_form_, rows[i]);
    for (const auto& e : entries_) {
      if (e.out_type != c.type) continue;
      Cell in{e.in_type, {c.base[0] + e.off[0], c.base[1] + e.off[1], c.base[2] + e.off[2]}};
      const int idx = lat.cell_index(in);
      if (idx < 0) continue;
      const int j = col_pos[static_cast<std::size_t>(idx)];
      if (j >= 0) t.push_back({static_cast<int>(i), j, e.coeff});
    }
  }
  return SparseMatrix::from_triplets(static_cast<int>(rows.size()), static_cast<int>(cols.size()), std::move(t));
}

std::string Stencil::describe() const {
  std::ostringstream os;
  os << "stencil " << in_form_ << "->" << out_form_ << " (" << entries_.size() << " entries)";
  return os.str();
}

Stencil compose(const Stencil& a, const Stencil& b) {
  if (a.in_form() != b.out_form() || a.m() != b.m()) throw std::invalid_argument("stencil compose: form mismatch");
  Stencil r(a.m(), b.in_form(), a.out_form());
  std::multimap<int, const StencilEntry*> by_out;
  for (const auto& e : b.entries()) by_out.emplace(e.out_type, &e);
  std::vector<StencilEntry> acc;
  for (const auto& ea : a.entries()) {
    auto [lo, hi] = by_out.equal_range(ea.in_type);
    for (auto it = lo; it != hi; ++it) {
      const auto& eb = *it->second;
      acc.push_back({ea.out_type, eb.in_type,
                     {ea.off[0] + eb.off[0], ea.off[1] + eb.off[1], ea.off[2] + eb.off[2]}, ea.coeff * eb.coeff});
    }
  }
  r.add_all(std::move(acc));
  return r;
}

Stencil exterior_derivative(int m, int k) {
  Stencil s(m, k, k + 1);
  for (int out = 0; out < (1 << m); ++out) {
    if (popcount(out) != k + 1) continue;
    for (int a = 0; a < m; ++a) {
      if (!(out & (1 << a))) continue;
      const int in = out & ~(1 << a);
      const Q sg = (axis_position(out, a) % 2 == 0) ? Q(1) : Q(-1);
      Point e{0, 0, 0};
      e[static_cast<std::size_t>(a)] = 1;
      s.add(out, in, e, sg);
      s.add(out, in, {0, 0, 0}, -sg);
    }
  }
  return s;
}

int hodge_sign(int type) { return has_time(type) ? -1 : 1; }

Stencil codifferential(int m, int k) {
  Stencil dt = exterior_derivative(m, k - 1).transpose();
  Stencil r(m, k, k - 1);
  for (const auto& e : dt.entries()) r.add(e.out_type, e.in_type, e.off, e.coeff * hodge_sign(e.in_type) * hodge_sign(e.out_type));
  return r;
}

Window Window::meet(const Window& o) const { return {std::max(lo, o.lo), std::min(hi, o.hi)}; }

std::string Window::describe() const { return "[" + bound_str(lo) + ", " + bound_str(hi) + "]"; }

Field Field::zero(const CausalLattice& lat, int form, Window w) {
  Field f;
  f.form = form;
  f.values.assign(static_cast<std::size_t>(lat.cell_count(form)), Q(0));
  f.window = w;
  return f;
}

Field Field::basis(const CausalLattice& lat, int form, int cell) {
  Field f = zero(lat, form);
  f.values[static_cast<std::size_t>(cell)] = 1;
  return f;
}

bool Field::valid(const CausalLattice& lat, int cell) const { return window.contains(span_of(lat.cell(form, cell))); }

std::optional<Span> Field::support_span(const CausalLattice& lat) const {
  std::optional<Span> s;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (sgn(values[i]) == 0) continue;
    const Span sp = span_of(lat.cell(form, static_cast<int>(i)));
    if (!s)
      s = sp;
    else {
      s->lo = std::min(s->lo, sp.lo);
      s->hi = std::max(s->hi, sp.hi);
    }
  }
  return s;
}

std::vector<int> Field::support(const CausalLattice&) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (sgn(values[i]) != 0) out.push_back(static_cast<int>(i));
  return out;
}

Region Field::support_sites(const CausalLattice& lat) const {
  Region r(lat);
  for (int i : support(lat))
    for (const Point& v : lat.vertices(lat.cell(form, i))) r.insert(lat.site_index(v));
  return r;
}

bool Field::is_zero() const {
  return std::all_of(values.begin(), values.end(), [](const Q& q) { return sgn(q) == 0; });
}

Field Field::operator+(const Field& o) const {
  if (form != o.form || values.size() != o.values.size()) throw std::invalid_argument("field sum: form mismatch");
  Field r = *this;
  for (std::size_t i = 0; i < values.size(); ++i) r.values[i] += o.values[i];
  r.window = window.meet(o.window);
  return r;
}

Field Field::operator-(const Field& o) const { return *this + o.scaled(Q(-1)); }

Field Field::scaled(const Q& s) const {
  Field r = *this;
  for (auto& v : r.values) v *= s;
  return r;
}

Field apply(const Stencil& s, const Field& f, const CausalLattice& lat) {
  if (s.in_form() != f.form) throw std::invalid_argument("apply: stencil input form mismatch");
  Field out = Field::zero(lat, s.out_form());
  for (int i = 0; i < lat.cell_count(s.out_form()); ++i) {
    const Cell c = lat.cell(s.out_form(), i);
    Q acc;
    for (const auto& e : s.entries()) {
      if (e.out_type != c.type) continue;
      const int idx = lat.cell_index({e.in_type, {c.base[0] + e.off[0], c.base[1] + e.off[1], c.base[2] + e.off[2]}});
      if (idx < 0) continue;
      const Q& v = f.values[static_cast<std::size_t>(idx)];
      if (sgn(v) != 0) acc += e.coeff * v;
    }
    out.values[static_cast<std::size_t>(i)] = acc;
  }
  if (s.is_zero()) return out;
  const Reach r = s.reach();
  const auto sp = f.support_span(lat);
  const int n = lat.n_time();
  // An output cell below the slab reads inputs with span.lo <= front; above, span.hi >= n-1+back.
  if (f.window.lo == kNegInf)
    out.window.lo = (!sp || sp->lo > r.front) ? kNegInf : 0;
  else
    out.window.lo = std::max(f.window.lo, 0) - r.back;
  if (f.window.hi == kPosInf)
    out.window.hi = (!sp || sp->hi < n - 1 + r.back) ? kPosInf : n - 1;
  else
    out.window.hi = std::min(f.window.hi, n - 1) - r.front;
  return out;
}

Field multiply_chi(const Field& f, const PartitionOfUnity& pu, bool plus, const CausalLattice& lat) {
  Field out = f;
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    const Cell c = lat.cell(f.form, static_cast<int>(i));
    out.values[i] *= plus ? pu.plus_cell(c) : pu.minus_cell(c);
  }
  // chi+ kills cells with span.lo <= t_minus; chi- kills span.lo >= t_plus.
  if (plus && f.window.lo <= pu.t_minus + 1) out.window.lo = kNegInf;
  if (!plus && f.window.hi >= pu.t_plus) out.window.hi = kPosInf;
  for (std::size_t i = 0; i < out.values.size(); ++i)
    if (!out.window.contains(span_of(lat.cell(f.form, static_cast<int>(i))))) out.values[i] = 0;
  for (std::size_t i = 0; i < out.values.size(); ++i)
    if (!f.valid(lat, static_cast<int>(i)) && sgn(out.values[i]) != 0) out.values[i] = 0;
  return out;
}

Field chi_commutator(const Stencil& s, const Field& f, const PartitionOfUnity& pu, const CausalLattice& lat) {
  if (s.in_form() != f.form) throw std::invalid_argument("chi_commutator: form mismatch");
  const int row_lo = pu.t_minus - std::max(0, s.max_time_offset()) + 1;
  const int row_hi = pu.t_plus - std::min(0, s.min_time_offset()) - 1;
  if (row_lo < 0 || row_hi > lat.n_time() - 2)
    throw GeometryTooTight("commutator strip [" + std::to_string(row_lo) + ", " + std::to_string(row_hi) +
                           "] leaves the slab");
  Field out = Field::zero(lat, s.out_form());
  for (int i = 0; i < lat.cell_count(s.out_form()); ++i) {
    const Cell c = lat.cell(s.out_form(), i);
    if (c.base[0] < row_lo || c.base[0] > row_hi) continue;
    const Q& chi_c = pu.plus_cell(c);
    Q acc;
    for (const auto& e : s.entries()) {
      if (e.out_type != c.type) continue;
      const Cell in{e.in_type, {c.base[0] + e.off[0], c.base[1] + e.off[1], c.base[2] + e.off[2]}};
      const int idx = lat.cell_index(in);
      const Q w = pu.plus_cell(in) - chi_c;
      if (sgn(w) == 0) continue;
      if (idx < 0 || !f.valid(lat, idx))
        throw GeometryTooTight("commutator needs input outside the validity window " + f.window.describe());
      acc += e.coeff * w * f.values[static_cast<std::size_t>(idx)];
    }
    out.values[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

Vec restrict_to(const Field& f, const std::vector<int>& cells, const CausalLattice& lat) {
  Vec out;
  out.reserve(cells.size());
  for (int c : cells) {
    if (!f.valid(lat, c))
      throw GeometryTooTight("value requested outside the validity window " + f.window.describe());
    out.push_back(f.values[static_cast<std::size_t>(c)]);
  }
  return out;
}

std::optional<int> first_difference(const Field& a, const Field& b, const Window& w, const CausalLattice& lat) {
  if (a.form != b.form) throw std::invalid_argument("first_difference: form mismatch");
  const Window m = a.window.meet(b.window);
  if (w.lo < m.lo || w.hi > m.hi)
    throw GeometryTooTight("comparison window " + w.describe() + " exceeds validity " + m.describe());
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    if (!w.contains(span_of(lat.cell(a.form, static_cast<int>(i))))) continue;
    if (a.values[i] != b.values[i]) return static_cast<int>(i);
  }
  return std::nullopt;
}

}  // namespace ghc
