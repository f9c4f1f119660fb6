#include "ghc/poisson.hpp"

#include <stdexcept>

namespace ghc {

namespace {

Q pm(int k) { return Q(parity_sign(k)); }

Point add(const Point& a, const Point& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }

}  // namespace

// ---- bilinear forms ----

BilinearForm BilinearForm::zero(const GradedSpace& v, int degree) {
  BilinearForm f;
  f.degree = degree;
  f.space = v;
  return f;
}

SparseMatrix BilinearForm::at(int p) const {
  auto it = block.find(p);
  if (it != block.end()) return it->second;
  return SparseMatrix(space.dim(p), space.dim(-degree - p));
}

void BilinearForm::set(int p, SparseMatrix m) {
  if (m.rows() != space.dim(p) || m.cols() != space.dim(-degree - p))
    throw std::invalid_argument("bilinear form block has the wrong shape");
  if (m.is_zero())
    block.erase(p);
  else
    block[p] = std::move(m);
}

BilinearForm BilinearForm::operator+(const BilinearForm& o) const {
  if (degree != o.degree) throw std::invalid_argument("adding bilinear forms of different degrees");
  BilinearForm r = *this;
  for (const auto& [p, m] : o.block) r.set(p, r.at(p) + m);
  return r;
}

BilinearForm BilinearForm::operator-(const BilinearForm& o) const { return *this + o.scaled(Q(-1)); }

BilinearForm BilinearForm::scaled(const Q& s) const {
  BilinearForm r = zero(space, degree);
  for (const auto& [p, m] : block) r.set(p, m.scaled(s));
  return r;
}

bool BilinearForm::operator==(const BilinearForm& o) const {
  if (degree != o.degree) return is_zero() && o.is_zero();
  for (const auto& [p, m] : block)
    if (m != o.at(p)) return false;
  for (const auto& [p, m] : o.block)
    if (m != at(p)) return false;
  return true;
}

bool BilinearForm::is_zero() const {
  for (const auto& [p, m] : block)
    if (!m.is_zero()) return false;
  return true;
}

BilinearForm BilinearForm::braided() const {
  BilinearForm r = zero(space, degree);
  for (const auto& [p, m] : block) {
    const int q = -degree - p;
    r.set(q, m.transpose().scaled(Q(sign(SignRule::Koszul, p, q))));
  }
  return r;
}

Q BilinearForm::evaluate(int p, const Vec& x, const Vec& y) const {
  const Vec my = at(p).apply(y);
  Q s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * my[i];
  return s;
}

BilinearForm asym(const BilinearForm& f) { return (f - f.braided()).scaled(make_q(1, 2)); }

BilinearForm differential(const BilinearForm& f, const LadderComplex& v) {
  const int k = f.degree;
  BilinearForm r = BilinearForm::zero(v.space, k + 1);
  for (int p : v.space.degrees()) {
    const int q = -k - 1 - p;
    if (v.space.dim(p) == 0 || v.space.dim(q) == 0) continue;
    SparseMatrix acc(v.space.dim(p), v.space.dim(q));
    if (v.space.dim(p + 1) > 0) acc = acc + v.Q.at(p).transpose() * f.at(p + 1);
    if (v.space.dim(q + 1) > 0) acc = acc + (f.at(p) * v.Q.at(q)).scaled(Q(sign(SignRule::TensorDifferential, p)));
    r.set(p, acc.scaled(Q(sign(SignRule::InternalHom, k))));
  }
  return r;
}

BilinearForm precompose(const BilinearForm& b, const GradedMap& f, const GradedMap& g) {
  const int k = b.degree + f.degree + g.degree;
  BilinearForm r = BilinearForm::zero(f.src, k);
  for (int p : f.src.degrees()) {
    const int q = -k - p;
    if (f.src.dim(p) == 0 || g.src.dim(q) == 0) continue;
    if (b.space.dim(p + f.degree) == 0 || b.space.dim(q + g.degree) == 0) continue;
    r.set(p, (f.at(p).transpose() * b.at(p + f.degree) * g.at(q)).scaled(Q(sign(SignRule::Koszul, g.degree, p))));
  }
  return r;
}

std::string first_difference(const BilinearForm& a, const BilinearForm& b) {
  if (a.degree != b.degree) return "degrees " + std::to_string(a.degree) + " and " + std::to_string(b.degree);
  const BilinearForm d = a - b;
  for (const auto& [p, m] : d.block)
    for (int i = 0; i < m.rows(); ++i)
      if (!m.row(i).empty()) {
        const int j = m.row(i).front().first;
        const SparseMatrix ma = a.at(p), mb = b.at(p);
        return "block " + std::to_string(p) + " entry (" + std::to_string(i) + ", " + std::to_string(j) +
               "): " + ma.get(i, j).get_str() + " vs " + mb.get(i, j).get_str();
      }
  return "";
}

nlohmann::json to_json(const BilinearForm& f) {
  nlohmann::json j;
  j["degree"] = f.degree;
  j["blocks"] = nlohmann::json::object();
  for (const auto& [p, m] : f.block) j["blocks"][std::to_string(p)] = to_json(m);
  return j;
}

// ---- slab images ----

SlabImage slab_image(const std::vector<Field>& columns, int form, const CausalLattice& lat) {
  SlabImage a;
  a.form = form;
  const int n = lat.cell_count(form);
  a.unknown.assign(static_cast<std::size_t>(n), 0);
  std::vector<Triplet> t;
  for (std::size_t j = 0; j < columns.size(); ++j) {
    const Field& f = columns[j];
    if (f.form != form) throw std::invalid_argument("slab image: column of the wrong form");
    a.zero_before = a.zero_before && f.window.lo == kNegInf;
    a.zero_after = a.zero_after && f.window.hi == kPosInf;
    for (int i = 0; i < n; ++i) {
      if (!f.valid(lat, i)) {
        a.unknown[static_cast<std::size_t>(i)] = 1;
        continue;
      }
      const Q& v = f.values[static_cast<std::size_t>(i)];
      if (sgn(v) != 0) t.push_back({i, static_cast<int>(j), v});
    }
  }
  a.values = SparseMatrix::from_triplets(n, static_cast<int>(columns.size()), std::move(t));
  return a;
}

SlabImage compact_image(const FiniteSpace& s, const CausalLattice& lat) {
  SlabImage a;
  a.form = s.form;
  const int n = lat.cell_count(s.form);
  a.unknown.assign(static_cast<std::size_t>(n), 0);
  std::vector<Triplet> t;
  for (int j = 0; j < s.dim(); ++j) t.push_back({s.cells[static_cast<std::size_t>(j)], j, Q(1)});
  a.values = SparseMatrix::from_triplets(n, s.dim(), std::move(t));
  return a;
}

namespace {

// Sections known only on the window of a restriction space.
SlabImage restricted_image(const FiniteSpace& s, const CausalLattice& lat) {
  SlabImage a = compact_image(s, lat);
  for (std::size_t i = 0; i < a.unknown.size(); ++i) a.unknown[i] = s.position.count(static_cast<int>(i)) ? 0 : 1;
  a.zero_before = a.zero_after = false;
  return a;
}

SlabImage sum(const SlabImage& a, const SlabImage& b, const Q& sb = Q(1)) {
  if (a.form != b.form || a.columns() != b.columns()) throw std::invalid_argument("slab images do not match");
  SlabImage r = a;
  r.values = a.values + b.values.scaled(sb);
  for (std::size_t i = 0; i < r.unknown.size(); ++i) r.unknown[i] = a.unknown[i] || b.unknown[i];
  r.zero_before = a.zero_before && b.zero_before;
  r.zero_after = a.zero_after && b.zero_after;
  return r;
}

SlabImage apply_image(const Stencil& s, const SlabImage& a, const CausalLattice& lat) {
  if (s.in_form() != a.form) throw std::invalid_argument("apply_image: form mismatch");
  SlabImage r;
  r.form = s.out_form();
  r.zero_before = a.zero_before;
  r.zero_after = a.zero_after;
  const int n = lat.cell_count(r.form);
  r.unknown.assign(static_cast<std::size_t>(n), 0);
  std::vector<Triplet> t;
  for (int i = 0; i < n; ++i) {
    const Cell c = lat.cell(r.form, i);
    for (const auto& e : s.entries()) {
      if (e.out_type != c.type) continue;
      const Cell in{e.in_type, add(c.base, e.off)};
      const int idx = lat.cell_index(in);
      if (idx < 0) {
        const bool before = in.base[0] < 0;
        if (!(before ? a.zero_before : a.zero_after)) r.unknown[static_cast<std::size_t>(i)] = 1;
        continue;
      }
      if (a.unknown[static_cast<std::size_t>(idx)]) r.unknown[static_cast<std::size_t>(i)] = 1;
      t.push_back({i, idx, e.coeff});
    }
  }
  r.values = SparseMatrix::from_triplets(n, lat.cell_count(a.form), std::move(t)) * a.values;
  return r;
}

enum class Status { Zero, Known, Unknown };

Status status(const SlabImage& a, int idx, const Cell& c) {
  if (idx < 0) return (c.base[0] < 0 ? a.zero_before : a.zero_after) ? Status::Zero : Status::Unknown;
  if (a.unknown[static_cast<std::size_t>(idx)]) return Status::Unknown;
  return a.values.row(idx).empty() ? Status::Zero : Status::Known;
}

std::string cell_text(const Cell& c) {
  return "(type " + std::to_string(c.type) + " @ " + std::to_string(c.base[0]) + "," + std::to_string(c.base[1]) + "," +
         std::to_string(c.base[2]) + ")";
}

}  // namespace

SparseMatrix region_integral(const BilinearStencil& b, const std::vector<Cell>& cells, const SlabImage& a1,
                             const SlabImage& a2, const CausalLattice& lat) {
  if (b.form1() != a1.form || b.form2() != a2.form) throw std::invalid_argument("region integral: form mismatch");
  std::vector<Triplet> t;
  for (const Cell& c : cells)
    for (const auto& e : b.entries()) {
      if (e.out_type != c.type) continue;
      const Cell c1{e.t1, add(c.base, e.o1)}, c2{e.t2, add(c.base, e.o2)};
      const int i1 = lat.cell_index(c1), i2 = lat.cell_index(c2);
      const Status s1 = status(a1, i1, c1), s2 = status(a2, i2, c2);
      if (s1 == Status::Zero || s2 == Status::Zero) continue;
      if (s1 == Status::Unknown || s2 == Status::Unknown)
        throw GeometryTooTight("integrand undetermined at " + cell_text(c) + ": reads " + cell_text(c1) + " and " +
                               cell_text(c2));
      t.push_back({i1, i2, e.coeff});
    }
  const SparseMatrix m =
      SparseMatrix::from_triplets(lat.cell_count(a1.form), lat.cell_count(a2.form), std::move(t));
  return a1.values.transpose() * (m * a2.values);
}

namespace {

std::vector<Cell> top_cells_in(const CausalLattice& lat, int t_lo, int t_hi) {
  std::vector<Cell> out;
  const int top = (1 << lat.m()) - 1;
  for (int t = std::max(t_lo, 0); t <= std::min(t_hi, lat.n_time() - 2); ++t)
    for (int s = 0; s < lat.spatial_volume(); ++s) {
      Point p = lat.spatial_point(s);
      p[0] = t;
      out.push_back({top, p});
    }
  return out;
}

}  // namespace

std::vector<Cell> top_cells(const CausalLattice& lat) { return top_cells_in(lat, 0, lat.n_time() - 2); }

std::vector<Cell> top_cells_after(const CausalLattice& lat, int slice) {
  return top_cells_in(lat, slice, lat.n_time() - 2);
}

std::vector<Cell> top_cells_before(const CausalLattice& lat, int slice) { return top_cells_in(lat, 0, slice - 1); }

std::vector<Cell> slice_cells(const CausalLattice& lat, int slice) {
  check_slice(lat, {slice});
  std::vector<Cell> out;
  const int type = (1 << lat.m()) - 2;
  for (int s = 0; s < lat.spatial_volume(); ++s) {
    Point p = lat.spatial_point(s);
    p[0] = slice;
    out.push_back({type, p});
  }
  return out;
}

Q slice_orientation(int m) {
  const int top = (1 << m) - 1;
  const Stencil d = exterior_derivative(m, m - 1);
  for (const auto& e : d.entries())
    if (e.out_type == top && e.in_type == top - 1 && e.off == Point{1, 0, 0}) return e.coeff;
  throw std::logic_error("exterior derivative has no time face");
}

// ---- homotopy images ----

HomotopyImages witness_images(const Model& model, const QuasiIsoCertificate& c) {
  const CausalLattice& lat = model.lattice();
  HomotopyImages img;
  for (const auto& [n, s] : c.compact) {
    const int p = n - 1;
    img.incl[p] = compact_image(s, lat);
    if (!model.has_degree(n - 1)) continue;
    std::vector<Field> plus, minus;
    for (int cell : s.cells) {
      const Field e = Field::basis(lat, s.form, cell);
      plus.push_back(green_homotopy(model, n, Direction::Retarded, e));
      minus.push_back(green_homotopy(model, n, Direction::Advanced, e));
    }
    img.plus[p] = slab_image(plus, model.form(n - 1), lat);
    img.minus[p] = slab_image(minus, model.form(n - 1), lat);
  }
  return img;
}

HomotopyImages perturbed_images(const Model& model, const QuasiIsoCertificate& c, std::mt19937_64& rng) {
  const CausalLattice& lat = model.lattice();
  HomotopyImages img = witness_images(model, c);
  for (int side = 0; side < 2; ++side) {
    const GradedMap mu = random_map(rng, c.fc1.space, c.fc.space, -1, 4);
    const GradedMap dmu = internal_hom_differential(mu, c.fc1, c.fc);
    if (!dmu.is_zero()) img.perturbed = true;
    auto& target = side == 0 ? img.plus : img.minus;
    for (auto& [p, a] : target) {
      auto it = c.compact.find(p);
      if (it == c.compact.end()) continue;
      SlabImage shift = a;
      shift.values = compact_image(it->second, lat).values * dmu.at(p);
      std::fill(shift.unknown.begin(), shift.unknown.end(), 0);
      shift.zero_before = shift.zero_after = true;
      a = sum(a, shift);
    }
  }
  return img;
}

namespace {

const BilinearStencil* component(const DifferentialPairing& pr, int a, int b) {
  return pr.has(a, b) ? &pr.component(a, b) : nullptr;
}

// Block matrix over (x in degree p of F_c[1], y in degree q) of the integral of (a1 x, a2 y).
SparseMatrix integral_block(const DifferentialPairing& pr, int fa, int fb, const std::vector<Cell>& cells,
                            const std::map<int, SlabImage>& a1, int p, const std::map<int, SlabImage>& a2, int q,
                            const GradedSpace& v, const CausalLattice& lat) {
  SparseMatrix zero(v.dim(p), v.dim(q));
  const BilinearStencil* b = component(pr, fa, fb);
  auto i1 = a1.find(p);
  auto i2 = a2.find(q);
  if (!b || i1 == a1.end() || i2 == a2.end() || v.dim(p) == 0 || v.dim(q) == 0) return zero;
  return region_integral(*b, cells, i1->second, i2->second, lat);
}

std::map<int, SlabImage> difference(const std::map<int, SlabImage>& a, const std::map<int, SlabImage>& b) {
  std::map<int, SlabImage> r;
  for (const auto& [p, x] : a) r[p] = sum(x, b.at(p), Q(-1));
  return r;
}

std::map<int, SlabImage> apply_q(const Model& model, const std::map<int, SlabImage>& a) {
  std::map<int, SlabImage> r;
  for (const auto& [p, x] : a)
    if (model.has_degree(p + 1)) r[p] = apply_image(model.Q(p), x, model.lattice());
  return r;
}

}  // namespace

CovariantPoisson covariant_poisson(const Model& model, const DifferentialPairing& pr, const QuasiIsoCertificate& c,
                                   const HomotopyImages& img) {
  const CausalLattice& lat = model.lattice();
  const GradedSpace& v = c.fc1.space;
  const std::vector<Cell> all = top_cells(lat);
  CovariantPoisson cp;
  cp.ev_plus = BilinearForm::zero(v, 0);
  cp.ev_minus = BilinearForm::zero(v, 0);
  cp.lambda_m_tilde = BilinearForm::zero(v, -1);
  for (int p : v.degrees()) {
    if (v.dim(-p) > 0) {
      cp.ev_plus.set(p, integral_block(pr, p + 1, -p, all, img.incl, p, img.plus, -p, v, lat));
      cp.ev_minus.set(p, integral_block(pr, p + 1, -p, all, img.incl, p, img.minus, -p, v, lat));
    }
    if (v.dim(1 - p) > 0)
      cp.lambda_m_tilde.set(p, integral_block(pr, p, 1 - p, all, img.plus, p, img.minus, 1 - p, v, lat).scaled(Q(-1)));
  }
  cp.tau_tilde = cp.ev_plus - cp.ev_minus;
  cp.tau = asym(cp.tau_tilde);
  cp.tau_plus = cp.ev_plus - cp.ev_plus.braided();
  cp.tau_minus = cp.ev_minus.braided() - cp.ev_minus;
  cp.lambda_m = asym(cp.lambda_m_tilde);
  return cp;
}

BilinearForm sigma(const Model& model, const DifferentialPairing& pr, const QuasiIsoCertificate& c, int slice) {
  const CausalLattice& lat = model.lattice();
  const GradedSpace& v = c.fsc.space;
  std::map<int, SlabImage> img;
  for (const auto& [n, s] : c.sc) img[n] = restricted_image(s, lat);
  const std::vector<Cell> cells = slice_cells(lat, slice);
  const Q sign = slice_orientation(model.spec().m) * pm(model.spec().m - 1);
  BilinearForm f = BilinearForm::zero(v, 0);
  for (int p : v.degrees())
    if (v.dim(-p) > 0) f.set(p, integral_block(pr, p, -p, cells, img, p, img, -p, v, lat).scaled(sign));
  return f;
}

CompatibilityChain compatibility_homotopy(const Model& model, const DifferentialPairing& pr,
                                          const QuasiIsoCertificate& c, const HomotopyImages& img, int slice) {
  const CausalLattice& lat = model.lattice();
  const int m = model.spec().m;
  const GradedSpace& v = c.fc1.space;
  const std::vector<Cell> all = top_cells(lat), after = top_cells_after(lat, slice),
                          before = top_cells_before(lat, slice), sl = slice_cells(lat, slice);
  const std::map<int, SlabImage> lam = difference(img.plus, img.minus);
  const std::map<int, SlabImage> q_plus = apply_q(model, img.plus), q_minus = apply_q(model, img.minus),
                                 q_lam = apply_q(model, lam);
  const Stencil d_top = exterior_derivative(m, m - 1);
  DifferentialPairing dpr(m);
  for (const auto& [ab, b] : pr.components())
    if (b.out_form() == m - 1) dpr.set(ab.first, ab.second, compose_out(d_top, b).scaled(pm(m - 1)));

  CompatibilityChain ch;
  ch.lambda_tilde = BilinearForm::zero(v, -1);
  for (int p : v.degrees())
    if (v.dim(1 - p) > 0)
      ch.lambda_tilde.set(p, integral_block(pr, p, 1 - p, after, img.minus, p, lam, 1 - p, v, lat) +
                                 integral_block(pr, p, 1 - p, before, img.plus, p, lam, 1 - p, v, lat));
  ch.lambda = asym(ch.lambda_tilde);
  ch.line1 = differential(ch.lambda_tilde, c.fc1);

  ch.line2 = ch.line3 = ch.line4 = BilinearForm::zero(v, 0);
  BilinearForm tau_tilde = BilinearForm::zero(v, 0);
  for (int p : v.degrees()) {
    const int q = -p;
    if (v.dim(q) == 0) continue;
    const SparseMatrix ev = integral_block(pr, p + 1, q, all, img.incl, p, lam, q, v, lat);
    tau_tilde.set(p, ev);
    SparseMatrix l2 = integral_block(pr, p + 1, q, after, q_minus, p, lam, q, v, lat) -
                      integral_block(pr, p + 1, q, after, img.incl, p, lam, q, v, lat) +
                      integral_block(pr, p, q + 1, after, img.minus, p, q_lam, q, v, lat).scaled(pm(p)) +
                      integral_block(pr, p + 1, q, before, q_plus, p, lam, q, v, lat) -
                      integral_block(pr, p + 1, q, before, img.incl, p, lam, q, v, lat) +
                      integral_block(pr, p, q + 1, before, img.plus, p, q_lam, q, v, lat).scaled(pm(p));
    ch.line2.set(p, l2);
    ch.line3.set(p, integral_block(dpr, p, q, after, img.minus, p, lam, q, v, lat) +
                        integral_block(dpr, p, q, before, img.plus, p, lam, q, v, lat) - ev);
    ch.line4.set(p, integral_block(pr, p, q, sl, lam, p, lam, q, v, lat).scaled(slice_orientation(m) * pm(m - 1)) -
                        ev);
  }
  ch.line5 = precompose(sigma(model, pr, c, slice), c.lambda, c.lambda) - tau_tilde;
  return ch;
}

BilinearForm cauchy_homotopy(const BilinearForm& sigma_a, const BilinearForm& sigma_b, const BilinearForm& lambda_a,
                             const BilinearForm& lambda_b, const QuasiIsoCertificate& c) {
  const BilinearForm d = sigma_a - sigma_b;
  const GradedMap id = GradedMap::identity(c.fsc.space);
  const GradedMap lt = compose(c.lambda, c.theta);
  const BilinearForm h = precompose(lambda_a - lambda_b, c.theta, c.theta) + precompose(d, c.upsilon, id) +
                         precompose(d, lt, c.upsilon);
  return asym(h);
}

// ---- suite ----

bool PoissonReport::ok() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return !checks.empty();
}

namespace {

void expect_equal(PoissonReport& r, const std::string& name, const BilinearForm& a, const BilinearForm& b) {
  Check c{name, a == b, "", 0};
  if (!c.pass) c.witness = first_difference(a, b);
  c.wall_time = r.clock.lap();
  r.checks.push_back(std::move(c));
}

void expect(PoissonReport& r, const std::string& name, bool ok, const std::string& witness) {
  r.checks.push_back({name, ok, ok ? "" : witness, r.clock.lap()});
}

void covariant_checks(PoissonReport& r, const std::string& tag, const CovariantPoisson& cp, const LadderComplex& v,
                      bool self_adjoint) {
  expect(r, tag + "tau antisymmetric", cp.tau.antisymmetric(), first_difference(cp.tau.braided(), cp.tau.scaled(Q(-1))));
  expect(r, tag + "tau+ antisymmetric", cp.tau_plus.antisymmetric(),
         first_difference(cp.tau_plus.braided(), cp.tau_plus.scaled(Q(-1))));
  expect(r, tag + "tau- antisymmetric", cp.tau_minus.antisymmetric(),
         first_difference(cp.tau_minus.braided(), cp.tau_minus.scaled(Q(-1))));
  for (const auto& [name, f] : {std::pair<std::string, const BilinearForm*>{"tau", &cp.tau},
                                {"tau+", &cp.tau_plus},
                                {"tau-", &cp.tau_minus}}) {
    const BilinearForm d = differential(*f, v);
    expect(r, tag + name + " cochain map", d.is_zero(), first_difference(d, BilinearForm::zero(v.space, 1)));
  }
  if (self_adjoint) {
    expect(r, tag + "tau~ antisymmetric", cp.tau_tilde.antisymmetric(),
           first_difference(cp.tau_tilde.braided(), cp.tau_tilde.scaled(Q(-1))));
    expect_equal(r, tag + "tau+ = tau", cp.tau_plus, cp.tau);
    expect_equal(r, tag + "tau- = tau", cp.tau_minus, cp.tau);
  }
  expect_equal(r, tag + "d lambda_M~ = tau+ - tau~", differential(cp.lambda_m_tilde, v), cp.tau_plus - cp.tau_tilde);
  expect_equal(r, tag + "d lambda_M = tau+ - tau", differential(cp.lambda_m, v), cp.tau_plus - cp.tau);
  expect_equal(r, tag + "d lambda_M = tau - tau-", differential(cp.lambda_m, v), cp.tau - cp.tau_minus);
}

}  // namespace

PoissonReport run_poisson_suite(const Model& model, const PoissonOptions& opt, std::mt19937_64& rng) {
  PoissonReport r;
  const DifferentialPairing pr = build_pairing(model);
  const PairingReport pv = validate_pairing(model, pr, rng(), 10);
  expect(r, "pairing validated", pv.ok(), pv.failures.empty() ? "" : pv.failures.front());
  const SelfAdjointReport sa = validate_self_adjoint_witness(model, pr);

  const QuasiIsoCertificate c = build_certificate(model, opt.minus, opt.plus, rng, false);
  const HomotopyImages img = witness_images(model, c);
  const CovariantPoisson cp = covariant_poisson(model, pr, c, img);
  covariant_checks(r, "", cp, c.fc1, sa.ok());

  const HomotopyImages pimg = opt.perturbed ? perturbed_images(model, c, rng) : HomotopyImages{};
  if (pimg.perturbed) {
    const CovariantPoisson pp = covariant_poisson(model, pr, c, pimg);
    covariant_checks(r, "perturbed: ", pp, c.fc1, false);
    const BilinearForm gap = pp.tau_plus - pp.tau;
    expect(r, "perturbed: tau+ - tau nonzero", !gap.is_zero(), "perturbation left tau+ = tau");
  }

  BilinearForm sig[2], lam[2];
  const int slices[2] = {opt.slice, opt.other_slice};
  for (int i = 0; i < 2; ++i) {
    const std::string tag = "slice " + std::to_string(slices[i]) + ": ";
    sig[i] = sigma(model, pr, c, slices[i]);
    expect(r, tag + "sigma antisymmetric", sig[i].antisymmetric(),
           first_difference(sig[i].braided(), sig[i].scaled(Q(-1))));
    const BilinearForm ds = differential(sig[i], c.fsc);
    expect(r, tag + "sigma cochain map", ds.is_zero(), first_difference(ds, BilinearForm::zero(c.fsc.space, 1)));
    const CompatibilityChain ch = compatibility_homotopy(model, pr, c, img, slices[i]);
    expect_equal(r, tag + "compatibility chain step 1", ch.line1, ch.line2);
    expect_equal(r, tag + "compatibility chain step 2", ch.line2, ch.line3);
    expect_equal(r, tag + "compatibility chain step 3", ch.line3, ch.line4);
    expect_equal(r, tag + "compatibility chain step 4", ch.line4, ch.line5);
    const BilinearForm target = precompose(sig[i], c.lambda, c.lambda) - cp.tau;
    expect_equal(r, tag + "d lambda = sigma o Lambda^2 - tau", differential(ch.lambda, c.fc1), target);
    lam[i] = ch.lambda;
  }
  const BilinearForm l = cauchy_homotopy(sig[0], sig[1], lam[0], lam[1], c);
  expect_equal(r, "d lambda_SS' = sigma_S - sigma_S'", differential(l, c.fsc), sig[0] - sig[1]);
  return r;
}

}  // namespace ghc
