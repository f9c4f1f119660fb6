#include "ghc/models.hpp"

#include <stdexcept>

namespace ghc {

std::string kind_name(ModelKind k) {
  switch (k) {
    case ModelKind::KleinGordon: return "klein_gordon";
    case ModelKind::DeRham: return "de_rham";
    case ModelKind::ChernSimons: return "chern_simons";
    case ModelKind::MaxwellP: return "maxwell_p";
  }
  return "";
}

ModelKind parse_kind(const std::string& s) {
  for (ModelKind k : {ModelKind::KleinGordon, ModelKind::DeRham, ModelKind::ChernSimons, ModelKind::MaxwellP})
    if (kind_name(k) == s) return k;
  throw std::invalid_argument("unknown model kind '" + s + "'");
}

std::string describe(const ModelSpec& s) {
  std::string out = kind_name(s.kind) + "(m=" + std::to_string(s.m);
  if (s.kind == ModelKind::KleinGordon) out += ", mass=" + s.mass.get_str();
  if (s.kind == ModelKind::MaxwellP) out += ", p=" + std::to_string(s.p);
  if (sgn(s.perturbation) != 0) out += ", eps=" + s.perturbation.get_str();
  return out + ")";
}

namespace {

Stencil box_stencil(int m, int k) {
  Stencil b(m, k, k);
  if (k > 0) b = b + compose(exterior_derivative(m, k - 1), codifferential(m, k));
  if (k < m) b = b + compose(codifferential(m, k + 1), exterior_derivative(m, k));
  return b;
}

// (Z phi)(v) = phi(time edge at v)
Stencil time_edge_pullback(int m) {
  Stencil z(m, 1, 0);
  z.add(0, 1, {0, 0, 0}, Q(1));
  return z;
}

}  // namespace

Model::Model(ModelSpec spec, std::shared_ptr<const CausalLattice> lat) : spec_(std::move(spec)), lat_(std::move(lat)) {
  const int m = spec_.m;
  if (m != lat_->m()) throw std::invalid_argument("model dimension does not match the lattice");
  if (sgn(spec_.perturbation) != 0 && !(spec_.kind == ModelKind::DeRham && m == 2))
    throw std::invalid_argument("witness perturbation is only defined for de Rham with m = 2");
  switch (spec_.kind) {
    case ModelKind::KleinGordon: {
      if (sgn(spec_.mass) < 0) throw std::invalid_argument("mass must be non-negative");
      lo_ = 0;
      hi_ = 1;
      form_ = {{0, 0}, {1, 0}};
      q_[0] = box_stencil(m, 0) - Stencil::identity(m, 0).scaled(spec_.mass * spec_.mass);
      w_[1] = Stencil::identity(m, 0);
      break;
    }
    case ModelKind::DeRham: {
      lo_ = 0;
      hi_ = m;
      for (int n = 0; n <= m; ++n) form_[n] = n;
      for (int n = 0; n < m; ++n) q_[n] = exterior_derivative(m, n);
      for (int n = 1; n <= m; ++n) w_[n] = codifferential(m, n);
      if (sgn(spec_.perturbation) != 0) w_[1] = w_[1] + time_edge_pullback(m).scaled(spec_.perturbation);
      break;
    }
    case ModelKind::ChernSimons: {
      if (m != 3) throw std::invalid_argument("Chern-Simons needs m = 3");
      lo_ = -1;
      hi_ = m - 1;
      for (int n = lo_; n <= hi_; ++n) form_[n] = n + 1;
      for (int n = lo_; n < hi_; ++n) q_[n] = exterior_derivative(m, n + 1);
      for (int n = lo_ + 1; n <= hi_; ++n) w_[n] = codifferential(m, n + 1);
      break;
    }
    case ModelKind::MaxwellP: {
      if (spec_.p != 1 || m != 2) throw std::invalid_argument("Maxwell is provided for p = 1, m = 2");
      lo_ = -1;
      hi_ = 2;
      form_ = {{-1, 0}, {0, 1}, {1, 1}, {2, 0}};
      q_[-1] = exterior_derivative(m, 0);
      q_factors_[0] = {codifferential(m, 2), exterior_derivative(m, 1)};
      q_[0] = compose(q_factors_[0][0], q_factors_[0][1]);
      q_[1] = codifferential(m, 1);
      w_[0] = codifferential(m, 1);
      w_[1] = Stencil::identity(m, 1);
      w_[2] = exterior_derivative(m, 0);
      break;
    }
  }
  for (const auto& [n, s] : q_) lat_->register_radius(s.radius());
  for (const auto& [n, s] : w_) lat_->register_radius(s.radius());
}

Stencil Model::Q(int n) const {
  auto it = q_.find(n);
  if (it != q_.end()) return it->second;
  const int in = has_degree(n) ? form(n) : 0;
  const int out = has_degree(n + 1) ? form(n + 1) : 0;
  return Stencil(spec_.m, in, out);
}

Stencil Model::W(int n) const {
  auto it = w_.find(n);
  if (it != w_.end()) return it->second;
  const int in = has_degree(n) ? form(n) : 0;
  const int out = has_degree(n - 1) ? form(n - 1) : 0;
  return Stencil(spec_.m, in, out);
}

void Model::set_W(int n, Stencil w) {
  if (!has_degree(n) || !has_degree(n - 1) || w.in_form() != form(n) || w.out_form() != form(n - 1))
    throw std::invalid_argument("witness component has the wrong shape");
  w_[n] = std::move(w);
  green_.clear();
}

Stencil Model::P(int n) const {
  Stencil p(spec_.m, form(n), form(n));
  if (has_degree(n - 1)) p = p + compose(Q(n - 1), W(n));
  if (has_degree(n + 1)) p = p + compose(W(n + 1), Q(n));
  return p;
}

const GreenSolver& Model::green(int n, Direction dir) const {
  const auto key = std::make_pair(n, dir == Direction::Retarded ? 0 : 1);
  auto it = green_.find(key);
  if (it == green_.end()) it = green_.emplace(key, std::make_unique<GreenSolver>(P(n), *lat_, dir)).first;
  return *it->second;
}

LadderComplex Model::slab_complex() const {
  GradedSpace s;
  for (int n = lo_; n <= hi_; ++n) s.dims[n] = lat_->cell_count(form(n));
  std::map<int, SparseMatrix> q;
  for (int n = lo_; n < hi_; ++n) {
    auto it = q_factors_.find(n);
    if (it == q_factors_.end()) {
      q[n] = Q(n).materialize(*lat_);
      continue;
    }
    SparseMatrix acc = it->second.back().materialize(*lat_);
    for (auto f = std::next(it->second.rbegin()); f != it->second.rend(); ++f) acc = f->materialize(*lat_) * acc;
    q[n] = std::move(acc);
  }
  return make_complex(s, std::move(q));
}

Model build_model(const ModelSpec& spec, std::shared_ptr<const CausalLattice> lat) {
  return Model(spec, std::move(lat));
}

WitnessReport validate_witness(const Model& model) {
  WitnessReport r;
  r.q_squared_zero = true;
  for (int n = model.deg_lo(); n + 1 < model.deg_hi(); ++n)
    if (!compose(model.Q(n + 1), model.Q(n)).is_zero()) {
      r.q_squared_zero = false;
      r.failures.push_back("degree " + std::to_string(n) + ": Q o Q != 0");
    }
  r.certified = true;
  for (int n = model.deg_lo(); n <= model.deg_hi(); ++n)
    for (Direction dir : {Direction::Retarded, Direction::Advanced}) {
      const auto cert = certify_causal(model.P(n), dir);
      if (!cert.ok) {
        r.certified = false;
        for (const auto& f : cert.failures)
          r.failures.push_back("degree " + std::to_string(n) + ", cell type " + std::to_string(f.type) + ": " + f.reason);
      }
    }
  return r;
}

}  // namespace ghc
