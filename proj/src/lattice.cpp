#include "ghc/lattice.hpp"

#include <algorithm>
#include <stdexcept>

namespace ghc {

CausalLattice::CausalLattice(int m, int n_time, std::vector<int> spatial_extents, int margin)
    : m_(m), n_time_(n_time), extents_(std::move(spatial_extents)), margin_(margin) {
  if (m_ < 2 || m_ > 3) throw std::invalid_argument("spacetime dimension must be 2 or 3");
  if (n_time_ < 8) throw std::invalid_argument("n_time must be at least 8");
  if (static_cast<int>(extents_.size()) != m_ - 1)
    throw std::invalid_argument("need m-1 spatial extents");
  for (int e : extents_)
    if (e < 4) throw std::invalid_argument("spatial extents must be at least 4");
  if (margin_ < 2) throw std::invalid_argument("margin must be at least 2");
  if (2 * margin_ >= n_time_) throw std::invalid_argument("margin leaves no interior");
  volume_ = 1;
  for (int e : extents_) volume_ *= e;

  types_.assign(static_cast<std::size_t>(m_ + 1), {});
  type_slot_.assign(static_cast<std::size_t>(1 << m_), 0);
  for (int t = 0; t < (1 << m_); ++t) {
    auto& v = types_[static_cast<std::size_t>(popcount(t))];
    type_slot_[static_cast<std::size_t>(t)] = static_cast<int>(v.size());
    v.push_back(t);
  }
  type_offset_.resize(static_cast<std::size_t>(m_ + 1));
  cell_count_.assign(static_cast<std::size_t>(m_ + 1), 0);
  for (int k = 0; k <= m_; ++k) {
    int off = 0;
    for (int t : types_[static_cast<std::size_t>(k)]) {
      type_offset_[static_cast<std::size_t>(k)].push_back(off);
      off += type_levels(t) * volume_;
    }
    cell_count_[static_cast<std::size_t>(k)] = off;
  }
}

void CausalLattice::register_radius(int radius) const {
  if (radius > margin_)
    throw std::invalid_argument("operator radius " + std::to_string(radius) + " exceeds lattice margin " +
                                std::to_string(margin_));
}

int CausalLattice::wrap(int axis, int x) const {
  const int e = extents_[static_cast<std::size_t>(axis - 1)];
  return ((x % e) + e) % e;
}

int CausalLattice::spatial_index(const Point& p) const {
  int idx = 0;
  for (int a = 1; a < m_; ++a) idx = idx * extents_[static_cast<std::size_t>(a - 1)] + wrap(a, p[static_cast<std::size_t>(a)]);
  return idx;
}

Point CausalLattice::spatial_point(int idx) const {
  Point p{0, 0, 0};
  for (int a = m_ - 1; a >= 1; --a) {
    const int e = extents_[static_cast<std::size_t>(a - 1)];
    p[static_cast<std::size_t>(a)] = idx % e;
    idx /= e;
  }
  return p;
}

int CausalLattice::site_index(const Point& p) const { return p[0] * volume_ + spatial_index(p); }

Point CausalLattice::site(int idx) const {
  Point p = spatial_point(idx % volume_);
  p[0] = idx / volume_;
  return p;
}

int CausalLattice::spatial_distance(const Point& a, const Point& b) const {
  int d = 0;
  for (int ax = 1; ax < m_; ++ax) {
    const int e = extents_[static_cast<std::size_t>(ax - 1)];
    const int diff = wrap(ax, a[static_cast<std::size_t>(ax)] - b[static_cast<std::size_t>(ax)]);
    d += std::min(diff, e - diff);
  }
  return d;
}

int CausalLattice::cell_index(const Cell& c) const {
  const int t = c.base[0];
  if (t < 0 || t >= type_levels(c.type)) return -1;
  const int k = popcount(c.type);
  return type_offset_[static_cast<std::size_t>(k)][static_cast<std::size_t>(type_slot(c.type))] +
         t * volume_ + spatial_index(c.base);
}

Cell CausalLattice::cell(int k, int idx) const {
  const auto& offs = type_offset_[static_cast<std::size_t>(k)];
  const auto it = std::upper_bound(offs.begin(), offs.end(), idx);
  const int slot = static_cast<int>(it - offs.begin()) - 1;
  const int type = types_[static_cast<std::size_t>(k)][static_cast<std::size_t>(slot)];
  const int local = idx - offs[static_cast<std::size_t>(slot)];
  Cell c;
  c.type = type;
  c.base = spatial_point(local % volume_);
  c.base[0] = local / volume_;
  return c;
}

std::vector<Point> CausalLattice::vertices(const Cell& c) const {
  std::vector<Point> out;
  for (int sub = c.type;; sub = (sub - 1) & c.type) {
    Point p = c.base;
    for (int a = 0; a < m_; ++a)
      if (sub & (1 << a)) p[static_cast<std::size_t>(a)] += 1;
    for (int a = 1; a < m_; ++a) p[static_cast<std::size_t>(a)] = wrap(a, p[static_cast<std::size_t>(a)]);
    out.push_back(p);
    if (sub == 0) break;
  }
  return out;
}

std::size_t Region::size() const {
  return static_cast<std::size_t>(std::count(sites_.begin(), sites_.end(), 1));
}

bool Region::subset_of(const Region& o) const {
  for (std::size_t i = 0; i < sites_.size(); ++i)
    if (sites_[i] && !o.sites_[i]) return false;
  return true;
}

Region Region::operator|(const Region& o) const {
  Region r = *this;
  for (std::size_t i = 0; i < sites_.size(); ++i) r.sites_[i] = static_cast<char>(sites_[i] | o.sites_[i]);
  return r;
}

Region Region::operator&(const Region& o) const {
  Region r = *this;
  for (std::size_t i = 0; i < sites_.size(); ++i) r.sites_[i] = static_cast<char>(sites_[i] & o.sites_[i]);
  return r;
}

std::vector<int> Region::sorted_sites() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < sites_.size(); ++i)
    if (sites_[i]) out.push_back(static_cast<int>(i));
  return out;
}

bool Region::contains_cell(const CausalLattice& lat, const Cell& c) const {
  for (const Point& v : lat.vertices(c)) {
    if (v[0] < 0 || v[0] >= lat.n_time()) return false;
    if (!contains(lat.site_index(v))) return false;
  }
  return true;
}

std::vector<int> Region::cells(const CausalLattice& lat, int form_degree) const {
  std::vector<int> out;
  for (int i = 0; i < lat.cell_count(form_degree); ++i)
    if (contains_cell(lat, lat.cell(form_degree, i))) out.push_back(i);
  return out;
}

Region region_from_points(const CausalLattice& lat, const std::vector<Point>& pts) {
  Region r(lat);
  for (const Point& p : pts) {
    if (p[0] < 0 || p[0] >= lat.n_time()) throw std::out_of_range("point outside the slab");
    r.insert(lat.site_index(p));
  }
  return r;
}

Region time_band(const CausalLattice& lat, int t_lo, int t_hi) {
  Region r(lat);
  for (int t = std::max(0, t_lo); t <= std::min(t_hi, lat.n_time() - 1); ++t)
    for (int s = 0; s < lat.spatial_volume(); ++s) r.insert(t * lat.spatial_volume() + s);
  return r;
}

namespace {

// One unit step of the taxicab cone: the site itself plus its spatial neighbours.
std::vector<int> neighbour_offsets(const CausalLattice& lat, int s) {
  std::vector<int> out{s};
  Point p = lat.spatial_point(s);
  for (int a = 1; a < lat.m(); ++a)
    for (int d : {-1, 1}) {
      Point q = p;
      q[static_cast<std::size_t>(a)] += d;
      out.push_back(lat.spatial_index(q));
    }
  return out;
}

Region sweep(const CausalLattice& lat, const Region& k, int dir) {
  Region r = k;
  const int V = lat.spatial_volume();
  const int n = lat.n_time();
  std::vector<std::vector<int>> nb(static_cast<std::size_t>(V));
  for (int s = 0; s < V; ++s) nb[static_cast<std::size_t>(s)] = neighbour_offsets(lat, s);
  const int start = dir > 0 ? 1 : n - 2;
  for (int t = start; t >= 0 && t < n; t += dir) {
    const int prev = t - dir;
    for (int s = 0; s < V; ++s) {
      if (r.contains(t * V + s)) continue;
      for (int q : nb[static_cast<std::size_t>(s)])
        if (r.contains(prev * V + q)) {
          r.insert(t * V + s);
          break;
        }
    }
  }
  return r;
}

}  // namespace

Region causal_future(const CausalLattice& lat, const Region& k) { return sweep(lat, k, +1); }
Region causal_past(const CausalLattice& lat, const Region& k) { return sweep(lat, k, -1); }

void check_slice(const CausalLattice& lat, const CauchySlice& s) {
  if (s.time_index < lat.margin() || s.time_index > lat.n_time() - 1 - lat.margin())
    throw std::invalid_argument("Cauchy slice " + std::to_string(s.time_index) + " outside the interior");
}

Region sigma_map(const CausalLattice& lat, const Region& k, CauchySlice minus, CauchySlice plus) {
  if (plus.time_index <= minus.time_index) throw std::invalid_argument("slice ordering violated");
  const Region sm = time_band(lat, minus.time_index, minus.time_index);
  const Region sp = time_band(lat, plus.time_index, plus.time_index);
  return (causal_future(lat, sm) & causal_past(lat, k)) | (causal_past(lat, sp) & causal_future(lat, k));
}

const Q& PartitionOfUnity::plus_at(int t) const {
  if (t < 0) return chi_plus.front();
  if (t >= static_cast<int>(chi_plus.size())) return chi_plus.back();
  return chi_plus[static_cast<std::size_t>(t)];
}

const Q& PartitionOfUnity::minus_at(int t) const {
  if (t < 0) return chi_minus.front();
  if (t >= static_cast<int>(chi_minus.size())) return chi_minus.back();
  return chi_minus[static_cast<std::size_t>(t)];
}

PartitionOfUnity partition_of_unity(const CausalLattice& lat, CauchySlice minus, CauchySlice plus) {
  if (plus.time_index < minus.time_index + 2) throw std::invalid_argument("slices too close");
  PartitionOfUnity pu;
  pu.t_minus = minus.time_index;
  pu.t_plus = plus.time_index;
  const int span = plus.time_index - minus.time_index;
  for (int t = 0; t < lat.n_time(); ++t) {
    Q v;
    if (t <= minus.time_index)
      v = 0;
    else if (t >= plus.time_index)
      v = 1;
    else
      v = make_q(t - minus.time_index, span);
    pu.chi_plus.push_back(v);
    pu.chi_minus.push_back(1 - v);
  }
  return pu;
}

}  // namespace ghc
