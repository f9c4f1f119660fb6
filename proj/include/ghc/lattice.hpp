#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "ghc/rational.hpp"

namespace ghc {

// Point of Z x Z^{m-1}; index 0 is time, unused spatial slots stay 0.
using Point = std::array<int, 3>;

inline constexpr int kMaxDim = 3;

// A cell is a direction subset (bit a = axis a, bit 0 = time) at a base point.
struct Cell {
  int type = 0;
  Point base{0, 0, 0};
  bool operator==(const Cell& o) const { return type == o.type && base == o.base; }
};

inline int popcount(int mask) { return __builtin_popcount(static_cast<unsigned>(mask)); }
inline bool has_time(int type) { return (type & 1) != 0; }

struct Span {
  int lo;
  int hi;
};

inline Span span_of(const Cell& c) { return {c.base[0], c.base[0] + (has_time(c.type) ? 1 : 0)}; }

// Position of `axis` among the axes of `type`, counted from the lowest.
inline int axis_position(int type, int axis) { return popcount(type & ((1 << axis) - 1)); }

class CausalLattice {
 public:
  CausalLattice(int m, int n_time, std::vector<int> spatial_extents, int margin);

  int m() const { return m_; }
  int n_time() const { return n_time_; }
  int margin() const { return margin_; }
  const std::vector<int>& extents() const { return extents_; }
  int spatial_volume() const { return volume_; }
  int site_count() const { return n_time_ * volume_; }

  // Throws unless margin >= radius.
  void register_radius(int radius) const;

  int wrap(int axis, int x) const;
  int spatial_index(const Point& p) const;
  Point spatial_point(int idx) const;  // time slot set to 0
  int site_index(const Point& p) const;
  Point site(int idx) const;
  // Periodic taxicab distance of the spatial parts.
  int spatial_distance(const Point& a, const Point& b) const;

  // Cell bookkeeping per form degree k.
  const std::vector<int>& types(int k) const { return types_[static_cast<std::size_t>(k)]; }
  int type_slot(int type) const { return type_slot_[static_cast<std::size_t>(type)]; }
  int type_levels(int type) const { return n_time_ - (has_time(type) ? 1 : 0); }
  int cell_count(int k) const { return cell_count_[static_cast<std::size_t>(k)]; }
  int cell_index(const Cell& c) const;  // -1 outside the slab; spatially wrapped
  Cell cell(int k, int idx) const;
  std::vector<Point> vertices(const Cell& c) const;

 private:
  int m_;
  int n_time_;
  std::vector<int> extents_;
  int margin_;
  int volume_;
  std::vector<std::vector<int>> types_;
  std::vector<int> type_slot_;
  std::vector<std::vector<int>> type_offset_;  // per form degree, per slot
  std::vector<int> cell_count_;
};

// Set of lattice sites.
class Region {
 public:
  Region() = default;
  explicit Region(const CausalLattice& lat) : sites_(static_cast<std::size_t>(lat.site_count()), 0) {}

  bool contains(int site) const { return sites_[static_cast<std::size_t>(site)] != 0; }
  void insert(int site) { sites_[static_cast<std::size_t>(site)] = 1; }
  void erase(int site) { sites_[static_cast<std::size_t>(site)] = 0; }
  std::size_t size() const;
  bool empty() const { return size() == 0; }
  bool subset_of(const Region& o) const;
  Region operator|(const Region& o) const;
  Region operator&(const Region& o) const;
  bool operator==(const Region& o) const { return sites_ == o.sites_; }
  const std::vector<char>& mask() const { return sites_; }
  std::vector<int> sorted_sites() const;

  // A cell belongs to the region when all its vertices do.
  bool contains_cell(const CausalLattice& lat, const Cell& c) const;
  std::vector<int> cells(const CausalLattice& lat, int form_degree) const;

 private:
  std::vector<char> sites_;
};

Region region_from_points(const CausalLattice& lat, const std::vector<Point>& pts);
Region time_band(const CausalLattice& lat, int t_lo, int t_hi);

Region causal_future(const CausalLattice& lat, const Region& k);
Region causal_past(const CausalLattice& lat, const Region& k);

struct CauchySlice {
  int time_index;
};

void check_slice(const CausalLattice& lat, const CauchySlice& s);

Region sigma_map(const CausalLattice& lat, const Region& k, CauchySlice minus, CauchySlice plus);

struct PartitionOfUnity {
  int t_minus;
  int t_plus;
  std::vector<Q> chi_plus;   // per time level
  std::vector<Q> chi_minus;  // per time level

  const Q& plus_at(int t) const;
  const Q& minus_at(int t) const;
  // Cells are weighted at their base vertex.
  const Q& plus_cell(const Cell& c) const { return plus_at(c.base[0]); }
  const Q& minus_cell(const Cell& c) const { return minus_at(c.base[0]); }
};

PartitionOfUnity partition_of_unity(const CausalLattice& lat, CauchySlice minus, CauchySlice plus);

}  // namespace ghc
