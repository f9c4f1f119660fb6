#pragma once

#include <climits>
#include <stdexcept>
#include <optional>
#include <string>
#include <vector>

#include "ghc/lattice.hpp"
#include "ghc/sparse.hpp"

namespace ghc {

// (S phi)(out_type, p) += coeff * phi(in_type, p + off)
struct StencilEntry {
  int out_type;
  int in_type;
  Point off;
  Q coeff;
};

// Span bounds of the inputs of a row relative to the row itself.
struct Reach {
  int back;   // min over entries of span(in).lo - span(out).lo
  int front;  // max over entries of span(in).hi - span(out).hi
};

// Translation-invariant linear map from k-cochains to l-cochains on Z x Z^{m-1}.
class Stencil {
 public:
  Stencil() = default;
  Stencil(int m, int in_form, int out_form) : m_(m), in_form_(in_form), out_form_(out_form) {}

  static Stencil identity(int m, int form);

  int m() const { return m_; }
  int in_form() const { return in_form_; }
  int out_form() const { return out_form_; }
  const std::vector<StencilEntry>& entries() const { return entries_; }

  void add(int out_type, int in_type, Point off, const Q& coeff);
  void add_all(std::vector<StencilEntry> entries);
  bool is_zero() const { return entries_.empty(); }

  Stencil operator+(const Stencil& o) const;
  Stencil operator-(const Stencil& o) const;
  Stencil scaled(const Q& s) const;
  bool operator==(const Stencil& o) const;
  bool operator!=(const Stencil& o) const { return !(*this == o); }

  // Adjoint for the plain cell inner product.
  Stencil transpose() const;

  // Largest absolute offset component over all entries.
  int radius() const;
  Reach reach() const;
  // Extremes of the time offsets over all entries.
  int min_time_offset() const;
  int max_time_offset() const;

  // Full slab matrix (rows: out_form cells, cols: in_form cells), zero extension outside.
  SparseMatrix materialize(const CausalLattice& lat) const;
  SparseMatrix materialize(const CausalLattice& lat, const std::vector<int>& rows,
                           const std::vector<int>& cols) const;

  std::string describe() const;

 private:
  void normalize();
  int m_ = 2;
  int in_form_ = 0;
  int out_form_ = 0;
  std::vector<StencilEntry> entries_;  // sorted, merged, nonzero
};

// a o b
Stencil compose(const Stencil& a, const Stencil& b);

// Cubical coboundary k -> k+1.
Stencil exterior_derivative(int m, int k);
// Hodge weight of a cell type: -1 if it contains the time axis.
int hodge_sign(int type);
// S^{-1} d^T S from k-cochains to (k-1)-cochains.
Stencil codifferential(int m, int k);

inline constexpr int kNegInf = INT_MIN / 4;
inline constexpr int kPosInf = INT_MAX / 4;

// Cell c is valid iff lo <= span(c).lo and span(c).hi <= hi. An infinite side means
// the field is known to vanish beyond the slab on that side.
struct Window {
  int lo = kNegInf;
  int hi = kPosInf;
  bool contains(const Span& s) const { return lo <= s.lo && s.hi <= hi; }
  bool compact() const { return lo == kNegInf && hi == kPosInf; }
  Window meet(const Window& o) const;
  std::string describe() const;
};

struct Field {
  int form = 0;
  Vec values;
  Window window;

  static Field zero(const CausalLattice& lat, int form, Window w = {});
  static Field basis(const CausalLattice& lat, int form, int cell);

  bool valid(const CausalLattice& lat, int cell) const;
  // Minimum span.lo / maximum span.hi over nonzero cells; nullopt if zero.
  std::optional<Span> support_span(const CausalLattice& lat) const;
  std::vector<int> support(const CausalLattice& lat) const;
  Region support_sites(const CausalLattice& lat) const;
  bool is_zero() const;

  Field operator+(const Field& o) const;
  Field operator-(const Field& o) const;
  Field scaled(const Q& s) const;
};

// Thrown when a requested value lies outside a validity window.
struct GeometryTooTight : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Field apply(const Stencil& s, const Field& f, const CausalLattice& lat);

Field multiply_chi(const Field& f, const PartitionOfUnity& pu, bool plus, const CausalLattice& lat);

// out(c) = sum_c' S(c,c') (chi(c') - chi(c)) f(c'), the commutator [S, chi+].
Field chi_commutator(const Stencil& s, const Field& f, const PartitionOfUnity& pu, const CausalLattice& lat);

// Values of f on the given cells; throws GeometryTooTight if any is invalid.
Vec restrict_to(const Field& f, const std::vector<int>& cells, const CausalLattice& lat);

// First cell in `w` where a and b differ, if any; throws if w exceeds either window.
std::optional<int> first_difference(const Field& a, const Field& b, const Window& w, const CausalLattice& lat);

}  // namespace ghc
