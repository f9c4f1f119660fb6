#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ghc/models.hpp"

namespace ghc {

// (B(phi1, phi2))(out_type, p) += coeff * phi1(t1, p + o1) * phi2(t2, p + o2)
struct BilinearEntry {
  int out_type;
  int t1;
  Point o1;
  int t2;
  Point o2;
  Q coeff;
};

// Translation-invariant bilinear map (form1-cochains) x (form2-cochains) -> out_form-cochains.
class BilinearStencil {
 public:
  BilinearStencil() = default;
  BilinearStencil(int m, int form1, int form2, int out_form) : m_(m), f1_(form1), f2_(form2), out_(out_form) {}

  int m() const { return m_; }
  int form1() const { return f1_; }
  int form2() const { return f2_; }
  int out_form() const { return out_; }
  const std::vector<BilinearEntry>& entries() const { return entries_; }
  bool is_zero() const { return entries_.empty(); }

  void add(int out_type, int t1, Point o1, int t2, Point o2, const Q& c);
  void add_all(std::vector<BilinearEntry> es);

  BilinearStencil operator+(const BilinearStencil& o) const;
  BilinearStencil operator-(const BilinearStencil& o) const;
  BilinearStencil scaled(const Q& s) const;
  bool operator==(const BilinearStencil& o) const;
  bool operator!=(const BilinearStencil& o) const { return !(*this == o); }

  // (phi2, phi1) -> B(phi1, phi2)
  BilinearStencil swapped() const;
  int radius() const;

 private:
  void normalize();
  int m_ = 2;
  int f1_ = 0;
  int f2_ = 0;
  int out_ = 0;
  std::vector<BilinearEntry> entries_;
};

// B(S phi1, phi2), B(phi1, S phi2) and S(B(phi1, phi2)).
BilinearStencil compose_first(const BilinearStencil& b, const Stencil& s);
BilinearStencil compose_second(const BilinearStencil& b, const Stencil& s);
BilinearStencil compose_out(const Stencil& s, const BilinearStencil& b);

// Finitely supported cochain on the unbounded lattice Z^m, keyed by (type, base).
using SparseCochain = std::map<std::pair<int, Point>, Q>;

SparseCochain apply(const Stencil& s, const SparseCochain& f);
SparseCochain evaluate(const BilinearStencil& b, const SparseCochain& f1, const SparseCochain& f2);

// Value of B on a slab cell. Out-of-slab inputs read as zero; throws GeometryTooTight when a
// term is not determined by the two validity windows.
Q evaluate_at(const BilinearStencil& b, const Field& f1, const Field& f2, const Cell& out, const CausalLattice& lat);
Field evaluate(const BilinearStencil& b, const Field& f1, const Field& f2, const CausalLattice& lat);

// Matrix M with sum over `cells` of B(f1, f2) = f1^T M f2, together with the input cells it reads.
struct BilinearMatrix {
  SparseMatrix matrix;
  std::vector<int> cells1;
  std::vector<int> cells2;
};
BilinearMatrix bilinear_matrix(const BilinearStencil& b, const std::vector<Cell>& cells, const CausalLattice& lat);

// Degree-graded bilinear map F^a x F^b -> forms of degree a + b + m - 1.
class DifferentialPairing {
 public:
  DifferentialPairing() = default;
  explicit DifferentialPairing(int m) : m_(m) {}

  int m() const { return m_; }
  bool has(int a, int b) const { return comps_.count({a, b}) != 0; }
  const BilinearStencil& component(int a, int b) const { return comps_.at({a, b}); }
  void set(int a, int b, BilinearStencil s) { comps_[{a, b}] = std::move(s); }
  const std::map<std::pair<int, int>, BilinearStencil>& components() const { return comps_; }

  // Linear stencil K from form(b) to form(a) with the integral over all top cells of
  // (phi1, phi2) equal to <phi1, K phi2>, for a + b = 1.
  Stencil integrated(int a, int b) const;

 private:
  int m_ = 2;
  std::map<std::pair<int, int>, BilinearStencil> comps_;
};

// -(-1)^{ab} B(b,a) read with swapped arguments.
BilinearStencil graded_swap(const BilinearStencil& b_ba, int a, int b);

// Right-hand side of the compatibility identity for the (a, b) component, from the components one
// level up: (-1)^{m-1} [ (Q phi1, phi2) + (-1)^a (phi1, Q phi2) ].
BilinearStencil compatibility_source(const Model& model, const DifferentialPairing& pr, int a, int b);

// beta with d beta = R on Z^m and compact support, found by a dense solve on a box per input pair.
BilinearStencil solve_local_primitive(const BilinearStencil& r, int m);

// Top components from the field content; lower components from local primitives, antisymmetrized.
DifferentialPairing build_pairing(const Model& model);

struct PairingReport {
  bool antisymmetric = false;
  bool compatible = false;
  bool evaluated = false;  // random lattice pairs agree with the stencil identities
  std::vector<std::string> failures;
  bool ok() const { return antisymmetric && compatible && evaluated; }
};

PairingReport validate_pairing(const Model& model, const DifferentialPairing& pr, std::uint64_t seed, int samples);

struct SelfAdjointReport {
  bool qww = false;        // Q W W = W W Q
  bool integral = false;   // int (W phi1, phi2) = (-1)^{|phi1|} int (phi1, W phi2)
  bool pw = false;         // P W = W P
  bool p_symmetric = false;
  std::vector<std::string> failures;
  bool ok() const { return qww && integral && pw && p_symmetric; }
};

SelfAdjointReport validate_self_adjoint_witness(const Model& model, const DifferentialPairing& pr);

}  // namespace ghc
