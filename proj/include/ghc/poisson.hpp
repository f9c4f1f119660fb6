#pragma once

#include <map>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"

#include "ghc/check.hpp"
#include "ghc/pairing.hpp"
#include "ghc/rma.hpp"

namespace ghc {

// Bilinear form of a given degree on a finite graded space: f(x (x) y) = x^T block[p] y for
// x of degree p and y of degree -degree - p.
struct BilinearForm {
  int degree = 0;
  GradedSpace space;
  std::map<int, SparseMatrix> block;

  static BilinearForm zero(const GradedSpace& v, int degree);
  SparseMatrix at(int p) const;
  void set(int p, SparseMatrix m);

  BilinearForm operator+(const BilinearForm& o) const;
  BilinearForm operator-(const BilinearForm& o) const;
  BilinearForm scaled(const Q& s) const;
  bool operator==(const BilinearForm& o) const;
  bool operator!=(const BilinearForm& o) const { return !(*this == o); }
  bool is_zero() const;

  // f o gamma, gamma(x (x) y) = (-1)^{|x||y|} y (x) x
  BilinearForm braided() const;
  bool antisymmetric() const { return braided() == scaled(Q(-1)); }
  Q evaluate(int p, const Vec& x, const Vec& y) const;
};

// (f - f o gamma) / 2
BilinearForm asym(const BilinearForm& f);
// d f = -(-1)^|f| f o Q_tensor on the complex v.
BilinearForm differential(const BilinearForm& f, const LadderComplex& v);
// b o (f (x) g) with the Koszul sign (-1)^{|g||x|}; f and g land in b.space.
BilinearForm precompose(const BilinearForm& b, const GradedMap& f, const GradedMap& g);
std::string first_difference(const BilinearForm& a, const BilinearForm& b);

nlohmann::json to_json(const BilinearForm& f);

// Columns of sections of one form degree on the slab, with per-cell knowledge of validity.
struct SlabImage {
  int form = 0;
  SparseMatrix values;        // slab cells x columns
  std::vector<char> unknown;  // cell not determined for some column
  bool zero_before = true;    // all columns known to vanish before the slab
  bool zero_after = true;
  int columns() const { return values.cols(); }
};

SlabImage slab_image(const std::vector<Field>& columns, int form, const CausalLattice& lat);
SlabImage compact_image(const FiniteSpace& s, const CausalLattice& lat);

// Matrix of sum over `cells` of b(a1 x, a2 y). Throws GeometryTooTight if a term is not determined.
SparseMatrix region_integral(const BilinearStencil& b, const std::vector<Cell>& cells, const SlabImage& a1,
                             const SlabImage& a2, const CausalLattice& lat);

// Top cells in the slab: all, those after the slice (J+), and those before it (J-).
std::vector<Cell> top_cells(const CausalLattice& lat);
std::vector<Cell> top_cells_after(const CausalLattice& lat, int slice);
std::vector<Cell> top_cells_before(const CausalLattice& lat, int slice);
// Spatial (m-1)-cells at the slice with the orientation induced as boundary of the past.
std::vector<Cell> slice_cells(const CausalLattice& lat, int slice);
Q slice_orientation(int m);

// Images of the compact basis of F_c[1] under the inclusion and the Green's homotopies,
// keyed by degree of F_c[1].
struct HomotopyImages {
  std::map<int, SlabImage> incl;
  std::map<int, SlabImage> plus;
  std::map<int, SlabImage> minus;
  bool perturbed = false;  // some d mu block is nonzero
};

HomotopyImages witness_images(const Model& model, const QuasiIsoCertificate& c);
// Lambda'+- = Lambda+- + d mu+- for random local degree -1 maps mu+- : F_c[1] -> F_c.
HomotopyImages perturbed_images(const Model& model, const QuasiIsoCertificate& c, std::mt19937_64& rng);

struct CovariantPoisson {
  BilinearForm ev_plus;   // ev_M o (id (x) Lambda+)
  BilinearForm ev_minus;  // ev_M o (id (x) Lambda-)
  BilinearForm tau_tilde;
  BilinearForm tau;
  BilinearForm tau_plus;
  BilinearForm tau_minus;
  BilinearForm lambda_m_tilde;
  BilinearForm lambda_m;
};

CovariantPoisson covariant_poisson(const Model& model, const DifferentialPairing& pr, const QuasiIsoCertificate& c,
                                   const HomotopyImages& img);

// sigma on the restricted complex: (-1)^{m-1} times the slice integral.
BilinearForm sigma(const Model& model, const DifferentialPairing& pr, const QuasiIsoCertificate& c, int slice);

// lambda~ and each line of the computation of its differential, as forms on F_c[1].
struct CompatibilityChain {
  BilinearForm lambda_tilde;
  BilinearForm lambda;
  BilinearForm line1;  // d lambda~
  BilinearForm line2;  // after d Lambda+- - Lambda+- d = id and d Lambda = Lambda d
  BilinearForm line3;  // after compatibility of the pairing
  BilinearForm line4;  // after Stokes on the two half-slabs
  BilinearForm line5;  // sigma o Lambda^2 - tau~
};

CompatibilityChain compatibility_homotopy(const Model& model, const DifferentialPairing& pr,
                                          const QuasiIsoCertificate& c, const HomotopyImages& img, int slice);

// Homotopy on the restricted complex between sigma at two slices, built from the two
// compatibility homotopies with Theta and Upsilon.
BilinearForm cauchy_homotopy(const BilinearForm& sigma_a, const BilinearForm& sigma_b, const BilinearForm& lambda_a,
                             const BilinearForm& lambda_b, const QuasiIsoCertificate& c);

struct PoissonReport {
  std::vector<Check> checks;
  Stopwatch clock;
  bool ok() const;
};

struct PoissonOptions {
  int slice = 0;
  int other_slice = 0;
  CauchySlice minus{0};
  CauchySlice plus{0};
  bool perturbed = true;
};

PoissonReport run_poisson_suite(const Model& model, const PoissonOptions& opt, std::mt19937_64& rng);

}  // namespace ghc
