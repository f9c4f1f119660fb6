#pragma once

#include <map>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "ghc/graded.hpp"
#include "ghc/models.hpp"

namespace ghc {

// Lambda^n = W^n G^n : F^n -> F^{n-1}
Field green_homotopy(const Model& model, int n, Direction dir, const Field& phi);
// Lambda~^n = G^{n-1} W^n
Field green_homotopy_alt(const Model& model, int n, Direction dir, const Field& phi);
// lambda^n = W^{n-1} G^{n-1} G^{n-1} W^n : F^n -> F^{n-2}
Field green_two_homotopy(const Model& model, int n, Direction dir, const Field& phi);
// Lambda = Lambda+ - Lambda- on a compactly supported section
Field retarded_minus_advanced(const Model& model, int n, const Field& phi);

// Compact section with a few random cells whose spans stay inside [margin, n_time-1-margin].
Field random_admissible_field(const CausalLattice& lat, int form, std::mt19937_64& rng, int cells);

// Field-level identity check with a reproducible witness on failure.
struct Outcome {
  bool pass = true;
  int cases = 0;
  std::string witness;
  void fail(const std::string& w) {
    if (pass) witness = w;
    pass = false;
  }
};

std::string describe_field(const Field& f, const CausalLattice& lat);

struct HomotopyReport {
  Outcome homotopy;      // d Lambda = id
  Outcome support;       // supp(Lambda phi) inside J(supp phi)
  Outcome two_homotopy;  // d lambda = Lambda~ - Lambda
  bool ok() const { return homotopy.pass && support.pass && two_homotopy.pass; }
};

HomotopyReport check_green_homotopy(const Model& model, Direction dir, std::mt19937_64& rng, int samples_per_degree);

struct SpanWindow {
  int lo = 0;
  int hi = -1;
  bool empty() const { return lo > hi; }
  bool contains(const Span& s) const { return lo <= s.lo && s.hi <= hi; }
};

// Basis of sections of one degree: slab cells of a form whose spans lie in a window.
struct FiniteSpace {
  int form = 0;
  SpanWindow window;
  std::vector<int> cells;
  std::unordered_map<int, int> position;
  int dim() const { return static_cast<int>(cells.size()); }
};

FiniteSpace finite_space(const CausalLattice& lat, int form, SpanWindow w);
Field field_from(const FiniteSpace& s, const Vec& v, const CausalLattice& lat, Window window);
Vec vector_of(const FiniteSpace& s, const Field& f, const CausalLattice& lat);

struct CertificateWindows {
  std::map<int, SpanWindow> compact;  // support windows of F_c, per degree of F
  std::map<int, SpanWindow> sc;       // validity windows of the restricted F_sc, per degree
};

CertificateWindows certificate_windows(const Model& model, const PartitionOfUnity& pu);

struct QuasiIsoCertificate {
  PartitionOfUnity pu;
  CertificateWindows windows;
  std::map<int, FiniteSpace> compact;  // degree of F
  std::map<int, FiniteSpace> sc;
  LadderComplex fc;   // F_c
  LadderComplex fc1;  // F_c[1]
  LadderComplex fsc;
  GradedMap lambda;   // F_c[1] -> F_sc
  GradedMap theta;    // F_sc -> F_c[1]
  GradedMap xi;       // F_c[1] -> F_c[1], degree -1
  GradedMap upsilon;  // F_sc -> F_sc, degree -1
  Outcome lambda_cochain;
  Outcome theta_cochain;
  Outcome xi_identity;       // d Xi = id - Theta Lambda
  Outcome upsilon_identity;  // d Upsilon = id - Lambda Theta
  Outcome theta_branches;
  Outcome cone_acyclic;
  std::map<int, int> cone_dims;
  std::map<int, int> fc1_dims;
  std::map<int, int> fsc_dims;
  bool ok() const {
    return lambda_cochain.pass && theta_cochain.pass && xi_identity.pass && upsilon_identity.pass &&
           theta_branches.pass && cone_acyclic.pass;
  }
};

QuasiIsoCertificate build_certificate(const Model& model, CauchySlice minus, CauchySlice plus, std::mt19937_64& rng,
                                      bool with_cohomology = true);

struct AcyclicityReport {
  Direction dir = Direction::Retarded;
  std::vector<int> k_sites;
  std::map<int, int> e_dims;
  std::map<int, int> h_dims;
  Outcome acyclic;
  Outcome contraction;
  bool ok() const { return acyclic.pass && contraction.pass; }
};

// Admissible compact region: 1..max_sites sites inside the margin band.
Region random_admissible_region(const CausalLattice& lat, std::mt19937_64& rng, int max_sites);

// Cohomology of sections supported in J+(K) (J-(K)), truncated on the open side by
// restriction windows, with the Green's homotopy as contraction.
AcyclicityReport check_support_acyclicity(const Model& model, const Region& k, Direction dir, std::mt19937_64& rng);

}  // namespace ghc
