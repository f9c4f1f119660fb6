#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ghc/graded.hpp"
#include "ghc/green.hpp"
#include "ghc/stencil.hpp"

namespace ghc {

enum class ModelKind { KleinGordon, DeRham, ChernSimons, MaxwellP };

struct ModelSpec {
  ModelKind kind = ModelKind::KleinGordon;
  Q mass = 0;
  int m = 2;
  int p = 1;
  // Zero-order perturbation W + eps Z of the de Rham witness (eps = 0: none).
  Q perturbation = 0;
};

std::string kind_name(ModelKind k);
ModelKind parse_kind(const std::string& s);
std::string describe(const ModelSpec& s);

// A complex of difference operators with a Green's witness on a causal lattice.
class Model {
 public:
  Model(ModelSpec spec, std::shared_ptr<const CausalLattice> lat);

  const ModelSpec& spec() const { return spec_; }
  const CausalLattice& lattice() const { return *lat_; }
  std::shared_ptr<const CausalLattice> lattice_ptr() const { return lat_; }
  int deg_lo() const { return lo_; }
  int deg_hi() const { return hi_; }
  bool has_degree(int n) const { return n >= lo_ && n <= hi_; }
  int form(int n) const { return form_.at(n); }

  // Q^n : F^n -> F^{n+1}, W^n : F^n -> F^{n-1}; zero stencils outside the range.
  Stencil Q(int n) const;
  Stencil W(int n) const;
  Stencil P(int n) const;  // Q^{n-1} W^n + W^{n+1} Q^n

  void set_W(int n, Stencil w);

  const GreenSolver& green(int n, Direction dir) const;

  // Slab-level complex (all cells of every degree); composite differentials are
  // materialized factor by factor so the zero extension keeps Q o Q = 0.
  LadderComplex slab_complex() const;

 private:
  ModelSpec spec_;
  std::shared_ptr<const CausalLattice> lat_;
  int lo_ = 0;
  int hi_ = 0;
  std::map<int, int> form_;
  std::map<int, Stencil> q_;
  std::map<int, std::vector<Stencil>> q_factors_;  // leftmost applied last
  std::map<int, Stencil> w_;
  mutable std::map<std::pair<int, int>, std::unique_ptr<GreenSolver>> green_;
};

Model build_model(const ModelSpec& spec, std::shared_ptr<const CausalLattice> lat);

struct WitnessReport {
  bool q_squared_zero = false;
  bool certified = false;
  std::vector<std::string> failures;  // "degree n: reason"
};

WitnessReport validate_witness(const Model& model);

}  // namespace ghc
