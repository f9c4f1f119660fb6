#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "ghc/stencil.hpp"

namespace ghc {

enum class Direction { Retarded, Advanced };

struct CausalFailure {
  int type;
  std::string reason;
};

struct CausalCertificate {
  bool ok = false;
  std::map<int, Q> leading;  // per cell type: coefficient of the leading cell
  std::vector<CausalFailure> failures;
};

// Each row must have exactly one input strictly later (earlier for Advanced) than itself:
// the same cell shifted one step in time, with nonzero coefficient; every other input must
// lie in the causal past (future) of that leading cell.
CausalCertificate certify_causal(const Stencil& p, Direction dir = Direction::Retarded);

// Time reflection t -> n-1-t of the slab, acting on cells of a given form degree.
Stencil reflect_time(const Stencil& s);
Field reflect_time(const Field& f, const CausalLattice& lat);

// Retarded or advanced inverse of a certified operator on the slab.
class GreenSolver {
 public:
  GreenSolver(const Stencil& p, const CausalLattice& lat, Direction dir);

  Direction direction() const { return dir_; }
  const Stencil& op() const { return p_; }

  // Requires the field to be known zero beyond the slab on the past (future) side.
  Field solve(const Field& phi) const;
  // Raw cochain: support must start at or after the margin (end before n-1-margin).
  Field solve_admissible(const Field& phi) const;
  // Forward substitution over the whole slab without using cached kernels.
  Field sweep(const Field& phi) const;

  // Unit-source responses computed so far, per cell type; preload restores saved ones.
  const std::map<int, std::vector<std::pair<int, Q>>>& kernels() const { return kernels_; }
  void preload(int type, std::vector<std::pair<int, Q>> k) const { kernels_.emplace(type, std::move(k)); }

 private:
  Field solve_retarded(const Field& phi) const;
  Field sweep_retarded(const Field& phi) const;
  const std::vector<std::pair<int, Q>>& kernel(int type) const;

  Stencil p_;
  Stencil work_;  // p_ or its time reflection
  const CausalLattice* lat_;
  Direction dir_;
  std::vector<std::vector<const StencilEntry*>> rows_by_type_;
  std::map<int, Q> lead_;
  mutable std::map<int, std::vector<std::pair<int, Q>>> kernels_;  // at base 0, spatial origin
};

// Independent oracle: dense exact Gauss solve of P psi = phi with psi = 0 on the first
// (last) time level. Returns nullopt unless the solution is unique.
std::optional<Field> dense_green_solve(const Stencil& p, const Field& phi, const CausalLattice& lat,
                                       Direction dir);

}  // namespace ghc
