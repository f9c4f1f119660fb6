#pragma once

#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "ghc/check.hpp"
#include "ghc/graded.hpp"

namespace ghc {

// Chains c_0 < c_1 < ... < c_q in a poset; degenerate chains are not stored (normalized model).
using Chain = std::vector<int>;

class Poset {
 public:
  // `less` lists generating relations a < b; the order is their transitive closure.
  Poset(int n, const std::vector<std::pair<int, int>>& less);

  int size() const { return n_; }
  bool lt(int a, int b) const { return lt_[static_cast<std::size_t>(a * n_ + b)] != 0; }
  bool le(int a, int b) const { return a == b || lt(a, b); }
  // Strictly increasing chains with q + 1 objects, in lexicographic order.
  const std::vector<Chain>& chains(int q) const;
  int max_chain_length() const { return static_cast<int>(chains_.size()) - 1; }
  std::optional<int> top() const;

 private:
  int n_;
  std::vector<char> lt_;
  std::vector<std::vector<Chain>> chains_;
};

Poset random_poset(std::mt19937_64& rng, int max_objects);

// Functor from a finite poset to cochain complexes.
struct FiniteDiagram {
  Poset poset{0, {}};
  std::vector<LadderComplex> values;
  std::map<std::pair<int, int>, GradedMap> arrows;  // a < b

  const LadderComplex& at(int c) const { return values[static_cast<std::size_t>(c)]; }
  GradedMap arrow(int a, int b) const;  // identity when a == b
  // Throws unless arrows are cochain maps of degree 0 and compose along every chain.
  void validate() const;
  int total_dim() const;
};

FiniteDiagram constant_diagram(const Poset& p, const LadderComplex& v);

// V(c) = (+)_{a <= c} X_a (+) Y with arrows including each X_a and adding s_{a,d} - s_{a,c} into Y.
// Acyclic X_a and Y give an objectwise acyclic diagram. Redraws until the total dimension is at most max_total.
FiniteDiagram random_diagram(std::mt19937_64& rng, const Poset& p, int max_dim, bool acyclic = false,
                             int max_total = 40);

// Element of map(V, W)^degree: components[c] lies in [V(c_0), W(c_q)]^{degree - q}.
struct MappingCochain {
  int degree = 0;
  std::map<Chain, GradedMap> components;

  GradedMap at(const Chain& c, const FiniteDiagram& v, const FiniteDiagram& w) const;
  bool is_zero() const;
  MappingCochain operator+(const MappingCochain& o) const;
  MappingCochain operator-(const MappingCochain& o) const;
  MappingCochain scaled(const Q& s) const;
  bool operator==(const MappingCochain& o) const;
};

MappingCochain mapping_zero(int degree);
MappingCochain mapping_identity(const FiniteDiagram& v);
// Strict degree-n natural transformation embedded in the mapping complex.
MappingCochain embed_natural(const std::vector<GradedMap>& eta);
MappingCochain random_mapping_cochain(std::mt19937_64& rng, const FiniteDiagram& v, const FiniteDiagram& w,
                                      int degree, int density_percent = 40);

MappingCochain mapping_differential(const MappingCochain& eta, const FiniteDiagram& v, const FiniteDiagram& w);
// g o f for f in map(U, V) and g in map(V, W).
MappingCochain mapping_compose(const MappingCochain& g, const MappingCochain& f, const FiniteDiagram& u,
                               const FiniteDiagram& v, const FiniteDiagram& w);

// map(V, W) as a finite complex, with coordinates.
struct MappingComplex {
  LadderComplex complex;
  struct Slot {
    Chain chain;
    int src_degree;  // block of V(c_0) being mapped
    int offset;
    int rows;
    int cols;
  };
  std::map<int, std::vector<Slot>> slots;  // by total degree
};

MappingComplex mapping_complex(const FiniteDiagram& v, const FiniteDiagram& w);
Vec coordinates(const MappingComplex& mc, const MappingCochain& eta);
MappingCochain cochain_at(const MappingComplex& mc, int degree, const Vec& x, const FiniteDiagram& v,
                          const FiniteDiagram& w);

// Normalized hocolim: degree n is (+)_{c : [q] -> C} V(c_0)^{n+q}.
struct HocolimComplex {
  LadderComplex complex;
  std::map<std::pair<int, int>, int> offset;  // (chain id, hocolim degree) -> first basis index
  std::vector<Chain> chains;
  std::map<Chain, int> chain_id;
  int offset_of(const Chain& c, int n) const { return offset.at({chain_id.at(c), n}); }
};

HocolimComplex hocolim(const FiniteDiagram& v);
// hocolim(V) -> V(top): iota_{0,c} v -> V(c -> top) v, higher chains to 0. Throws without a top.
GradedMap hocolim_to_colim(const HocolimComplex& h, const FiniteDiagram& v);
// hocolim(Delta V) -> V: iota_{0,c} v -> v.
GradedMap collapse(const HocolimComplex& h, const FiniteDiagram& constant);

GradedMap hocolim_on_morphisms(const MappingCochain& eta, const HocolimComplex& hv, const FiniteDiagram& v,
                               const HocolimComplex& hw, const FiniteDiagram& w);

// map(V, Delta T) <-> [hocolim V, T]
GradedMap adjunct(const MappingCochain& eta, const HocolimComplex& hv, const FiniteDiagram& v,
                  const LadderComplex& t);
MappingCochain unadjunct(const GradedMap& f, const HocolimComplex& hv, const FiniteDiagram& v,
                         const LadderComplex& t);

// Randomized identities over posets with at most four objects; each case draws its own seed.
std::vector<Check> run_dgcat_suite(std::mt19937_64& rng, int cases);

}  // namespace ghc
