#pragma once

#include <map>
#include "json.hpp"
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ghc/signs.hpp"
#include "ghc/sparse.hpp"

namespace ghc {

struct GradedSpace {
  std::map<int, int> dims;  // degree -> dimension; absent means 0
  std::map<int, std::vector<std::string>> labels;

  int dim(int n) const {
    auto it = dims.find(n);
    return it == dims.end() ? 0 : it->second;
  }
  int total_dim() const;
  int min_degree() const;
  int max_degree() const;
  std::vector<int> degrees() const;
  bool operator==(const GradedSpace& o) const { return dims_normalized() == o.dims_normalized(); }

 private:
  std::map<int, int> dims_normalized() const;
};

enum class CausalClass { Local, Retarded, Advanced, Mixed };

// Element of the internal hom [V,W]^degree: block[n] maps V^n -> W^{n+degree}.
struct GradedMap {
  int degree = 0;
  GradedSpace src;
  GradedSpace dst;
  std::map<int, SparseMatrix> block;
  int support_radius = 0;
  CausalClass causal_class = CausalClass::Local;

  static GradedMap zero(const GradedSpace& src, const GradedSpace& dst, int degree);
  static GradedMap identity(const GradedSpace& v);

  // Block at source degree n, materialized as zero when absent.
  SparseMatrix at(int n) const;
  void set(int n, SparseMatrix m);

  GradedMap operator+(const GradedMap& o) const;
  GradedMap operator-(const GradedMap& o) const;
  GradedMap scaled(const Q& s) const;
  bool operator==(const GradedMap& o) const;
  bool is_zero() const;
  // Applies to a homogeneous vector of degree n.
  Vec apply(int n, const Vec& x) const;
};

// g o f (degrees add; no sign).
GradedMap compose(const GradedMap& g, const GradedMap& f);

struct LadderComplex {
  GradedSpace space;
  GradedMap Q;  // degree +1 endomorphism

  // Throws unless Q has degree 1, matching shapes, and Q o Q = 0.
  void validate() const;
};

LadderComplex make_complex(const GradedSpace& space, std::map<int, SparseMatrix> q_blocks);

// df = Q_W o f - (-1)^|f| f o Q_V.
GradedMap internal_hom_differential(const GradedMap& f, const LadderComplex& V, const LadderComplex& W);

LadderComplex shift(const LadderComplex& V, int p);

// cone(f)^n = V^{n+1} (+) W^n with d(v,w) = (-Q_V v, f v + Q_W w).
LadderComplex cone(const GradedMap& f, const LadderComplex& V, const LadderComplex& W);

std::map<int, int> cohomology_dims(const LadderComplex& V);
bool is_acyclic(const LadderComplex& V);

// True iff d h == g - f exactly.
bool check_homotopy(const GradedMap& f, const GradedMap& g, const GradedMap& h,
                    const LadderComplex& V, const LadderComplex& W);

// Cochain-map predicate: d f == 0 with |f| = 0.
bool is_cochain_map(const GradedMap& f, const LadderComplex& V, const LadderComplex& W);

// Small random complexes for property suites.
LadderComplex random_complex(std::mt19937_64& rng, int lo, int hi, int max_dim);
GradedMap random_map(std::mt19937_64& rng, const GradedSpace& src, const GradedSpace& dst,
                     int degree, int density_percent = 50);

nlohmann::json to_json(const GradedMap& f);
GradedMap graded_map_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SparseMatrix& m);

}  // namespace ghc
