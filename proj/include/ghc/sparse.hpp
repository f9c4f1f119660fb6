#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "ghc/rational.hpp"

namespace ghc {

struct Triplet {
  int row;
  int col;
  Q value;
};

using Vec = std::vector<Q>;

// Sparse vector: entries sorted by index, no explicit zeros.
struct SparseVec {
  std::vector<std::pair<int, Q>> entries;
  bool empty() const { return entries.empty(); }
};

// Row-major sparse matrix over Q with sorted, zero-free rows.
class SparseMatrix {
 public:
  using Row = std::vector<std::pair<int, Q>>;

  SparseMatrix() = default;
  SparseMatrix(int rows, int cols);

  static SparseMatrix from_triplets(int rows, int cols, std::vector<Triplet> t);
  static SparseMatrix identity(int n);
  static SparseMatrix from_dense(const std::vector<Vec>& d);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t nnz() const;
  bool is_zero() const { return nnz() == 0; }

  const Row& row(int i) const { return data_[static_cast<std::size_t>(i)]; }
  // Replaces a row; entries must be sorted by column and nonzero.
  void set_row(int i, Row r);
  Q get(int i, int j) const;

  SparseMatrix transpose() const;
  SparseMatrix operator+(const SparseMatrix& o) const;
  SparseMatrix operator-(const SparseMatrix& o) const;
  SparseMatrix operator*(const SparseMatrix& o) const;
  SparseMatrix scaled(const Q& s) const;
  SparseMatrix operator-() const { return scaled(Q(-1)); }
  Vec apply(const Vec& x) const;
  bool operator==(const SparseMatrix& o) const;
  bool operator!=(const SparseMatrix& o) const { return !(*this == o); }

  // First (row, col) where the matrices differ, if any.
  std::optional<std::pair<int, int>> first_difference(const SparseMatrix& o) const;

  // Sub-matrix on the given row and column index lists (in that order).
  SparseMatrix select(const std::vector<int>& rows, const std::vector<int>& cols) const;
  // Block placement helpers.
  static SparseMatrix block2x2(const SparseMatrix& a, const SparseMatrix& b,
                               const SparseMatrix& c, const SparseMatrix& d);
  std::vector<Vec> to_dense() const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<Row> data_;
};

// Rank by sparse fraction-free elimination (integer rows, content removed).
int rank(const SparseMatrix& a);

// Dense Bareiss rank; used as the independent oracle and for small matrices.
int bareiss_rank(const std::vector<Vec>& a);

// Reduced row echelon form over Q (dense Gauss-Jordan). Returns pivot columns.
std::vector<int> rref(std::vector<Vec>& a);

// Basis of the right kernel of a dense matrix with `cols` columns.
std::vector<Vec> kernel_basis(const std::vector<Vec>& a, int cols);

// Some x with a x = b, or nullopt when inconsistent.
std::optional<Vec> solve(const std::vector<Vec>& a, const Vec& b, int cols);

}  // namespace ghc
