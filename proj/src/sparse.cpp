#include "ghc/sparse.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

namespace ghc {

SparseMatrix::SparseMatrix(int rows, int cols)
    : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows)) {
  if (rows < 0 || cols < 0) throw std::invalid_argument("negative matrix shape");
}

SparseMatrix SparseMatrix::from_triplets(int rows, int cols, std::vector<Triplet> t) {
  SparseMatrix m(rows, cols);
  std::sort(t.begin(), t.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  std::size_t i = 0;
  while (i < t.size()) {
    const int r = t[i].row;
    const int c = t[i].col;
    if (r < 0 || r >= rows || c < 0 || c >= cols)
      throw std::out_of_range("triplet outside matrix shape");
    Q acc = t[i].value;
    std::size_t j = i + 1;
    while (j < t.size() && t[j].row == r && t[j].col == c) acc += t[j++].value;
    if (sgn(acc) != 0) m.data_[static_cast<std::size_t>(r)].emplace_back(c, acc);
    i = j;
  }
  return m;
}

SparseMatrix SparseMatrix::identity(int n) {
  SparseMatrix m(n, n);
  for (int i = 0; i < n; ++i) m.data_[static_cast<std::size_t>(i)].emplace_back(i, Q(1));
  return m;
}

SparseMatrix SparseMatrix::from_dense(const std::vector<Vec>& d) {
  const int r = static_cast<int>(d.size());
  const int c = r == 0 ? 0 : static_cast<int>(d[0].size());
  SparseMatrix m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j)
      if (sgn(d[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) != 0)
        m.data_[static_cast<std::size_t>(i)].emplace_back(j, d[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
  return m;
}

std::size_t SparseMatrix::nnz() const {
  std::size_t n = 0;
  for (const auto& r : data_) n += r.size();
  return n;
}

void SparseMatrix::set_row(int i, Row r) { data_.at(static_cast<std::size_t>(i)) = std::move(r); }

Q SparseMatrix::get(int i, int j) const {
  const Row& r = data_.at(static_cast<std::size_t>(i));
  auto it = std::lower_bound(r.begin(), r.end(), j,
                             [](const std::pair<int, Q>& e, int c) { return e.first < c; });
  if (it != r.end() && it->first == j) return it->second;
  return Q(0);
}

SparseMatrix SparseMatrix::transpose() const {
  SparseMatrix t(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (const auto& [j, v] : data_[static_cast<std::size_t>(i)])
      t.data_[static_cast<std::size_t>(j)].emplace_back(i, v);
  return t;
}

namespace {

SparseMatrix::Row merge(const SparseMatrix::Row& a, const SparseMatrix::Row& b, int sign) {
  SparseMatrix::Row out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
      out.push_back(a[i++]);
    } else if (i == a.size() || b[j].first < a[i].first) {
      out.emplace_back(b[j].first, sign > 0 ? Q(b[j].second) : Q(-b[j].second));
      ++j;
    } else {
      Q v = sign > 0 ? Q(a[i].second + b[j].second) : Q(a[i].second - b[j].second);
      if (sgn(v) != 0) out.emplace_back(a[i].first, v);
      ++i;
      ++j;
    }
  }
  return out;
}

}  // namespace

SparseMatrix SparseMatrix::operator+(const SparseMatrix& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("shape mismatch in +");
  SparseMatrix m(rows_, cols_);
  for (std::size_t i = 0; i < data_.size(); ++i) m.data_[i] = merge(data_[i], o.data_[i], 1);
  return m;
}

SparseMatrix SparseMatrix::operator-(const SparseMatrix& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("shape mismatch in -");
  SparseMatrix m(rows_, cols_);
  for (std::size_t i = 0; i < data_.size(); ++i) m.data_[i] = merge(data_[i], o.data_[i], -1);
  return m;
}

SparseMatrix SparseMatrix::operator*(const SparseMatrix& o) const {
  if (cols_ != o.rows_) throw std::invalid_argument("shape mismatch in *");
  SparseMatrix m(rows_, o.cols_);
  std::vector<Q> acc(static_cast<std::size_t>(o.cols_));
  std::vector<char> used(static_cast<std::size_t>(o.cols_), 0);
  std::vector<int> touched;
  for (int i = 0; i < rows_; ++i) {
    touched.clear();
    for (const auto& [k, a] : data_[static_cast<std::size_t>(i)]) {
      for (const auto& [j, b] : o.data_[static_cast<std::size_t>(k)]) {
        const auto uj = static_cast<std::size_t>(j);
        if (!used[uj]) {
          used[uj] = 1;
          acc[uj] = a * b;
          touched.push_back(j);
        } else {
          acc[uj] += a * b;
        }
      }
    }
    std::sort(touched.begin(), touched.end());
    Row& r = m.data_[static_cast<std::size_t>(i)];
    for (int j : touched) {
      const auto uj = static_cast<std::size_t>(j);
      if (sgn(acc[uj]) != 0) r.emplace_back(j, acc[uj]);
      used[uj] = 0;
    }
  }
  return m;
}

SparseMatrix SparseMatrix::scaled(const Q& s) const {
  SparseMatrix m(rows_, cols_);
  if (sgn(s) == 0) return m;
  for (std::size_t i = 0; i < data_.size(); ++i) {
    m.data_[i].reserve(data_[i].size());
    for (const auto& [j, v] : data_[i]) m.data_[i].emplace_back(j, v * s);
  }
  return m;
}

Vec SparseMatrix::apply(const Vec& x) const {
  if (static_cast<int>(x.size()) != cols_) throw std::invalid_argument("shape mismatch in apply");
  Vec y(static_cast<std::size_t>(rows_));
  for (int i = 0; i < rows_; ++i)
    for (const auto& [j, v] : data_[static_cast<std::size_t>(i)])
      y[static_cast<std::size_t>(i)] += v * x[static_cast<std::size_t>(j)];
  return y;
}

bool SparseMatrix::operator==(const SparseMatrix& o) const {
  return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
}

std::optional<std::pair<int, int>> SparseMatrix::first_difference(const SparseMatrix& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) return std::make_pair(-1, -1);
  for (int i = 0; i < rows_; ++i) {
    const Row& a = data_[static_cast<std::size_t>(i)];
    const Row& b = o.data_[static_cast<std::size_t>(i)];
    if (a == b) continue;
    std::size_t k = 0;
    while (k < a.size() && k < b.size() && a[k] == b[k]) ++k;
    int col;
    if (k == a.size()) col = b[k].first;
    else if (k == b.size()) col = a[k].first;
    else col = std::min(a[k].first, b[k].first);
    return std::make_pair(i, col);
  }
  return std::nullopt;
}

SparseMatrix SparseMatrix::select(const std::vector<int>& rs, const std::vector<int>& cs) const {
  std::unordered_map<int, int> cmap;
  cmap.reserve(cs.size() * 2);
  for (std::size_t k = 0; k < cs.size(); ++k) cmap.emplace(cs[k], static_cast<int>(k));
  std::vector<Triplet> t;
  for (std::size_t k = 0; k < rs.size(); ++k)
    for (const auto& [j, v] : data_.at(static_cast<std::size_t>(rs[k]))) {
      auto it = cmap.find(j);
      if (it != cmap.end()) t.push_back({static_cast<int>(k), it->second, v});
    }
  return from_triplets(static_cast<int>(rs.size()), static_cast<int>(cs.size()), std::move(t));
}

SparseMatrix SparseMatrix::block2x2(const SparseMatrix& a, const SparseMatrix& b,
                                    const SparseMatrix& c, const SparseMatrix& d) {
  if (a.rows_ != b.rows_ || c.rows_ != d.rows_ || a.cols_ != c.cols_ || b.cols_ != d.cols_)
    throw std::invalid_argument("block shape mismatch");
  SparseMatrix m(a.rows_ + c.rows_, a.cols_ + b.cols_);
  auto put = [&](const SparseMatrix& s, int r0, int c0) {
    for (int i = 0; i < s.rows_; ++i)
      for (const auto& [j, v] : s.data_[static_cast<std::size_t>(i)])
        m.data_[static_cast<std::size_t>(r0 + i)].emplace_back(c0 + j, v);
  };
  put(a, 0, 0);
  put(b, 0, a.cols_);
  put(c, a.rows_, 0);
  put(d, a.rows_, a.cols_);
  return m;
}

std::vector<Vec> SparseMatrix::to_dense() const {
  std::vector<Vec> d(static_cast<std::size_t>(rows_), Vec(static_cast<std::size_t>(cols_)));
  for (int i = 0; i < rows_; ++i)
    for (const auto& [j, v] : data_[static_cast<std::size_t>(i)])
      d[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = v;
  return d;
}

namespace {

using IRow = std::vector<std::pair<int, Z>>;

void make_primitive(IRow& r) {
  if (r.empty()) return;
  Z g = 0;
  for (const auto& e : r) {
    g = gcd(g, e.second);
    if (g == 1) break;
  }
  if (g != 1 && g != 0)
    for (auto& e : r) mpz_divexact(e.second.get_mpz_t(), e.second.get_mpz_t(), g.get_mpz_t());
}

IRow to_integer_row(const SparseMatrix::Row& row) {
  Z l = 1;
  for (const auto& e : row) l = lcm(l, Z(e.second.get_den()));
  IRow out;
  out.reserve(row.size());
  for (const auto& e : row) {
    Z v = e.second.get_num() * (l / e.second.get_den());
    out.emplace_back(e.first, v);
  }
  make_primitive(out);
  return out;
}

// r := a*r - b*p, where the leading entries cancel.
IRow combine(const IRow& r, const Z& a, const IRow& p, const Z& b) {
  IRow out;
  out.reserve(r.size() + p.size());
  std::size_t i = 0, j = 0;
  Z v;
  while (i < r.size() || j < p.size()) {
    if (j == p.size() || (i < r.size() && r[i].first < p[j].first)) {
      out.emplace_back(r[i].first, a * r[i].second);
      ++i;
    } else if (i == r.size() || p[j].first < r[i].first) {
      out.emplace_back(p[j].first, -b * p[j].second);
      ++j;
    } else {
      v = a * r[i].second - b * p[j].second;
      if (sgn(v) != 0) out.emplace_back(r[i].first, v);
      ++i;
      ++j;
    }
  }
  return out;
}

}  // namespace

int rank(const SparseMatrix& a) {
  std::unordered_map<int, IRow> pivots;
  pivots.reserve(static_cast<std::size_t>(std::min(a.rows(), a.cols())) * 2 + 1);
  for (int i = 0; i < a.rows(); ++i) {
    IRow r = to_integer_row(a.row(i));
    while (!r.empty()) {
      auto it = pivots.find(r.front().first);
      if (it == pivots.end()) {
        const int c = r.front().first;
        pivots.emplace(c, std::move(r));
        break;
      }
      const IRow& p = it->second;
      Z g = gcd(r.front().second, p.front().second);
      Z ra = p.front().second / g;
      Z pb = r.front().second / g;
      r = combine(r, ra, p, pb);
      make_primitive(r);
    }
  }
  return static_cast<int>(pivots.size());
}

int bareiss_rank(const std::vector<Vec>& in) {
  const int rows = static_cast<int>(in.size());
  if (rows == 0) return 0;
  const int cols = static_cast<int>(in[0].size());
  std::vector<std::vector<Z>> m(static_cast<std::size_t>(rows), std::vector<Z>(static_cast<std::size_t>(cols)));
  for (int i = 0; i < rows; ++i) {
    Z l = 1;
    for (const Q& q : in[static_cast<std::size_t>(i)]) l = lcm(l, Z(q.get_den()));
    for (int j = 0; j < cols; ++j) {
      const Q& q = in[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = q.get_num() * (l / q.get_den());
    }
  }
  Z prev = 1;
  int r = 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    int piv = -1;
    for (int i = r; i < rows; ++i)
      if (sgn(m[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)]) != 0) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    std::swap(m[static_cast<std::size_t>(piv)], m[static_cast<std::size_t>(r)]);
    const auto ur = static_cast<std::size_t>(r);
    for (int i = r + 1; i < rows; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      for (int j = c + 1; j < cols; ++j) {
        const auto uj = static_cast<std::size_t>(j);
        Z v = m[ur][static_cast<std::size_t>(c)] * m[ui][uj] - m[ui][static_cast<std::size_t>(c)] * m[ur][uj];
        mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
        m[ui][uj] = v;
      }
      m[ui][static_cast<std::size_t>(c)] = 0;
    }
    prev = m[ur][static_cast<std::size_t>(c)];
    ++r;
  }
  return r;
}

std::vector<int> rref(std::vector<Vec>& a) {
  std::vector<int> piv;
  const int rows = static_cast<int>(a.size());
  if (rows == 0) return piv;
  const int cols = static_cast<int>(a[0].size());
  int r = 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    int p = -1;
    for (int i = r; i < rows; ++i)
      if (sgn(a[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)]) != 0) {
        p = i;
        break;
      }
    if (p < 0) continue;
    std::swap(a[static_cast<std::size_t>(p)], a[static_cast<std::size_t>(r)]);
    Vec& pr = a[static_cast<std::size_t>(r)];
    const Q inv = 1 / pr[static_cast<std::size_t>(c)];
    for (auto& v : pr) v *= inv;
    for (int i = 0; i < rows; ++i) {
      if (i == r) continue;
      Vec& ri = a[static_cast<std::size_t>(i)];
      const Q f = ri[static_cast<std::size_t>(c)];
      if (sgn(f) == 0) continue;
      for (int j = c; j < cols; ++j) ri[static_cast<std::size_t>(j)] -= f * pr[static_cast<std::size_t>(j)];
    }
    piv.push_back(c);
    ++r;
  }
  return piv;
}

std::vector<Vec> kernel_basis(const std::vector<Vec>& a, int cols) {
  std::vector<Vec> m = a;
  std::vector<int> piv = rref(m);
  std::vector<char> is_piv(static_cast<std::size_t>(cols), 0);
  for (int c : piv) is_piv[static_cast<std::size_t>(c)] = 1;
  std::vector<Vec> basis;
  for (int f = 0; f < cols; ++f) {
    if (is_piv[static_cast<std::size_t>(f)]) continue;
    Vec v(static_cast<std::size_t>(cols));
    v[static_cast<std::size_t>(f)] = 1;
    for (std::size_t k = 0; k < piv.size(); ++k)
      v[static_cast<std::size_t>(piv[k])] = -m[k][static_cast<std::size_t>(f)];
    basis.push_back(std::move(v));
  }
  return basis;
}

std::optional<Vec> solve(const std::vector<Vec>& a, const Vec& b, int cols) {
  std::vector<Vec> m;
  m.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    Vec r = a[i];
    r.resize(static_cast<std::size_t>(cols));
    r.push_back(b[i]);
    m.push_back(std::move(r));
  }
  std::vector<int> piv = rref(m);
  if (!piv.empty() && piv.back() == cols) return std::nullopt;
  Vec x(static_cast<std::size_t>(cols));
  for (std::size_t k = 0; k < piv.size(); ++k)
    x[static_cast<std::size_t>(piv[k])] = m[k][static_cast<std::size_t>(cols)];
  return x;
}

}  // namespace ghc
