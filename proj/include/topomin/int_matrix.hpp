#pragma once

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <utility>
#include <vector>

#include "topomin/integer.hpp"

namespace topomin {

/// Dense row-major integer matrix.
class IntMatrix {
 public:
  IntMatrix() = default;
  IntMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  IntMatrix(std::initializer_list<std::initializer_list<long long>> init) {
    rows_ = init.size();
    cols_ = rows_ == 0 ? 0 : init.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& row : init) {
      if (row.size() != cols_) throw InvalidInput("ragged matrix initializer");
      for (long long v : row) data_.emplace_back(v);
    }
  }

  static IntMatrix identity(std::size_t n) {
    IntMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Integer& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Integer& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  bool is_zero() const {
    return std::all_of(data_.begin(), data_.end(), [](const Integer& v) { return v == 0; });
  }

  friend bool operator==(const IntMatrix&, const IntMatrix&) = default;

  friend IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
    if (a.cols_ != b.rows_) throw InvalidInput("matrix product shape mismatch");
    IntMatrix out(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const Integer& aik = a(i, k);
        if (aik == 0) continue;
        for (std::size_t j = 0; j < b.cols_; ++j)
          if (b(k, j) != 0) out(i, j) += aik * b(k, j);
      }
    return out;
  }

  std::vector<Integer> apply(const std::vector<Integer>& x) const {
    if (x.size() != cols_) throw InvalidInput("matrix-vector shape mismatch");
    std::vector<Integer> y(rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j)
        if ((*this)(i, j) != 0 && x[j] != 0) y[i] += (*this)(i, j) * x[j];
    return y;
  }

  void swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t j = 0; j < cols_; ++j) std::swap((*this)(a, j), (*this)(b, j));
  }
  void swap_cols(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t i = 0; i < rows_; ++i) std::swap((*this)(i, a), (*this)(i, b));
  }
  // row[dst] += q * row[src]
  void add_row(std::size_t dst, std::size_t src, const Integer& q) {
    for (std::size_t j = 0; j < cols_; ++j)
      if ((*this)(src, j) != 0) (*this)(dst, j) += q * (*this)(src, j);
  }
  // col[dst] += q * col[src]
  void add_col(std::size_t dst, std::size_t src, const Integer& q) {
    for (std::size_t i = 0; i < rows_; ++i)
      if ((*this)(i, src) != 0) (*this)(i, dst) += q * (*this)(i, src);
  }
  void negate_row(std::size_t r) {
    for (std::size_t j = 0; j < cols_; ++j) (*this)(r, j) = -(*this)(r, j);
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Integer> data_;
};

/// Column-compressed integer matrix; each column is sorted by row and holds no zeros.
struct SparseIntMatrix {
  using Entry = std::pair<std::size_t, Integer>;

  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::vector<Entry>> columns;

  SparseIntMatrix() = default;
  SparseIntMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), columns(c) {}

  Integer at(std::size_t i, std::size_t j) const {
    const auto& col = columns.at(j);
    auto it = std::lower_bound(col.begin(), col.end(), i,
                               [](const Entry& e, std::size_t r) { return e.first < r; });
    return (it != col.end() && it->first == i) ? it->second : Integer(0);
  }

  std::size_t nonzeros() const {
    std::size_t n = 0;
    for (const auto& c : columns) n += c.size();
    return n;
  }

  bool is_zero() const {
    return std::all_of(columns.begin(), columns.end(), [](const auto& c) { return c.empty(); });
  }

  IntMatrix to_dense() const {
    IntMatrix m(rows, cols);
    for (std::size_t j = 0; j < cols; ++j)
      for (const auto& [i, v] : columns[j]) m(i, j) = v;
    return m;
  }

  friend SparseIntMatrix operator*(const SparseIntMatrix& a, const SparseIntMatrix& b) {
    if (a.cols != b.rows) throw InvalidInput("sparse product shape mismatch");
    SparseIntMatrix out(a.rows, b.cols);
    for (std::size_t j = 0; j < b.cols; ++j) {
      std::vector<Entry> acc;
      for (const auto& [k, bkj] : b.columns[j])
        for (const auto& [i, aik] : a.columns[k]) acc.emplace_back(i, aik * bkj);
      std::sort(acc.begin(), acc.end(), [](const Entry& x, const Entry& y) { return x.first < y.first; });
      auto& col = out.columns[j];
      for (auto& e : acc) {
        if (!col.empty() && col.back().first == e.first)
          col.back().second += e.second;
        else
          col.push_back(std::move(e));
      }
      col.erase(std::remove_if(col.begin(), col.end(), [](const Entry& e) { return e.second == 0; }),
                col.end());
    }
    return out;
  }
};

/// U * A * V = D with U, V unimodular and D diagonal, d1 | d2 | ... , d_i >= 0.
struct SnfResult {
  IntMatrix U;
  IntMatrix D;
  IntMatrix V;
  std::size_t rank = 0;

  std::vector<Integer> diagonal() const {
    std::vector<Integer> d;
    for (std::size_t i = 0; i < std::min(D.rows(), D.cols()); ++i) d.push_back(D(i, i));
    return d;
  }
};

namespace detail {

inline Integer abs_value(const Integer& v) { return v < 0 ? Integer(-v) : v; }

/// Smallest-magnitude pivot elimination. Row ops mirror into U, column ops into V.
template <bool Track>
std::size_t smith_reduce(IntMatrix& D, IntMatrix* U, IntMatrix* V) {
  const std::size_t m = D.rows();
  const std::size_t n = D.cols();
  auto row_op = [&](std::size_t dst, std::size_t src, const Integer& q) {
    D.add_row(dst, src, q);
    if constexpr (Track) U->add_row(dst, src, q);
  };
  auto col_op = [&](std::size_t dst, std::size_t src, const Integer& q) {
    D.add_col(dst, src, q);
    if constexpr (Track) V->add_col(dst, src, q);
  };
  auto swap_r = [&](std::size_t a, std::size_t b) {
    D.swap_rows(a, b);
    if constexpr (Track) U->swap_rows(a, b);
  };
  auto swap_c = [&](std::size_t a, std::size_t b) {
    D.swap_cols(a, b);
    if constexpr (Track) V->swap_cols(a, b);
  };

  std::size_t t = 0;
  while (t < std::min(m, n)) {
    // pivot: smallest nonzero magnitude in the trailing block
    std::optional<std::pair<std::size_t, std::size_t>> best;
    Integer best_abs;
    for (std::size_t i = t; i < m; ++i)
      for (std::size_t j = t; j < n; ++j) {
        if (D(i, j) == 0) continue;
        Integer a = abs_value(D(i, j));
        if (!best || a < best_abs) {
          best = {i, j};
          best_abs = a;
          if (best_abs == 1) break;
        }
      }
    if (!best) break;
    swap_r(t, best->first);
    swap_c(t, best->second);

    bool divisible_block = false;
    while (!divisible_block) {
      bool clean = false;
      while (!clean) {
        clean = true;
        for (std::size_t i = t + 1; i < m; ++i) {
          if (D(i, t) == 0) continue;
          Integer q = D(i, t) / D(t, t);
          if (q != 0) row_op(i, t, -q);
          if (D(i, t) != 0) clean = false;
        }
        for (std::size_t j = t + 1; j < n; ++j) {
          if (D(t, j) == 0) continue;
          Integer q = D(t, j) / D(t, t);
          if (q != 0) col_op(j, t, -q);
          if (D(t, j) != 0) clean = false;
        }
        if (!clean) {
          // remainders are smaller than the pivot; move the smallest in
          std::size_t bi = t, bj = t;
          Integer ba = abs_value(D(t, t));
          for (std::size_t i = t + 1; i < m; ++i)
            if (D(i, t) != 0 && abs_value(D(i, t)) < ba) {
              ba = abs_value(D(i, t));
              bi = i;
              bj = t;
            }
          for (std::size_t j = t + 1; j < n; ++j)
            if (D(t, j) != 0 && abs_value(D(t, j)) < ba) {
              ba = abs_value(D(t, j));
              bi = t;
              bj = j;
            }
          if (bi != t) swap_r(t, bi);
          if (bj != t) swap_c(t, bj);
        }
      }
      divisible_block = true;
      for (std::size_t i = t + 1; i < m && divisible_block; ++i)
        for (std::size_t j = t + 1; j < n; ++j)
          if (D(i, j) != 0 && D(i, j) % D(t, t) != 0) {
            row_op(t, i, Integer(1));
            divisible_block = false;
            break;
          }
    }
    if (D(t, t) < 0) {
      D.negate_row(t);
      if constexpr (Track) U->negate_row(t);
    }
    ++t;
  }
  return t;
}

}  // namespace detail

/// Smith normal form with unimodular transforms.
inline SnfResult smith_normal_form(const IntMatrix& A) {
  SnfResult r{IntMatrix::identity(A.rows()), A, IntMatrix::identity(A.cols()), 0};
  r.rank = detail::smith_reduce<true>(r.D, &r.U, &r.V);
  return r;
}

/// Nonzero invariant factors only; cheaper than smith_normal_form when U, V are not needed.
inline std::vector<Integer> smith_invariants(IntMatrix A) {
  std::size_t rank = detail::smith_reduce<false>(A, nullptr, nullptr);
  std::vector<Integer> d;
  d.reserve(rank);
  for (std::size_t i = 0; i < rank; ++i) d.push_back(A(i, i));
  return d;
}

/// Determinant by fraction-free (Bareiss) elimination.
inline Integer determinant(IntMatrix A) {
  if (A.rows() != A.cols()) throw InvalidInput("determinant of a non-square matrix");
  const std::size_t n = A.rows();
  if (n == 0) return 1;
  Integer sign = 1, prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (A(k, k) == 0) {
      std::size_t p = k + 1;
      while (p < n && A(p, k) == 0) ++p;
      if (p == n) return 0;
      A.swap_rows(k, p);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) A(i, j) = (A(i, j) * A(k, k) - A(i, k) * A(k, j)) / prev;
    prev = A(k, k);
  }
  return sign * A(n - 1, n - 1);
}

}  // namespace topomin
