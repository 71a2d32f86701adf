#pragma once

// Sparse chain-complex reduction by unit pivots.
//
// A pair (a in C_j, b in C_{j+1}) with <db, a> = +-1 is removed and the
// remaining boundaries are corrected:
//   d'c = dc - (<dc, a> / <db, a>) db     for c in C_{j+1}
//   d'w = dw with its b-term dropped        for w in C_{j+2}
// The result is chain homotopy equivalent over Z, so homology is read off
// the (small) surviving complex. Each pair keeps a snapshot of db and of the
// a-row so that solutions of d x = z can be lifted back to the original basis.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <vector>

#include "topomin/int_matrix.hpp"

namespace topomin {

/// Sparse chain in cell-index coordinates.
using SparseChain = std::map<std::size_t, Integer>;

/// Rank and torsion of one homology group.
struct HomologyData {
  std::size_t rank = 0;
  std::vector<Integer> torsion;
};

class ChainComplexReduction {
 public:
  /// boundary[j] maps C_j -> C_{j-1}; boundary[0] is ignored. counts[j] = #cells in degree j.
  ChainComplexReduction(std::vector<std::size_t> counts, std::vector<SparseIntMatrix> boundary)
      : counts_(std::move(counts)) {
    const std::size_t top = counts_.size();
    cols_.resize(top);
    rows_.resize(top);
    alive_.resize(top);
    for (std::size_t j = 0; j < top; ++j) {
      alive_[j].assign(counts_[j], 1);
      rows_[j].resize(counts_[j]);
      cols_[j].resize(counts_[j]);
    }
    for (std::size_t j = 1; j < top; ++j) {
      const auto& B = boundary.at(j);
      if (B.cols != counts_[j] || B.rows != counts_[j - 1])
        throw InvalidInput("boundary matrix shape does not match cell counts");
      for (std::size_t c = 0; c < B.cols; ++c) {
        auto& col = cols_[j][c];
        for (const auto& [r, v] : B.columns[c]) {
          col.push_back({static_cast<Index>(r), v});
          rows_[j - 1][r].push_back(static_cast<Index>(c));
        }
      }
    }
    reduce();
    finalize();
  }

  std::size_t degrees() const { return counts_.size(); }
  std::size_t original_cells(std::size_t k) const { return counts_.at(k); }
  std::size_t surviving_cells(std::size_t k) const { return survivors_.at(k).size(); }
  std::size_t eliminated_pairs() const { return pairs_.size(); }

  HomologyData homology(std::size_t k) const {
    if (k >= counts_.size()) return {};
    return homology_.at(k);
  }

  /// Integer solution x of d_{k+1} x = z, or nullopt if z is not a boundary.
  /// z must be a cycle of degree k.
  std::optional<SparseChain> solve_boundary(std::size_t k, const SparseChain& z) const {
    // forward: push z through the chain projections
    SparseChain cur = z;
    std::vector<Integer> shifts;
    for (const auto& p : pairs_) {
      if (p.degree == k) {
        auto it = cur.find(p.a);
        Integer s = it == cur.end() ? Integer(0) : Integer(it->second * p.unit);
        if (s != 0)
          for (const auto& [r, v] : p.boundary_b) axpy(cur, r, -s * v);
        shifts.push_back(std::move(s));
      } else if (p.degree + 1 == k) {
        cur.erase(p.b);
      }
    }

    // dense solve on the surviving block
    const auto& rows = k < survivors_.size() ? survivors_[k] : empty_;
    const auto& cols = k + 1 < survivors_.size() ? survivors_[k + 1] : empty_;
    for (const auto& [idx, v] : cur)
      if (v != 0 && !std::binary_search(rows.begin(), rows.end(), static_cast<Index>(idx)))
        throw PreconditionError("chain projection left a non-surviving cell; input is not a cycle");

    SparseChain x;
    if (!cur.empty()) {
      if (cols.empty()) return std::nullopt;
      IntMatrix A = reduced_boundary(k + 1);
      std::vector<Integer> rhs(rows.size());
      for (const auto& [idx, v] : cur) rhs[position(rows, idx)] = v;
      SnfResult snf = smith_normal_form(A);
      std::vector<Integer> c = snf.U.apply(rhs);
      std::vector<Integer> y(cols.size());
      for (std::size_t i = 0; i < c.size(); ++i) {
        if (i < snf.rank) {
          const Integer& d = snf.D(i, i);
          if (c[i] % d != 0) return std::nullopt;
          y[i] = c[i] / d;
        } else if (c[i] != 0) {
          return std::nullopt;
        }
      }
      std::vector<Integer> xs = snf.V.apply(y);
      for (std::size_t j = 0; j < xs.size(); ++j)
        if (xs[j] != 0) x[cols[j]] = xs[j];
    }

    // backward: lift through the recorded pairs of degree k
    std::size_t shift_pos = shifts.size();
    for (auto it = pairs_.rbegin(); it != pairs_.rend(); ++it) {
      if (it->degree != k) continue;
      const Integer& s = shifts[--shift_pos];
      Integer t = 0;
      for (const auto& [c, w] : it->row_a) {
        auto f = x.find(c);
        if (f != x.end()) t += f->second * w;
      }
      t *= it->unit;
      Integer coef = s - t;
      if (coef != 0) x[it->b] = coef;
    }
    return x;
  }

 private:
  using Index = std::uint32_t;
  struct Entry {
    Index row;
    Integer value;
  };
  struct Pair {
    std::size_t degree;  // degree of a; b has degree + 1
    Index a;
    Index b;
    int unit;
    std::vector<Entry> boundary_b;
    std::vector<std::pair<Index, Integer>> row_a;
  };

  static void axpy(SparseChain& v, std::size_t idx, const Integer& c) {
    if (c == 0) return;
    auto [it, inserted] = v.try_emplace(idx, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) v.erase(it);
    }
  }

  static std::size_t position(const std::vector<Index>& sorted, std::size_t idx) {
    return static_cast<std::size_t>(
        std::lower_bound(sorted.begin(), sorted.end(), static_cast<Index>(idx)) - sorted.begin());
  }

  static const Integer* coefficient(const std::vector<Entry>& col, Index row) {
    auto it = std::lower_bound(col.begin(), col.end(), row,
                               [](const Entry& e, Index r) { return e.row < r; });
    return (it != col.end() && it->row == row) ? &it->value : nullptr;
  }

  static void erase_value(std::vector<Index>& v, Index x) {
    auto it = std::find(v.begin(), v.end(), x);
    if (it != v.end()) {
      *it = v.back();
      v.pop_back();
    }
  }

  // cols_[j][c] -= f * src, keeping rows_[j-1] in sync
  void column_axpy(std::size_t j, Index c, const Integer& f, const std::vector<Entry>& src) {
    auto& col = cols_[j][c];
    std::vector<Entry> merged;
    merged.reserve(col.size() + src.size());
    std::size_t p = 0, q = 0;
    while (p < col.size() || q < src.size()) {
      if (q == src.size() || (p < col.size() && col[p].row < src[q].row)) {
        merged.push_back(std::move(col[p++]));
      } else if (p == col.size() || src[q].row < col[p].row) {
        merged.push_back({src[q].row, -f * src[q].value});
        rows_[j - 1][src[q].row].push_back(c);
        ++q;
      } else {
        Integer v = col[p].value - f * src[q].value;
        if (v == 0)
          erase_value(rows_[j - 1][col[p].row], c);
        else
          merged.push_back({col[p].row, std::move(v)});
        ++p;
        ++q;
      }
    }
    col = std::move(merged);
  }

  void eliminate(std::size_t j, Index a, Index b) {
    const std::size_t top = counts_.size();
    Pair p{j, a, b, 0, cols_[j + 1][b], {}};
    p.unit = (*coefficient(p.boundary_b, a) > 0) ? 1 : -1;

    const std::vector<Index> row = rows_[j][a];
    for (Index c : row) {
      if (c == b) continue;
      const Integer* w = coefficient(cols_[j + 1][c], a);
      if (w == nullptr) continue;
      Integer wv = *w;
      p.row_a.emplace_back(c, wv);
      column_axpy(j + 1, c, wv * p.unit, p.boundary_b);
    }

    if (j + 2 < top) {
      for (Index c2 : rows_[j + 1][b]) {
        auto& col = cols_[j + 2][c2];
        auto it = std::lower_bound(col.begin(), col.end(), b,
                                   [](const Entry& e, Index r) { return e.row < r; });
        if (it != col.end() && it->row == b) col.erase(it);
      }
    }
    rows_[j + 1][b].clear();

    for (const auto& e : cols_[j + 1][b]) erase_value(rows_[j][e.row], b);
    cols_[j + 1][b].clear();
    alive_[j + 1][b] = 0;

    if (j >= 1) {
      for (const auto& e : cols_[j][a]) erase_value(rows_[j - 1][e.row], a);
      cols_[j][a].clear();
    }
    rows_[j][a].clear();
    alive_[j][a] = 0;

    pairs_.push_back(std::move(p));
  }

  void reduce() {
    const std::size_t top = counts_.size();
    // threshold on (row length - 1): 0 means free-face collapses only
    std::size_t threshold = 0;
    while (true) {
      bool any_unit = false;
      bool changed = true;
      while (changed) {
        changed = false;
        for (std::size_t j = 1; j < top; ++j) {
          for (Index b = 0; b < counts_[j]; ++b) {
            if (!alive_[j][b]) continue;
            std::optional<Index> pick;
            std::size_t best = std::numeric_limits<std::size_t>::max();
            for (const auto& e : cols_[j][b]) {
              if (e.value != 1 && e.value != -1) continue;
              any_unit = true;
              std::size_t len = rows_[j - 1][e.row].size();
              if (len < best) {
                best = len;
                pick = e.row;
              }
            }
            if (pick && best - 1 <= threshold) {
              eliminate(j - 1, *pick, b);
              changed = true;
            }
          }
        }
      }
      if (!any_unit) break;
      threshold = threshold == 0 ? 1 : threshold * 2;
    }
  }

  IntMatrix reduced_boundary(std::size_t j) const {
    const auto& rows = survivors_[j - 1];
    const auto& cols = survivors_[j];
    IntMatrix A(rows.size(), cols.size());
    for (std::size_t c = 0; c < cols.size(); ++c)
      for (const auto& e : cols_[j][cols[c]]) A(position(rows, e.row), c) = e.value;
    return A;
  }

  void finalize() {
    const std::size_t top = counts_.size();
    survivors_.assign(top, {});
    for (std::size_t j = 0; j < top; ++j)
      for (Index c = 0; c < counts_[j]; ++c)
        if (alive_[j][c]) survivors_[j].push_back(c);

    std::vector<std::vector<Integer>> invariants(top + 1);
    for (std::size_t j = 1; j < top; ++j)
      if (!survivors_[j].empty() && !survivors_[j - 1].empty())
        invariants[j] = smith_invariants(reduced_boundary(j));

    homology_.assign(top, {});
    for (std::size_t k = 0; k < top; ++k) {
      std::size_t rank_out = invariants[k].size();
      std::size_t rank_in = k + 1 < top ? invariants[k + 1].size() : 0;
      homology_[k].rank = survivors_[k].size() - rank_out - rank_in;
      if (k + 1 < top)
        for (const auto& d : invariants[k + 1])
          if (d > 1) homology_[k].torsion.push_back(d);
    }
    rows_.clear();
    rows_.shrink_to_fit();
  }

  std::vector<std::size_t> counts_;
  std::vector<std::vector<std::vector<Entry>>> cols_;
  std::vector<std::vector<std::vector<Index>>> rows_;
  std::vector<std::vector<char>> alive_;
  std::vector<Pair> pairs_;
  std::vector<std::vector<Index>> survivors_;
  std::vector<HomologyData> homology_;
  std::vector<Index> empty_;
};

}  // namespace topomin
