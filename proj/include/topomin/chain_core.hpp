#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "topomin/int_matrix.hpp"
#include "topomin/integer.hpp"
#include "topomin/reduction.hpp"

namespace topomin {

using VertexId = std::uint32_t;

/// Vertex tuple; canonical storage is strictly increasing.
using Simplex = std::vector<VertexId>;

/// Lattice point (exact); physical coordinates are these times the complex scale.
using Point = std::vector<Rational>;

struct SimplexHash {
  std::size_t operator()(const Simplex& s) const noexcept {
    std::size_t h = 0xcbf29ce484222325ULL;
    for (VertexId v : s) {
      h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
  }
};

/// Sorts `vertices` in place and returns the sign of the sorting permutation,
/// or 0 when a vertex repeats (degenerate simplex).
inline int canonicalize(std::vector<VertexId>& vertices) {
  int sign = 1;
  // insertion sort keeps the transposition count
  for (std::size_t i = 1; i < vertices.size(); ++i)
    for (std::size_t j = i; j > 0 && vertices[j - 1] > vertices[j]; --j) {
      std::swap(vertices[j - 1], vertices[j]);
      sign = -sign;
    }
  for (std::size_t i = 1; i < vertices.size(); ++i)
    if (vertices[i] == vertices[i - 1]) return 0;
  return sign;
}

/// Axis extents of a grid-built complex, in cells.
struct GridInfo {
  std::vector<std::size_t> box;

  std::size_t vertex_count() const {
    std::size_t n = 1;
    for (auto b : box) n *= b + 1;
    return n;
  }

  std::optional<VertexId> vertex_at(std::span<const std::int64_t> lattice) const {
    if (lattice.size() != box.size()) return std::nullopt;
    std::size_t id = 0, stride = 1;
    for (std::size_t i = 0; i < box.size(); ++i) {
      if (lattice[i] < 0 || static_cast<std::size_t>(lattice[i]) > box[i]) return std::nullopt;
      id += static_cast<std::size_t>(lattice[i]) * stride;
      stride *= box[i] + 1;
    }
    return static_cast<VertexId>(id);
  }

  std::vector<std::int64_t> lattice_of(VertexId v) const {
    std::vector<std::int64_t> x(box.size());
    std::size_t rest = v;
    for (std::size_t i = 0; i < box.size(); ++i) {
      x[i] = static_cast<std::int64_t>(rest % (box[i] + 1));
      rest /= box[i] + 1;
    }
    return x;
  }
};

/// Finite simplicial complex, closed under faces, immutable after construction.
class Complex {
 public:
  /// Closure of the given simplices. Vertices may appear in any order; the
  /// vertex table may contain vertices used by no simplex.
  static std::shared_ptr<const Complex> from_simplices(std::size_t ambient_dim, std::vector<Point> coordinates,
                                                       double scale, std::vector<Simplex> generators,
                                                       std::optional<GridInfo> grid = std::nullopt) {
    auto K = std::shared_ptr<Complex>(new Complex());
    K->ambient_dim_ = ambient_dim;
    K->coords_ = std::move(coordinates);
    K->scale_ = scale;
    K->grid_ = std::move(grid);
    for (const auto& p : K->coords_)
      if (p.size() != ambient_dim) throw InvalidInput("vertex coordinate has wrong dimension");

    std::size_t top = 0;
    for (auto& s : generators) {
      if (s.empty()) throw InvalidInput("empty simplex");
      if (canonicalize(s) == 0) throw InvalidInput("simplex with a repeated vertex");
      if (s.back() >= K->coords_.size()) throw InvalidInput("simplex references an unknown vertex");
      top = std::max(top, s.size());
    }
    K->simplices_.resize(top);
    K->lookup_.resize(top);
    for (const auto& g : generators) K->insert_closure(g);
    for (auto& level : K->simplices_) std::sort(level.begin(), level.end());
    for (std::size_t k = 0; k < top; ++k) {
      K->lookup_[k].reserve(K->simplices_[k].size());
      for (std::size_t i = 0; i < K->simplices_[k].size(); ++i) K->lookup_[k][K->simplices_[k][i]] = i;
    }
    K->faces_.resize(top);
    for (std::size_t k = 1; k < top; ++k) {
      auto& table = K->faces_[k];
      table.resize(K->simplices_[k].size() * (k + 1));
      for (std::size_t i = 0; i < K->simplices_[k].size(); ++i) {
        const Simplex& s = K->simplices_[k][i];
        Simplex f(k);
        for (std::size_t drop = 0; drop <= k; ++drop) {
          std::size_t w = 0;
          for (std::size_t v = 0; v <= k; ++v)
            if (v != drop) f[w++] = s[v];
          table[i * (k + 1) + drop] = K->lookup_[k - 1].at(f);
        }
      }
    }
    return K;
  }

  /// Top dimension, -1 for the empty complex.
  int dimension() const { return static_cast<int>(simplices_.size()) - 1; }
  std::size_t ambient_dimension() const { return ambient_dim_; }
  double scale() const { return scale_; }
  const std::optional<GridInfo>& grid() const { return grid_; }

  std::size_t vertex_table_size() const { return coords_.size(); }
  const Point& coordinates(VertexId v) const { return coords_.at(v); }
  std::vector<double> position(VertexId v) const {
    std::vector<double> x;
    for (const auto& c : coords_.at(v)) x.push_back(to_double(c) * scale_);
    return x;
  }

  std::size_t size(int k) const {
    return (k < 0 || k > dimension()) ? 0 : simplices_[static_cast<std::size_t>(k)].size();
  }
  std::size_t total_size() const {
    std::size_t n = 0;
    for (const auto& l : simplices_) n += l.size();
    return n;
  }
  const Simplex& simplex(int k, std::size_t i) const { return simplices_.at(static_cast<std::size_t>(k)).at(i); }
  std::span<const Simplex> simplices(int k) const {
    if (k < 0 || k > dimension()) return {};
    return simplices_[static_cast<std::size_t>(k)];
  }

  /// Index of a canonical (sorted) simplex.
  std::optional<std::size_t> find(const Simplex& s) const {
    if (s.empty() || s.size() > simplices_.size()) return std::nullopt;
    const auto& m = lookup_[s.size() - 1];
    auto it = m.find(s);
    if (it == m.end()) return std::nullopt;
    return it->second;
  }

  /// Index of the face of simplex (k, i) obtained by deleting its j-th vertex.
  std::size_t face(int k, std::size_t i, std::size_t j) const {
    return faces_[static_cast<std::size_t>(k)][i * static_cast<std::size_t>(k + 1) + j];
  }

  /// Matrix of d_k: rows are (k-1)-simplices, columns k-simplices.
  SparseIntMatrix boundary_matrix(int k) const {
    if (k < 1 || k > dimension()) throw InvalidInput("boundary_matrix: dimension out of range");
    SparseIntMatrix M(size(k - 1), size(k));
    for (std::size_t i = 0; i < size(k); ++i) {
      auto& col = M.columns[i];
      for (std::size_t j = 0; j <= static_cast<std::size_t>(k); ++j)
        col.emplace_back(face(k, i, j), (j % 2 == 0) ? 1 : -1);
      std::sort(col.begin(), col.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    }
    return M;
  }

  /// Unit-pivot reduction of the chain complex; built once and shared.
  const ChainComplexReduction& reduction() const {
    std::lock_guard<std::mutex> lock(cache_->mutex);
    if (!cache_->reduction) {
      std::vector<std::size_t> counts;
      std::vector<SparseIntMatrix> bd(simplices_.size());
      for (int k = 0; k <= dimension(); ++k) counts.push_back(size(k));
      for (int k = 1; k <= dimension(); ++k) bd[static_cast<std::size_t>(k)] = boundary_matrix(k);
      cache_->reduction = std::make_unique<ChainComplexReduction>(std::move(counts), std::move(bd));
    }
    return *cache_->reduction;
  }

 private:
  struct Cache {
    std::mutex mutex;
    std::unique_ptr<ChainComplexReduction> reduction;
  };

  Complex() : cache_(std::make_shared<Cache>()) {}

  void insert_closure(const Simplex& s) {
    const std::size_t k = s.size() - 1;
    if (lookup_[k].count(s)) return;
    lookup_[k].emplace(s, 0);
    simplices_[k].push_back(s);
    if (k == 0) return;
    Simplex f(k);
    for (std::size_t drop = 0; drop <= k; ++drop) {
      std::size_t w = 0;
      for (std::size_t v = 0; v <= k; ++v)
        if (v != drop) f[w++] = s[v];
      insert_closure(f);
    }
  }

  std::size_t ambient_dim_ = 0;
  std::vector<Point> coords_;
  double scale_ = 1.0;
  std::optional<GridInfo> grid_;
  std::vector<std::vector<Simplex>> simplices_;
  std::vector<std::unordered_map<Simplex, std::size_t, SimplexHash>> lookup_;
  std::vector<std::vector<std::size_t>> faces_;
  std::shared_ptr<Cache> cache_;
};

using ComplexPtr = std::shared_ptr<const Complex>;

/// Kuhn (Freudenthal) triangulation of a box of unit cubes: each cube with
/// base corner c is split into the n! simplices c, c+e_p0, c+e_p0+e_p1, ...
inline ComplexPtr build_grid_complex(std::size_t n, const std::vector<std::size_t>& box, double scale = 1.0) {
  if (n == 0 || n > 4) throw InvalidInput("grid dimension must be between 1 and 4");
  if (box.size() != n) throw InvalidInput("box must give one cell count per axis");
  if (std::any_of(box.begin(), box.end(), [](std::size_t b) { return b == 0; }))
    throw InvalidInput("axis cell count must be at least 1");
  if (!(scale > 0.0)) throw InvalidInput("scale must be positive");

  GridInfo grid{box};
  std::vector<Point> coords(grid.vertex_count());
  for (VertexId v = 0; v < coords.size(); ++v) {
    auto x = grid.lattice_of(v);
    for (auto c : x) coords[v].emplace_back(c);
  }

  std::vector<std::size_t> perm(n);
  std::vector<Simplex> tops;
  std::vector<std::int64_t> corner(n, 0);
  while (true) {
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    do {
      Simplex s;
      auto x = corner;
      s.push_back(*grid.vertex_at(x));
      for (std::size_t axis : perm) {
        ++x[axis];
        s.push_back(*grid.vertex_at(x));
      }
      tops.push_back(std::move(s));
    } while (std::next_permutation(perm.begin(), perm.end()));
    std::size_t a = 0;
    while (a < n && ++corner[a] == static_cast<std::int64_t>(box[a])) corner[a++] = 0;
    if (a == n) break;
  }
  return Complex::from_simplices(n, std::move(coords), scale, std::move(tops), std::move(grid));
}

/// Integer chain of dimension k on a complex; no zero coefficients are stored.
class Chain {
 public:
  Chain(ComplexPtr complex, int dim) : complex_(std::move(complex)), dim_(dim) {
    if (!complex_) throw InvalidInput("chain needs a complex");
  }

  /// Oriented simplex given in any vertex order; the permutation sign becomes the coefficient.
  static Chain simplex(ComplexPtr complex, std::vector<VertexId> vertices, Integer coefficient = 1) {
    if (vertices.empty()) throw InvalidInput("empty simplex");
    const int k = static_cast<int>(vertices.size()) - 1;
    int sign = canonicalize(vertices);
    Chain c(std::move(complex), k);
    if (sign == 0) return c;
    auto idx = c.complex_->find(vertices);
    if (!idx) throw InvalidInput("simplex is not in the complex");
    c.add(*idx, coefficient * sign);
    return c;
  }

  const ComplexPtr& complex() const { return complex_; }
  int dimension() const { return dim_; }
  const std::map<std::size_t, Integer>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  Integer coefficient(std::size_t i) const {
    auto it = terms_.find(i);
    return it == terms_.end() ? Integer(0) : it->second;
  }

  void add(std::size_t i, const Integer& c) {
    if (i >= complex_->size(dim_)) throw InvalidInput("chain index out of range");
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(i, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  Chain& operator+=(const Chain& o) {
    check_compatible(o);
    for (const auto& [i, c] : o.terms_) add(i, c);
    return *this;
  }
  Chain& operator-=(const Chain& o) {
    check_compatible(o);
    for (const auto& [i, c] : o.terms_) add(i, -c);
    return *this;
  }
  friend Chain operator+(Chain a, const Chain& b) { return a += b; }
  friend Chain operator-(Chain a, const Chain& b) { return a -= b; }
  friend Chain operator*(const Integer& s, const Chain& a) {
    Chain out(a.complex_, a.dim_);
    if (s != 0)
      for (const auto& [i, c] : a.terms_) out.terms_.emplace(i, s * c);
    return out;
  }
  friend bool operator==(const Chain& a, const Chain& b) {
    return a.complex_ == b.complex_ && a.dim_ == b.dim_ && a.terms_ == b.terms_;
  }

  SparseChain to_sparse() const { return SparseChain(terms_.begin(), terms_.end()); }

 private:
  void check_compatible(const Chain& o) const {
    if (o.complex_ != complex_ || o.dim_ != dim_) throw InvalidInput("chains live in different groups");
  }

  ComplexPtr complex_;
  int dim_;
  std::map<std::size_t, Integer> terms_;
};

/// Simplicial boundary, sum_i (-1)^i (v0 ... ^vi ... vk). Zero on 0-chains.
inline Chain boundary(const Chain& c) {
  const int k = c.dimension();
  Chain out(c.complex(), k - 1);
  if (k <= 0) return out;
  const auto& K = *c.complex();
  for (const auto& [i, coef] : c.terms())
    for (std::size_t j = 0; j <= static_cast<std::size_t>(k); ++j)
      out.add(K.face(k, i, j), (j % 2 == 0) ? coef : Integer(-coef));
  return out;
}

inline SparseIntMatrix boundary_matrix(const Complex& K, int k) { return K.boundary_matrix(k); }

/// Subset of the d-faces of an ambient complex (the discrete candidate set).
class FaceSet {
 public:
  FaceSet(ComplexPtr complex, int d, std::vector<std::size_t> faces = {})
      : complex_(std::move(complex)), d_(d), faces_(std::move(faces)) {
    if (!complex_) throw InvalidInput("face set needs a complex");
    if (d_ < 0 || d_ >= static_cast<int>(complex_->ambient_dimension()))
      throw InvalidInput("cell dimension must be below ambient");
    std::sort(faces_.begin(), faces_.end());
    faces_.erase(std::unique(faces_.begin(), faces_.end()), faces_.end());
    for (auto f : faces_)
      if (f >= complex_->size(d_)) throw InvalidInput("face index out of range");
  }

  /// Every d-face of the complex.
  static FaceSet all(ComplexPtr complex, int d) {
    std::vector<std::size_t> idx(complex->size(d));
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    return FaceSet(std::move(complex), d, std::move(idx));
  }

  const ComplexPtr& complex() const { return complex_; }
  int cell_dimension() const { return d_; }
  const std::vector<std::size_t>& faces() const { return faces_; }
  std::size_t size() const { return faces_.size(); }
  bool empty() const { return faces_.empty(); }
  bool contains(std::size_t f) const { return std::binary_search(faces_.begin(), faces_.end(), f); }

  FaceSet with(std::span<const std::size_t> added, std::span<const std::size_t> removed) const {
    std::vector<std::size_t> out;
    for (auto f : faces_)
      if (std::find(removed.begin(), removed.end(), f) == removed.end()) out.push_back(f);
    out.insert(out.end(), added.begin(), added.end());
    return FaceSet(complex_, d_, std::move(out));
  }

  /// Vertex-membership flags of the closure |F|.
  std::vector<char> vertex_mask() const {
    std::vector<char> mask(complex_->vertex_table_size(), 0);
    for (auto f : faces_)
      for (VertexId v : complex_->simplex(d_, f)) mask[v] = 1;
    return mask;
  }

  friend bool operator==(const FaceSet& a, const FaceSet& b) {
    return a.complex_ == b.complex_ && a.d_ == b.d_ && a.faces_ == b.faces_;
  }

 private:
  ComplexPtr complex_;
  int d_;
  std::vector<std::size_t> faces_;
};

/// Chain with coefficient signs[i] (default +1, the increasing-vertex orientation) on the i-th face of F.
inline Chain faceset_to_chain(const FaceSet& F, std::span<const int> signs = {}) {
  if (!signs.empty() && signs.size() != F.size()) throw InvalidInput("one sign per face required");
  Chain c(F.complex(), F.cell_dimension());
  for (std::size_t i = 0; i < F.size(); ++i) {
    int s = signs.empty() ? 1 : signs[i];
    if (s != 1 && s != -1) throw InvalidInput("orientation signs must be +1 or -1");
    c.add(F.faces()[i], s);
  }
  return c;
}

}  // namespace topomin
