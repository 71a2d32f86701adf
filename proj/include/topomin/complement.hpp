#pragma once

// Complement models of |F| inside the ambient box, constraint cycles, and the
// spanning / competitor decisions built on them.
//
// If L is a full subcomplex of K, |K| \ |L| deformation retracts onto the full
// subcomplex spanned by the vertices outside L. Two ways to make L full:
//  - barycentric: pass to sd(K); the model is the order complex of K \ L.
//  - stellar: star only the "missing faces" (simplices of K outside L whose
//    vertices all lie in L), highest dimension first. L and every simplex
//    avoiding L are left untouched, so ambient chains transfer verbatim.
// Both give homotopy equivalent models; stellar is far smaller.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "topomin/chain_core.hpp"
#include "topomin/homology.hpp"

namespace topomin {

enum class ComplementModelKind { stellar, barycentric };

/// Closed axis-aligned sub-box in lattice coordinates.
struct GridRegion {
  std::vector<std::int64_t> lo;
  std::vector<std::int64_t> hi;

  bool contains(const Point& p) const {
    for (std::size_t i = 0; i < lo.size(); ++i)
      if (p[i] < Rational(lo[i]) || p[i] > Rational(hi[i])) return false;
    return true;
  }

  bool contains_simplex(const Complex& K, const Simplex& s) const {
    return std::all_of(s.begin(), s.end(), [&](VertexId v) { return contains(K.coordinates(v)); });
  }

  // Grid simplices meet an integer sub-box only in the face spanned by their
  // vertices inside it, so a vertex test decides intersection.
  bool meets_simplex(const Complex& K, const Simplex& s) const {
    return std::any_of(s.begin(), s.end(), [&](VertexId v) { return contains(K.coordinates(v)); });
  }

  bool contains_region(const GridRegion& o) const {
    for (std::size_t i = 0; i < lo.size(); ++i)
      if (o.lo[i] < lo[i] || o.hi[i] > hi[i]) return false;
    return true;
  }

  friend bool operator==(const GridRegion&, const GridRegion&) = default;
};

namespace detail {

inline std::vector<Simplex> maximal_simplices(const Complex& K) {
  std::vector<Simplex> out;
  std::vector<char> covered;
  for (int k = K.dimension(); k >= 0; --k) {
    std::vector<char> next(K.size(k - 1), 0);
    for (std::size_t i = 0; i < K.size(k); ++i) {
      bool is_face = !covered.empty() && covered[i];
      if (!is_face) out.push_back(K.simplex(k, i));
      if (k > 0)
        for (std::size_t j = 0; j <= static_cast<std::size_t>(k); ++j) next[K.face(k, i, j)] = 1;
    }
    covered = std::move(next);
  }
  return out;
}

inline Point barycenter(const Complex& K, const Simplex& s) {
  Point b(K.ambient_dimension(), Rational(0));
  for (VertexId v : s)
    for (std::size_t i = 0; i < b.size(); ++i) b[i] += K.coordinates(v)[i];
  for (auto& c : b) c /= static_cast<std::int64_t>(s.size());
  return b;
}

inline bool includes(const Simplex& outer, const Simplex& inner) {
  return std::includes(outer.begin(), outer.end(), inner.begin(), inner.end());
}

}  // namespace detail

/// Homotopy model of the open complement |K| \ |F|.
class ComplementModel {
 public:
  explicit ComplementModel(const FaceSet& F, ComplementModelKind kind = ComplementModelKind::stellar)
      : ambient_(F.complex()), kind_(kind), blocked_(F.vertex_mask()) {
    const Complex& K = *ambient_;
    const int d = F.cell_dimension();
    // closure of F
    closure_.resize(static_cast<std::size_t>(std::max(K.dimension(), 0) + 1));
    for (auto f : F.faces()) mark_closure(d, f);
    if (kind_ == ComplementModelKind::stellar)
      build_stellar();
    else
      build_barycentric();
  }

  const ComplexPtr& complex() const { return model_; }
  const ComplexPtr& ambient() const { return ambient_; }
  ComplementModelKind kind() const { return kind_; }

  /// True when some vertex of the simplex lies on |F|.
  bool touches(const Simplex& s) const {
    return std::any_of(s.begin(), s.end(), [&](VertexId v) { return v < blocked_.size() && blocked_[v]; });
  }

  bool touches(const Chain& c) const {
    for (const auto& [i, coef] : c.terms())
      if (touches(ambient_->simplex(c.dimension(), i))) return true;
    return false;
  }

  bool in_closure(int k, std::size_t i) const {
    return static_cast<std::size_t>(k) < closure_.size() && closure_[static_cast<std::size_t>(k)].count(i);
  }

  /// Image of an ambient chain whose support avoids |F|.
  Chain transfer(const Chain& c) const {
    if (touches(c)) throw RealizationError("chain support meets the face set");
    Chain out(model_, c.dimension());
    for (const auto& [i, coef] : c.terms()) {
      const Simplex& s = ambient_->simplex(c.dimension(), i);
      if (kind_ == ComplementModelKind::stellar) {
        out += Chain::simplex(model_, s, coef);
      } else {
        for (auto& [tuple, sign] : subdivide(c.dimension(), i)) out += Chain::simplex(model_, tuple, coef * sign);
      }
    }
    return out;
  }

 private:
  void mark_closure(int k, std::size_t i) {
    if (!closure_[static_cast<std::size_t>(k)].insert(i).second || k == 0) return;
    for (std::size_t j = 0; j <= static_cast<std::size_t>(k); ++j) mark_closure(k - 1, ambient_->face(k, i, j));
  }

  bool all_blocked(const Simplex& s) const {
    return std::all_of(s.begin(), s.end(), [&](VertexId v) { return blocked_[v]; });
  }

  void build_stellar() {
    const Complex& K = *ambient_;
    std::vector<Point> coords;
    for (VertexId v = 0; v < K.vertex_table_size(); ++v) coords.push_back(K.coordinates(v));

    std::vector<Simplex> tops = detail::maximal_simplices(K);
    std::vector<char> live(tops.size(), 1);
    std::vector<std::vector<std::size_t>> incident(coords.size());
    for (std::size_t t = 0; t < tops.size(); ++t)
      for (VertexId v : tops[t]) incident[v].push_back(t);

    for (int k = K.dimension(); k >= 1; --k) {
      for (std::size_t i = 0; i < K.size(k); ++i) {
        const Simplex& sigma = K.simplex(k, i);
        if (in_closure(k, i) || !all_blocked(sigma)) continue;
        const VertexId b = static_cast<VertexId>(coords.size());
        coords.push_back(detail::barycenter(K, sigma));
        incident.emplace_back();
        blocked_.push_back(0);
        const std::vector<std::size_t> candidates = incident[sigma.front()];
        for (std::size_t t : candidates) {
          if (!live[t] || !detail::includes(tops[t], sigma)) continue;
          live[t] = 0;
          Simplex rest;
          std::set_difference(tops[t].begin(), tops[t].end(), sigma.begin(), sigma.end(), std::back_inserter(rest));
          for (std::size_t drop = 0; drop < sigma.size(); ++drop) {
            Simplex s = rest;
            for (std::size_t v = 0; v < sigma.size(); ++v)
              if (v != drop) s.push_back(sigma[v]);
            s.push_back(b);
            std::sort(s.begin(), s.end());
            tops.push_back(s);
            live.push_back(1);
            for (VertexId v : s) incident[v].push_back(tops.size() - 1);
          }
        }
      }
    }

    std::vector<Simplex> generators;
    for (std::size_t t = 0; t < tops.size(); ++t) {
      if (!live[t]) continue;
      Simplex s;
      for (VertexId v : tops[t])
        if (!blocked_[v]) s.push_back(v);
      if (!s.empty()) generators.push_back(std::move(s));
    }
    model_ = Complex::from_simplices(K.ambient_dimension(), std::move(coords), K.scale(), std::move(generators));
  }

  VertexId global_id(int k, std::size_t i) const {
    return static_cast<VertexId>(offsets_[static_cast<std::size_t>(k)] + i);
  }

  void build_barycentric() {
    const Complex& K = *ambient_;
    std::vector<Point> coords;
    for (int k = 0; k <= K.dimension(); ++k) {
      offsets_.push_back(coords.size());
      for (const auto& s : K.simplices(k)) coords.push_back(detail::barycenter(K, s));
    }
    std::vector<Simplex> generators;
    for (const Simplex& top : detail::maximal_simplices(K)) {
      const int k = static_cast<int>(top.size()) - 1;
      const std::size_t top_idx = *K.find(top);
      if (in_closure(k, top_idx)) continue;
      Simplex order = top;
      do {
        Simplex flag;
        Simplex prefix;
        for (VertexId v : order) {
          prefix.insert(std::upper_bound(prefix.begin(), prefix.end(), v), v);
          const int pk = static_cast<int>(prefix.size()) - 1;
          const std::size_t idx = *K.find(prefix);
          if (!in_closure(pk, idx)) flag.push_back(global_id(pk, idx));
        }
        generators.push_back(std::move(flag));
      } while (std::next_permutation(order.begin(), order.end()));
    }
    model_ = Complex::from_simplices(K.ambient_dimension(), std::move(coords), K.scale(), std::move(generators));
  }

  // sd(s) = b(s) * sd(ds), as ordered vertex tuples with signs
  std::vector<std::pair<std::vector<VertexId>, int>> subdivide(int k, std::size_t i) const {
    if (k == 0) return {{{global_id(0, i)}, 1}};
    std::vector<std::pair<std::vector<VertexId>, int>> out;
    for (std::size_t j = 0; j <= static_cast<std::size_t>(k); ++j) {
      int sign = j % 2 == 0 ? 1 : -1;
      for (auto& [tuple, s] : subdivide(k - 1, ambient_->face(k, i, j))) {
        std::vector<VertexId> t{global_id(k, i)};
        t.insert(t.end(), tuple.begin(), tuple.end());
        out.emplace_back(std::move(t), s * sign);
      }
    }
    return out;
  }

  ComplexPtr ambient_;
  ComplementModelKind kind_;
  std::vector<char> blocked_;
  std::vector<std::unordered_set<std::size_t>> closure_;
  std::vector<std::size_t> offsets_;
  ComplexPtr model_;
};

inline ComplexPtr complement_subcomplex(const FaceSet& F, ComplementModelKind kind = ComplementModelKind::stellar) {
  return ComplementModel(F, kind).complex();
}

/// One member w_j of the constraint family, given by ambient vertex ids.
struct ConstraintCycle {
  enum class Kind { point_pair, polygonal_loop, general_cycle };

  struct Term {
    std::vector<VertexId> vertices;  // any order; permutation sign applies
    long long coefficient = 1;
    friend bool operator==(const Term&, const Term&) = default;
  };

  std::string id;
  Kind kind = Kind::point_pair;
  std::vector<VertexId> vertices;  // point pair (p, q) or closed loop v0 v1 ... (v0 implied at the end)
  std::vector<Term> terms;         // general cycle

  static ConstraintCycle point_pair(std::string id, VertexId p, VertexId q) {
    return {std::move(id), Kind::point_pair, {p, q}, {}};
  }
  static ConstraintCycle loop(std::string id, std::vector<VertexId> vs) {
    return {std::move(id), Kind::polygonal_loop, std::move(vs), {}};
  }
  static ConstraintCycle cycle(std::string id, std::vector<Term> terms) {
    return {std::move(id), Kind::general_cycle, {}, std::move(terms)};
  }

  /// Degree of the realized cycle.
  int degree() const {
    switch (kind) {
      case Kind::point_pair: return 0;
      case Kind::polygonal_loop: return 1;
      case Kind::general_cycle: return terms.empty() ? -1 : static_cast<int>(terms.front().vertices.size()) - 1;
    }
    return -1;
  }

  /// Every ambient simplex mentioned by the constraint.
  std::vector<Simplex> support() const {
    std::vector<Simplex> out;
    switch (kind) {
      case Kind::point_pair:
        for (VertexId v : vertices) out.push_back({v});
        break;
      case Kind::polygonal_loop:
        for (std::size_t i = 0; i < vertices.size(); ++i) {
          Simplex e{vertices[i], vertices[(i + 1) % vertices.size()]};
          std::sort(e.begin(), e.end());
          out.push_back(e);
        }
        break;
      case Kind::general_cycle:
        for (const auto& t : terms) {
          Simplex s = t.vertices;
          std::sort(s.begin(), s.end());
          out.push_back(s);
        }
        break;
    }
    return out;
  }

  friend bool operator==(const ConstraintCycle&, const ConstraintCycle&) = default;
};

inline const char* to_string(ConstraintCycle::Kind k) {
  switch (k) {
    case ConstraintCycle::Kind::point_pair: return "point-pair";
    case ConstraintCycle::Kind::polygonal_loop: return "polygonal-loop";
    case ConstraintCycle::Kind::general_cycle: return "general-cycle";
  }
  return "?";
}

struct RealizedConstraint {
  Chain chain;
  bool degenerate = false;  // the cycle cancels to zero
};

/// The constraint as a cycle of the ambient complex. Throws RealizationError
/// for unknown vertices, missing edges, a wrong degree, or a non-cycle.
inline RealizedConstraint constraint_chain(const ConstraintCycle& w, const ComplexPtr& K, int degree) {
  const auto& label = w.id;
  if (w.degree() != degree)
    throw RealizationError("constraint " + label + ": degree " + std::to_string(w.degree()) + " but the family needs " +
                           std::to_string(degree));
  for (const auto& s : w.support())
    for (VertexId v : s)
      if (v >= K->vertex_table_size() || !K->find({v})) throw RealizationError("constraint " + label + " leaves the box");
  Chain c(K, degree);
  auto add_simplex = [&](std::vector<VertexId> vs, long long coef) {
    std::vector<VertexId> sorted = vs;
    int sign = canonicalize(sorted);
    if (sign == 0) return;
    if (!K->find(sorted)) throw RealizationError("constraint " + label + " uses a simplex missing from the complex");
    c += Chain::simplex(K, std::move(vs), coef);
  };
  switch (w.kind) {
    case ConstraintCycle::Kind::point_pair:
      if (w.vertices.size() != 2) throw RealizationError("constraint " + label + ": a point pair needs two vertices");
      add_simplex({w.vertices[1]}, 1);
      add_simplex({w.vertices[0]}, -1);
      break;
    case ConstraintCycle::Kind::polygonal_loop:
      if (w.vertices.size() < 2) throw RealizationError("constraint " + label + ": a loop needs at least two vertices");
      for (std::size_t i = 0; i < w.vertices.size(); ++i)
        add_simplex({w.vertices[i], w.vertices[(i + 1) % w.vertices.size()]}, 1);
      break;
    case ConstraintCycle::Kind::general_cycle:
      for (const auto& t : w.terms) {
        if (static_cast<int>(t.vertices.size()) != degree + 1)
          throw RealizationError("constraint " + label + ": mixed simplex dimensions");
        add_simplex(t.vertices, t.coefficient);
      }
      break;
  }
  if (!is_cycle(c)) throw RealizationError("constraint " + label + " is not a cycle");
  const bool zero = c.is_zero();
  return {std::move(c), zero};
}

/// Realization inside a complement model; fails if the support meets |F|.
inline RealizedConstraint realize_constraint(const ConstraintCycle& w, const ComplementModel& model, int degree) {
  auto ambient = constraint_chain(w, model.ambient(), degree);
  for (const auto& s : w.support())
    if (model.touches(s)) throw RealizationError("constraint " + w.id + " meets the face set");
  return {model.transfer(ambient.chain), ambient.degenerate};
}

enum class ConstraintStatus { pass, homologically_killed, violated_by_contact };

inline const char* to_string(ConstraintStatus s) {
  switch (s) {
    case ConstraintStatus::pass: return "pass";
    case ConstraintStatus::homologically_killed: return "killed";
    case ConstraintStatus::violated_by_contact: return "contact";
  }
  return "?";
}

struct ConstraintVerdict {
  std::string id;
  ConstraintStatus status = ConstraintStatus::pass;
  bool degenerate = false;
  bool passed() const { return status == ConstraintStatus::pass; }
};

struct SpanningReport {
  std::vector<ConstraintVerdict> verdicts;
  std::size_t complement_rank = 0;  // rank of H_{n-d-1} of the complement model
  bool feasible() const {
    return std::all_of(verdicts.begin(), verdicts.end(), [](const auto& v) { return v.passed(); });
  }
};

/// Each w_j must stay non-zero in H_{n-d-1}(complement of F).
inline SpanningReport spanning_check(const FaceSet& F, const std::vector<ConstraintCycle>& constraints,
                                     ComplementModelKind kind = ComplementModelKind::stellar) {
  const int degree = static_cast<int>(F.complex()->ambient_dimension()) - F.cell_dimension() - 1;
  ComplementModel model(F, kind);
  SpanningReport report;
  if (degree >= 0 && degree <= model.complex()->dimension())
    report.complement_rank = homology_group(*model.complex(), degree).rank;
  for (const auto& w : constraints) {
    ConstraintVerdict v{w.id, ConstraintStatus::pass, false};
    auto ambient = constraint_chain(w, F.complex(), degree);
    v.degenerate = ambient.degenerate;
    bool contact = false;
    for (const auto& s : w.support()) contact = contact || model.touches(s);
    if (contact) {
      v.status = ConstraintStatus::violated_by_contact;
    } else if (is_null_homologous(model.transfer(ambient.chain)).null_homologous) {
      v.status = ConstraintStatus::homologically_killed;
    }
    report.verdicts.push_back(std::move(v));
  }
  return report;
}

struct CompetitorVerdict {
  bool boundary_match = false;
  std::vector<std::pair<std::string, bool>> survival;
  bool overall = false;
};

/// F is a competitor of E in B: same faces outside B, and every constraint
/// that is non-zero for E stays non-zero for F.
inline CompetitorVerdict competitor_check(const FaceSet& E, const FaceSet& F, const GridRegion& region,
                                          const std::vector<ConstraintCycle>& constraints,
                                          ComplementModelKind kind = ComplementModelKind::stellar) {
  if (E.complex() != F.complex() || E.cell_dimension() != F.cell_dimension())
    throw InvalidInput("competitor_check: E and F live in different ambient complexes");
  const Complex& K = *E.complex();
  const int d = E.cell_dimension();
  if (region.lo.size() != K.ambient_dimension() || region.hi.size() != K.ambient_dimension())
    throw InvalidInput("competitor_check: region dimension mismatch");

  auto outside = [&](const FaceSet& S) {
    std::vector<std::size_t> out;
    for (auto f : S.faces())
      if (!region.contains_simplex(K, K.simplex(d, f))) out.push_back(f);
    return out;
  };
  CompetitorVerdict verdict;
  verdict.boundary_match = outside(E) == outside(F);

  auto mask = E.vertex_mask();
  for (const auto& w : constraints)
    for (const auto& s : w.support()) {
      if (region.meets_simplex(K, s))
        throw PreconditionError("constraint " + w.id + " must avoid the modification region");
      for (VertexId v : s)
        if (v < mask.size() && mask[v]) throw PreconditionError("constraint " + w.id + " must avoid E");
    }

  auto for_e = spanning_check(E, constraints, kind);
  auto for_f = spanning_check(F, constraints, kind);
  verdict.overall = verdict.boundary_match;
  for (std::size_t j = 0; j < constraints.size(); ++j) {
    bool ok = !for_e.verdicts[j].passed() || for_f.verdicts[j].passed();
    verdict.survival.emplace_back(constraints[j].id, ok);
    verdict.overall = verdict.overall && ok;
  }
  return verdict;
}

/// A (d-1)-face of exactly one d-face of F; removing both is an elementary collapse.
struct FreeFace {
  std::size_t face;
  std::size_t coface;
  friend bool operator==(const FreeFace&, const FreeFace&) = default;
};

/// Free faces of F. Faces lying in the box boundary are pinned (the set
/// continues outside the box) and never free. With `within`, only collapses
/// whose coface lies inside the region are returned.
inline std::vector<FreeFace> free_faces(const FaceSet& F, const std::optional<GridRegion>& within = std::nullopt) {
  const Complex& K = *F.complex();
  const int d = F.cell_dimension();
  if (d < 1) return {};
  std::unordered_map<std::size_t, std::pair<int, std::size_t>> count;
  for (auto f : F.faces())
    for (std::size_t j = 0; j <= static_cast<std::size_t>(d); ++j) {
      auto& c = count[K.face(d, f, j)];
      ++c.first;
      c.second = f;
    }
  auto on_box_boundary = [&](const Simplex& s) {
    if (!K.grid()) return false;
    const auto& box = K.grid()->box;
    for (std::size_t axis = 0; axis < box.size(); ++axis) {
      for (std::int64_t wall : {std::int64_t{0}, static_cast<std::int64_t>(box[axis])}) {
        bool all = std::all_of(s.begin(), s.end(), [&](VertexId v) { return K.coordinates(v)[axis] == Rational(wall); });
        if (all) return true;
      }
    }
    return false;
  };
  std::vector<FreeFace> out;
  for (const auto& [face, c] : count) {
    if (c.first != 1) continue;
    if (on_box_boundary(K.simplex(d - 1, face))) continue;
    if (within && !within->contains_simplex(K, K.simplex(d, c.second))) continue;
    out.push_back({face, c.second});
  }
  std::sort(out.begin(), out.end(), [](const FreeFace& a, const FreeFace& b) {
    return std::pair(a.coface, a.face) < std::pair(b.coface, b.face);
  });
  return out;
}

inline FaceSet collapse(const FaceSet& F, const FreeFace& ff) {
  if (!F.contains(ff.coface)) throw PreconditionError("collapse: coface is not in the face set");
  std::size_t removed[] = {ff.coface};
  return F.with({}, removed);
}

}  // namespace topomin
