#pragma once

// Minimizing J_h(F) = sum over faces of h(barycenter) * vol_d(face) among face
// sets that keep every constraint cycle non-zero in the complement.
//
// Feasibility is upward closed on faces that avoid the constraint supports:
// adding faces shrinks the complement, and a cycle that bounds in a smaller
// open set bounds in a larger one. Both searches lean on this.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "topomin/complement.hpp"
#include "topomin/grassmann.hpp"

namespace topomin {

/// Weight h with recorded bounds 1 <= h <= M.
class WeightField {
 public:
  static WeightField constant(double h, double M) {
    WeightField w;
    w.M_ = M;
    w.default_ = h;
    w.check(h);
    return w;
  }

  /// Values sampled per face (keyed by face index), `fallback` elsewhere.
  static WeightField per_face(std::map<std::size_t, double> values, double fallback, double M) {
    WeightField w;
    w.M_ = M;
    w.default_ = fallback;
    w.check(fallback);
    for (const auto& [f, v] : values) w.check(v);
    w.table_ = std::move(values);
    return w;
  }

  /// h evaluated at face barycenters (in scaled coordinates).
  static WeightField function(std::function<double(const std::vector<double>&)> h, double M) {
    WeightField w;
    w.M_ = M;
    w.default_ = 1.0;
    w.fn_ = std::move(h);
    return w;
  }

  double value(const Complex& K, int d, std::size_t face) const {
    if (fn_) {
      std::vector<double> b(K.ambient_dimension(), 0.0);
      for (VertexId v : K.simplex(d, face)) {
        auto p = K.position(v);
        for (std::size_t i = 0; i < b.size(); ++i) b[i] += p[i] / static_cast<double>(d + 1);
      }
      double h = fn_(b);
      check(h);
      return h;
    }
    auto it = table_.find(face);
    return it == table_.end() ? default_ : it->second;
  }

  double upper_bound() const { return M_; }
  bool is_constant() const { return !fn_ && table_.empty(); }
  double constant_value() const { return default_; }
  const std::map<std::size_t, double>& table() const { return table_; }

 private:
  void check(double h) const {
    if (!(M_ >= 1.0)) throw InvalidInput("weight bound M must be at least 1");
    if (!(h >= 1.0 && h <= M_))
      throw InvalidInput("weight value " + std::to_string(h) + " violates 1 <= h <= M (M = " + std::to_string(M_) + ")");
  }

  double M_ = 1.0;
  double default_ = 1.0;
  std::map<std::size_t, double> table_;
  std::function<double(const std::vector<double>&)> fn_;
};

/// d-volume of a face from its vertex positions (Gram determinant).
inline double face_volume(const Complex& K, int d, std::size_t face) {
  if (d == 0) return 1.0;
  const Simplex& s = K.simplex(d, face);
  const auto origin = K.position(s[0]);
  Eigen::MatrixXd E(K.ambient_dimension(), d);
  for (int j = 0; j < d; ++j) {
    auto p = K.position(s[static_cast<std::size_t>(j) + 1]);
    for (std::size_t i = 0; i < p.size(); ++i) E(static_cast<Eigen::Index>(i), j) = p[i] - origin[i];
  }
  const double det = (E.transpose() * E).determinant();
  double fact = 1;
  for (int j = 2; j <= d; ++j) fact *= j;
  return std::sqrt(std::max(det, 0.0)) / fact;
}

inline double measure_Jh(const FaceSet& F, const WeightField& h) {
  double total = 0;
  for (auto f : F.faces()) total += h.value(*F.complex(), F.cell_dimension(), f) * face_volume(*F.complex(), F.cell_dimension(), f);
  return total;
}

struct Certificate {
  double lower_bound = 0;
  std::string method = "none";
};

struct SolveResult {
  FaceSet best;
  double objective = 0;
  Certificate certificate;
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
  std::uint64_t seed = 0;
  std::size_t accepted_moves = 0;
  std::size_t sideways_moves = 0;
  std::vector<double> trajectory;  // objective of every accepted state, starting with the initial one
};

namespace detail {

// Evaluates spanning feasibility with a memo keyed by face list.
class FeasibilityOracle {
 public:
  FeasibilityOracle(const std::vector<ConstraintCycle>& constraints, ComplementModelKind kind)
      : constraints_(constraints), kind_(kind) {}

  bool operator()(const FaceSet& F) {
    auto it = memo_.find(F.faces());
    if (it != memo_.end()) return it->second;
    ++evaluations;
    bool ok = spanning_check(F, constraints_, kind_).feasible();
    memo_.emplace(F.faces(), ok);
    return ok;
  }

  std::size_t evaluations = 0;

 private:
  const std::vector<ConstraintCycle>& constraints_;
  ComplementModelKind kind_;
  std::map<std::vector<std::size_t>, bool> memo_;
};

// Faces of the pool that touch a constraint support can never be feasible.
inline std::vector<char> contact_faces(const ComplexPtr& K, int d, const std::vector<ConstraintCycle>& constraints) {
  std::vector<char> mark(K->vertex_table_size(), 0);
  for (const auto& w : constraints)
    for (const auto& s : w.support())
      for (VertexId v : s)
        if (v < mark.size()) mark[v] = 1;
  std::vector<char> out(K->size(d), 0);
  for (std::size_t f = 0; f < out.size(); ++f)
    for (VertexId v : K->simplex(d, f))
      if (mark[v]) out[f] = 1;
  return out;
}

}  // namespace detail

inline constexpr std::size_t kExhaustivePoolCap = 30;

/// Global minimizer over subsets of the pool; ties go to the lexicographically
/// smallest sorted face-index list.
inline SolveResult minimize_exhaustive(const std::vector<ConstraintCycle>& constraints, const WeightField& h,
                                       const FaceSet& pool, double tol = 1e-9,
                                       ComplementModelKind kind = ComplementModelKind::stellar) {
  if (pool.size() > kExhaustivePoolCap)
    throw PoolTooLarge("candidate pool has " + std::to_string(pool.size()) + " faces; the exhaustive search is capped at " +
                       std::to_string(kExhaustivePoolCap) + ", use local search instead");
  const auto& K = pool.complex();
  const int d = pool.cell_dimension();
  // validate constraints up front so realization errors surface here
  for (const auto& w : constraints) constraint_chain(w, K, static_cast<int>(K->ambient_dimension()) - d - 1);

  auto contact = detail::contact_faces(K, d, constraints);
  std::vector<std::size_t> items;
  for (auto f : pool.faces())
    if (!contact[f]) items.push_back(f);
  std::vector<double> cost;
  for (auto f : items) cost.push_back(h.value(*K, d, f) * face_volume(*K, d, f));

  detail::FeasibilityOracle feasible(constraints, kind);
  SolveResult result{FaceSet(K, d), 0, {}, 0, 0, 0, 0, 0, {}};
  if (!feasible(FaceSet(K, d, items))) {
    throw InfeasibleError("no subset of the candidate pool satisfies the spanning constraints");
  }

  std::optional<std::vector<std::size_t>> best;
  double best_cost = 0;
  std::vector<std::size_t> chosen;
  double chosen_cost = 0;

  // include-first DFS visits index sets in lexicographic order
  std::function<void(std::size_t)> visit = [&](std::size_t i) {
    ++result.iterations;
    if (best && chosen_cost > best_cost + tol) return;
    if (feasible(FaceSet(K, d, chosen))) {
      if (!best || chosen_cost < best_cost - tol) {
        best = chosen;
        best_cost = chosen_cost;
      }
      return;  // supersets cost strictly more
    }
    if (i == items.size()) return;
    chosen.push_back(items[i]);
    chosen_cost += cost[i];
    visit(i + 1);
    chosen.pop_back();
    chosen_cost -= cost[i];
    // excluding items[i]: the optimistic completion must still be feasible
    std::vector<std::size_t> optimistic = chosen;
    optimistic.insert(optimistic.end(), items.begin() + static_cast<std::ptrdiff_t>(i) + 1, items.end());
    if (feasible(FaceSet(K, d, optimistic))) visit(i + 1);
  };
  visit(0);

  result.best = FaceSet(K, d, *best);
  result.objective = measure_Jh(result.best, h);
  result.certificate = {result.objective, "exhaustive"};
  result.evaluations = feasible.evaluations;
  result.trajectory = {result.objective};
  return result;
}

struct LocalSearchOptions {
  std::size_t budget = 10000;  // spanning evaluations
  std::uint64_t seed = 0;
  double tol = 1e-9;
  std::size_t plateau_limit = 32;  // consecutive equal-cost moves per descent
  ComplementModelKind kind = ComplementModelKind::stellar;
  std::function<void(const FaceSet&, double)> on_accept;  // every accepted state of the incumbent chain
};

namespace detail {

class LocalSearch {
 public:
  LocalSearch(const std::vector<ConstraintCycle>& constraints, const WeightField& h, const FaceSet& pool,
              const LocalSearchOptions& opt)
      : K_(pool.complex()),
        d_(pool.cell_dimension()),
        h_(h),
        opt_(opt),
        rng_(opt.seed),
        feasible_(constraints, opt.kind) {
    auto contact = contact_faces(K_, d_, constraints);
    for (auto f : pool.faces())
      if (!contact[f]) pool_.push_back(f);
    std::sort(pool_.begin(), pool_.end());
    incident_.resize(K_->vertex_table_size());
    for (auto f : pool_)
      for (VertexId v : K_->simplex(d_, f)) incident_[v].push_back(f);
    contact_ = std::move(contact);
  }

  bool evaluate(const std::vector<std::size_t>& faces) {
    ++evaluations;
    return feasible_(FaceSet(K_, d_, faces));
  }

  bool exhausted() const { return evaluations >= opt_.budget; }

  double cost(std::size_t f) {
    auto it = cost_.find(f);
    if (it != cost_.end()) return it->second;
    return cost_[f] = h_.value(*K_, d_, f) * face_volume(*K_, d_, f);
  }

  double total(const std::vector<std::size_t>& faces) {
    double s = 0;
    for (auto f : faces) s += cost(f);
    return s;
  }

  struct Move {
    std::vector<std::size_t> removed;
    std::vector<std::size_t> added;
    double delta;
  };

  bool shares_vertex(std::size_t a, std::size_t b) const {
    const auto& sa = K_->simplex(d_, a);
    const auto& sb = K_->simplex(d_, b);
    for (VertexId v : sa)
      if (std::find(sb.begin(), sb.end(), v) != sb.end()) return true;
    return false;
  }

  // Pool faces outside `current` sharing a vertex with any removed face.
  std::vector<std::size_t> neighbours(const std::set<std::size_t>& current, const std::vector<std::size_t>& removed) {
    std::set<std::size_t> out;
    for (auto r : removed)
      for (VertexId v : K_->simplex(d_, r))
        for (auto f : incident_[v])
          if (!current.count(f)) out.insert(f);
    return {out.begin(), out.end()};
  }

  // Collapses first, then removals and exchanges of at most two faces each.
  std::vector<Move> moves(const std::vector<std::size_t>& faces) {
    std::set<std::size_t> current(faces.begin(), faces.end());
    std::vector<Move> collapses, others;
    std::set<std::size_t> collapsible;
    for (const auto& ff : free_faces(FaceSet(K_, d_, faces))) {
      if (collapsible.insert(ff.coface).second) collapses.push_back({{ff.coface}, {}, -cost(ff.coface)});
    }
    std::vector<std::vector<std::size_t>> removal_sets;
    for (auto a : faces) removal_sets.push_back({a});
    for (std::size_t i = 0; i < faces.size(); ++i)
      for (std::size_t j = i + 1; j < faces.size(); ++j)
        if (shares_vertex(faces[i], faces[j])) removal_sets.push_back({faces[i], faces[j]});
    for (const auto& rem : removal_sets) {
      double out = 0;
      for (auto r : rem) out += cost(r);
      if (!(rem.size() == 1 && collapsible.count(rem[0]))) others.push_back({rem, {}, -out});
      auto nb = neighbours(current, rem);
      for (std::size_t i = 0; i < nb.size(); ++i) {
        others.push_back({rem, {nb[i]}, cost(nb[i]) - out});
        if (rem.size() == 2)
          for (std::size_t j = i + 1; j < nb.size(); ++j)
            others.push_back({rem, {nb[i], nb[j]}, cost(nb[i]) + cost(nb[j]) - out});
      }
    }
    std::shuffle(collapses.begin(), collapses.end(), rng_);
    std::shuffle(others.begin(), others.end(), rng_);
    collapses.insert(collapses.end(), others.begin(), others.end());
    return collapses;
  }

  static std::vector<std::size_t> apply(const std::vector<std::size_t>& faces, const Move& m) {
    std::vector<std::size_t> out;
    for (auto f : faces)
      if (std::find(m.removed.begin(), m.removed.end(), f) == m.removed.end()) out.push_back(f);
    out.insert(out.end(), m.added.begin(), m.added.end());
    std::sort(out.begin(), out.end());
    return out;
  }

  // Improving moves first; on a plateau, equal-cost moves to unvisited states.
  // Returns the lowest state met; `trace` receives each accepted objective.
  std::vector<std::size_t> descend(std::vector<std::size_t> state, std::vector<double>* trace, std::size_t* accepted,
                                   std::size_t* sideways) {
    double value = total(state);
    std::vector<std::size_t> lowest = state;
    double lowest_value = value;
    std::set<std::vector<std::size_t>> visited{state};
    std::size_t plateau = 0;
    while (!exhausted()) {
      ++iterations;
      auto candidates = moves(state);
      std::optional<std::vector<std::size_t>> next;
      double next_value = 0;
      bool improving = false;
      for (int pass = 0; pass < 2 && !next; ++pass) {
        if (pass == 1 && plateau >= opt_.plateau_limit) break;
        for (const auto& m : candidates) {
          bool ok_delta = pass == 0 ? m.delta < -opt_.tol : std::abs(m.delta) <= opt_.tol;
          if (!ok_delta) continue;
          auto cand = apply(state, m);
          if (pass == 1 && visited.count(cand)) continue;
          if (exhausted()) break;
          if (evaluate(cand)) {
            next = std::move(cand);
            next_value = total(*next);
            improving = pass == 0;
            break;
          }
        }
      }
      if (!next) break;
      state = std::move(*next);
      value = next_value;
      visited.insert(state);
      plateau = improving ? 0 : plateau + 1;
      if (improving && accepted) ++*accepted;
      if (!improving && sideways) ++*sideways;
      if (trace) {
        trace->push_back(value);
        if (opt_.on_accept) opt_.on_accept(FaceSet(K_, d_, state), value);
      }
      if (value < lowest_value - opt_.tol) {
        lowest = state;
        lowest_value = value;
      }
    }
    return lowest;
  }

  // Supersets of a feasible set stay feasible (faces avoid the constraints).
  std::vector<std::size_t> kick(const std::vector<std::size_t>& base) {
    std::set<std::size_t> s(base.begin(), base.end());
    std::vector<std::size_t> outside;
    for (auto f : pool_)
      if (!s.count(f)) outside.push_back(f);
    if (outside.empty()) return base;
    std::uniform_int_distribution<int> coin(0, 3);
    if (pool_.size() <= 64 && coin(rng_) == 0) return pool_;
    std::shuffle(outside.begin(), outside.end(), rng_);
    std::uniform_int_distribution<std::size_t> count(1, std::min<std::size_t>(4, outside.size()));
    std::size_t k = count(rng_);
    s.insert(outside.begin(), outside.begin() + static_cast<std::ptrdiff_t>(k));
    return {s.begin(), s.end()};
  }

  const std::vector<char>& contact() const { return contact_; }

  std::size_t evaluations = 0;
  std::size_t iterations = 0;

 private:
  ComplexPtr K_;
  int d_;
  const WeightField& h_;
  LocalSearchOptions opt_;
  std::mt19937_64 rng_;
  FeasibilityOracle feasible_;
  std::vector<std::size_t> pool_;
  std::vector<char> contact_;
  std::vector<std::vector<std::size_t>> incident_;
  std::unordered_map<std::size_t, double> cost_;
};

}  // namespace detail

/// Descent from a feasible init by collapses and bounded exchanges, followed
/// by perturb-and-descend rounds until the evaluation budget is spent. The
/// incumbent only changes on strict improvement. Additions come from `pool`
/// (all d-faces when omitted).
inline SolveResult minimize_local(const std::vector<ConstraintCycle>& constraints, const WeightField& h,
                                  const FaceSet& init, const LocalSearchOptions& opt = {},
                                  std::optional<FaceSet> pool = std::nullopt) {
  const auto& K = init.complex();
  const int d = init.cell_dimension();
  FaceSet candidates = pool ? *pool : FaceSet::all(K, d);
  if (candidates.complex() != K || candidates.cell_dimension() != d)
    throw InvalidInput("candidate pool lives in a different complex");
  if (!spanning_check(init, constraints, opt.kind).feasible())
    throw PreconditionError("local search needs a feasible initial face set");

  // faces of init join the pool so exchanges can restore them
  std::vector<std::size_t> merged = candidates.faces();
  merged.insert(merged.end(), init.faces().begin(), init.faces().end());
  detail::LocalSearch search(constraints, h, FaceSet(K, d, merged), opt);

  SolveResult result{init, measure_Jh(init, h), {}, 0, 0, opt.seed, 0, 0, {}};
  result.trajectory.push_back(result.objective);
  std::vector<std::size_t> best = init.faces();
  double best_value = result.objective;
  if (opt.budget > 0) {
    auto low = search.descend(best, &result.trajectory, &result.accepted_moves, &result.sideways_moves);
    if (search.total(low) < best_value - opt.tol) {
      best = low;
      best_value = search.total(low);
    }
    while (!search.exhausted()) {
      auto start = search.kick(best);
      if (start == best) break;
      auto candidate = search.descend(start, nullptr, nullptr, nullptr);
      const double v = search.total(candidate);
      if (v < best_value - opt.tol) {
        best = candidate;
        best_value = v;
        ++result.accepted_moves;
        result.trajectory.push_back(v);
        if (opt.on_accept) opt.on_accept(FaceSet(K, d, best), v);
      }
    }
  }
  result.best = FaceSet(K, d, best);
  result.objective = measure_Jh(result.best, h);
  result.evaluations = search.evaluations;
  result.iterations = search.iterations;
  return result;
}

/// Affine plane origin + span(frame) in R^4 with a target region in plane coordinates.
struct ProjectionTarget {
  Vec4 origin = Vec4::Zero();
  Plane frame = Plane::coordinate(1, 2);
  enum class Shape { rectangle, disk } shape = Shape::rectangle;
  Eigen::Vector2d lo{0, 0};  // rectangle corner, or disk center
  Eigen::Vector2d hi{1, 1};  // opposite corner; hi.x() is the radius for a disk

  double region_area() const {
    if (shape == Shape::disk) return std::numbers::pi * hi.x() * hi.x();
    return (hi - lo).prod();
  }
};

struct ProjectionBound {
  double area1 = 0;
  double area2 = 0;
  double lambda = 1;
  double bound = 0;
};

namespace detail {

// Area of region ∩ (union of projected triangles), by pixel centers.
inline double rasterized_area(const std::vector<std::array<Eigen::Vector2d, 3>>& tris, const ProjectionTarget& t,
                              std::size_t N) {
  Eigen::Vector2d lo = t.lo, hi = t.hi;
  if (t.shape == ProjectionTarget::Shape::disk) {
    lo = t.lo.array() - t.hi.x();
    hi = t.lo.array() + t.hi.x();
  }
  const double wx = (hi.x() - lo.x()) / static_cast<double>(N);
  const double wy = (hi.y() - lo.y()) / static_cast<double>(N);
  std::vector<char> hit(N * N, 0);
  const double eps = 1e-12 * std::max({1.0, std::abs(hi.x() - lo.x()), std::abs(hi.y() - lo.y())});
  for (const auto& tri : tris) {
    auto cross = [](const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& p) {
      return (b.x() - a.x()) * (p.y() - a.y()) - (b.y() - a.y()) * (p.x() - a.x());
    };
    const double area2 = cross(tri[0], tri[1], tri[2]);
    if (std::abs(area2) <= eps * eps) continue;  // segment: no area
    const double orient = area2 > 0 ? 1.0 : -1.0;
    double minx = std::min({tri[0].x(), tri[1].x(), tri[2].x()}), maxx = std::max({tri[0].x(), tri[1].x(), tri[2].x()});
    double miny = std::min({tri[0].y(), tri[1].y(), tri[2].y()}), maxy = std::max({tri[0].y(), tri[1].y(), tri[2].y()});
    auto clampi = [&](double v) { return std::clamp<long long>(static_cast<long long>(v), 0, static_cast<long long>(N) - 1); };
    long long i0 = clampi(std::floor((minx - lo.x()) / wx - 0.5)), i1 = clampi(std::ceil((maxx - lo.x()) / wx - 0.5));
    long long j0 = clampi(std::floor((miny - lo.y()) / wy - 0.5)), j1 = clampi(std::ceil((maxy - lo.y()) / wy - 0.5));
    for (long long j = j0; j <= j1; ++j)
      for (long long i = i0; i <= i1; ++i) {
        Eigen::Vector2d p(lo.x() + (static_cast<double>(i) + 0.5) * wx, lo.y() + (static_cast<double>(j) + 0.5) * wy);
        if (orient * cross(tri[0], tri[1], p) >= -eps && orient * cross(tri[1], tri[2], p) >= -eps &&
            orient * cross(tri[2], tri[0], p) >= -eps)
          hit[static_cast<std::size_t>(j) * N + static_cast<std::size_t>(i)] = 1;
      }
  }
  std::size_t count = 0;
  for (std::size_t j = 0; j < N; ++j)
    for (std::size_t i = 0; i < N; ++i) {
      if (!hit[j * N + i]) continue;
      if (t.shape == ProjectionTarget::Shape::disk) {
        Eigen::Vector2d p(lo.x() + (static_cast<double>(i) + 0.5) * wx, lo.y() + (static_cast<double>(j) + 0.5) * wy);
        if ((p - t.lo).norm() > t.hi.x()) continue;
      }
      ++count;
    }
  return static_cast<double>(count) * wx * wy;
}

}  // namespace detail

/// (area(p1 F ∩ region1) + area(p2 F ∩ region2)) / lambda with lambda = 1 for
/// orthogonal planes and 1 + 2 cos(alpha1) otherwise.
inline ProjectionBound projection_lower_bound(const FaceSet& F, const ProjectionTarget& t1, const ProjectionTarget& t2,
                                              std::size_t raster = 1024) {
  const auto& K = *F.complex();
  if (F.cell_dimension() != 2 || K.ambient_dimension() != 4)
    throw InvalidInput("projection bound needs 2-dimensional faces in R^4");
  if (raster == 0) throw InvalidInput("raster resolution must be positive");
  auto project = [&](const ProjectionTarget& t) {
    std::vector<std::array<Eigen::Vector2d, 3>> out;
    for (auto f : F.faces()) {
      std::array<Eigen::Vector2d, 3> tri;
      const auto& s = K.simplex(2, f);
      for (std::size_t k = 0; k < 3; ++k) {
        auto p = K.position(s[k]);
        tri[k] = t.frame.project(Vec4(p[0], p[1], p[2], p[3]) - t.origin);
      }
      out.push_back(tri);
    }
    return out;
  };
  ProjectionBound b;
  b.area1 = detail::rasterized_area(project(t1), t1, raster);
  b.area2 = detail::rasterized_area(project(t2), t2, raster);
  b.lambda = PlanePair(t1.frame, t2.frame).bound();
  b.bound = (b.area1 + b.area2) / b.lambda;
  return b;
}

}  // namespace topomin
