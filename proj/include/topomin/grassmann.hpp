#pragma once

// 2-vectors in R^4, projections onto 2-planes, and the projection-sum bounds
// |p1(xi)| + |p2(xi)| <= 1 (orthogonal planes) and <= 1 + 2 cos(a1) in general.

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <tuple>
#include <utility>
#include <vector>

#include "topomin/integer.hpp"

namespace topomin {

using Vec4 = Eigen::Vector4d;

/// Coordinates in the basis e12, e13, e14, e23, e24, e34.
struct TwoVector {
  std::array<double, 6> c{};

  static constexpr std::array<std::pair<int, int>, 6> basis{{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

  static TwoVector e(int i, int j) {  // 1-based, i < j
    TwoVector t;
    for (std::size_t k = 0; k < 6; ++k)
      if (basis[k] == std::pair{i - 1, j - 1}) t.c[k] = 1.0;
    return t;
  }

  double dot(const TwoVector& o) const {
    double s = 0;
    for (std::size_t k = 0; k < 6; ++k) s += c[k] * o.c[k];
    return s;
  }
  double norm() const { return std::sqrt(dot(*this)); }
  /// l12 l34 - l13 l24 + l14 l23; zero exactly on simple 2-vectors.
  double plucker() const { return c[0] * c[5] - c[1] * c[4] + c[2] * c[3]; }

  TwoVector operator+(const TwoVector& o) const {
    TwoVector t;
    for (std::size_t k = 0; k < 6; ++k) t.c[k] = c[k] + o.c[k];
    return t;
  }
  TwoVector operator-() const { return -1.0 * *this; }
  friend TwoVector operator*(double s, const TwoVector& a) {
    TwoVector t;
    for (std::size_t k = 0; k < 6; ++k) t.c[k] = s * a.c[k];
    return t;
  }
};

inline TwoVector wedge(const Vec4& x, const Vec4& y) {
  TwoVector t;
  for (std::size_t k = 0; k < 6; ++k) {
    auto [i, j] = TwoVector::basis[k];
    t.c[k] = x[i] * y[j] - x[j] * y[i];
  }
  return t;
}

inline bool is_simple(const TwoVector& xi, double tol = 1e-9) {
  return std::abs(xi.plucker()) <= tol * xi.dot(xi);
}

/// Oriented 2-plane through the origin with an orthonormal frame.
class Plane {
 public:
  /// Requires an orthonormal pair (to 1e-12).
  Plane(const Vec4& a, const Vec4& b) : a_(a), b_(b) {
    if (std::abs(a.norm() - 1) > 1e-12 || std::abs(b.norm() - 1) > 1e-12 || std::abs(a.dot(b)) > 1e-12)
      throw InvalidInput("plane frame is not orthonormal");
  }

  /// Gram-Schmidt on two spanning vectors.
  static Plane span(const Vec4& x, const Vec4& y) {
    const double nx = x.norm();
    if (nx < 1e-12) throw InvalidInput("degenerate plane frame");
    Vec4 a = x / nx;
    Vec4 b = y - y.dot(a) * a;
    const double nb = b.norm();
    if (nb < 1e-12 * std::max(1.0, y.norm())) throw InvalidInput("degenerate plane frame");
    b /= nb;
    // one more pass keeps the frame orthonormal to rounding
    b -= b.dot(a) * a;
    return Plane(a, b.normalized());
  }

  static Plane coordinate(int i, int j) {  // 1-based axes
    return Plane(Vec4::Unit(i - 1), Vec4::Unit(j - 1));
  }

  const Vec4& first() const { return a_; }
  const Vec4& second() const { return b_; }
  TwoVector orientation() const { return wedge(a_, b_); }

  Eigen::Vector2d project(const Vec4& x) const { return {x.dot(a_), x.dot(b_)}; }

 private:
  Vec4 a_;
  Vec4 b_;
};

/// Norm of the induced map on 2-vectors applied to xi. The image of every
/// e_i ^ e_j is a multiple of a ^ b, so this is |<xi, a ^ b>|.
inline double plane_projection_norm(const Plane& P, const TwoVector& xi) {
  return std::abs(xi.dot(P.orientation()));
}

/// Principal angles, ascending, in [0, pi/2].
inline std::pair<double, double> characteristic_angles(const Plane& P, const Plane& Q) {
  Eigen::Matrix2d M;
  M << P.first().dot(Q.first()), P.first().dot(Q.second()), P.second().dot(Q.first()), P.second().dot(Q.second());
  Eigen::JacobiSVD<Eigen::Matrix2d> svd(M);
  auto s = svd.singularValues();  // descending
  auto angle = [](double c) { return std::acos(std::clamp(c, 0.0, 1.0)); };
  return {angle(s[0]), angle(s[1])};
}

struct PlanePair {
  Plane P1;
  Plane P2;
  double alpha1;
  double alpha2;

  PlanePair(Plane p1, Plane p2) : P1(std::move(p1)), P2(std::move(p2)) {
    std::tie(alpha1, alpha2) = characteristic_angles(P1, P2);
  }

  /// Every vector of P1 is orthogonal to every vector of P2.
  bool orthogonal(double tol = 1e-12) const {
    return std::abs(P1.first().dot(P2.first())) <= tol && std::abs(P1.first().dot(P2.second())) <= tol &&
           std::abs(P1.second().dot(P2.first())) <= tol && std::abs(P1.second().dot(P2.second())) <= tol;
  }

  double bound() const { return orthogonal() ? 1.0 : 1.0 + 2.0 * std::cos(alpha1); }

  double projection_sum(const TwoVector& xi) const {
    return plane_projection_norm(P1, xi) + plane_projection_norm(P2, xi);
  }

  static PlanePair coordinate_orthogonal() { return {Plane::coordinate(1, 2), Plane::coordinate(3, 4)}; }

  /// P1 = e1 e2, P2 = span(cos t e1 + sin t e3, cos f e2 + sin f e4): angles (t, f) for t <= f.
  static PlanePair with_angles(double theta, double phi) {
    Vec4 x(std::cos(theta), 0, std::sin(theta), 0);
    Vec4 y(0, std::cos(phi), 0, std::sin(phi));
    return {Plane::coordinate(1, 2), Plane(x, y)};
  }
};

/// x ^ y with x = cos a v1 + sin a u1, y = cos a v2 + sin a u2, for an orthogonal pair.
inline TwoVector equality_family(const PlanePair& pair, double alpha) {
  if (!pair.orthogonal()) throw PreconditionError("equality_family needs an orthogonal plane pair");
  const double c = std::cos(alpha), s = std::sin(alpha);
  Vec4 x = c * pair.P1.first() + s * pair.P2.first();
  Vec4 y = c * pair.P1.second() + s * pair.P2.second();
  return wedge(x, y);
}

/// Uniform random simple unit 2-vector: orthonormalized Gaussian pair.
template <class Rng>
TwoVector random_unit_simple(Rng& rng) {
  std::normal_distribution<double> g;
  while (true) {
    Vec4 x(g(rng), g(rng), g(rng), g(rng));
    Vec4 y(g(rng), g(rng), g(rng), g(rng));
    const double nx = x.norm();
    if (nx < 1e-9) continue;
    x /= nx;
    y -= y.dot(x) * x;
    const double ny = y.norm();
    if (ny < 1e-9) continue;
    return wedge(x, y / ny);
  }
}

/// Random plane through the origin.
template <class Rng>
Plane random_plane(Rng& rng) {
  std::normal_distribution<double> g;
  while (true) {
    Vec4 x(g(rng), g(rng), g(rng), g(rng));
    Vec4 y(g(rng), g(rng), g(rng), g(rng));
    try {
      return Plane::span(x, y);
    } catch (const InvalidInput&) {
    }
  }
}

struct ProjectionBoundReport {
  double max_sum = 0;
  double bound = 0;
  double margin = 0;  // bound - max_sum
  std::size_t samples = 0;
  std::size_t injected = 0;
  std::uint64_t seed = 0;
};

/// Largest |p1 xi| + |p2 xi| over `samples` random simple unit 2-vectors plus
/// any injected ones.
inline ProjectionBoundReport verify_projection_bounds(const PlanePair& pair, std::size_t samples, std::uint64_t seed,
                                                      const std::vector<TwoVector>& injected = {}) {
  if (samples == 0 && injected.empty()) throw InvalidInput("at least one sample is required");
  std::mt19937_64 rng(seed);
  ProjectionBoundReport r;
  r.bound = pair.bound();
  r.samples = samples;
  r.injected = injected.size();
  r.seed = seed;
  for (std::size_t i = 0; i < samples; ++i) r.max_sum = std::max(r.max_sum, pair.projection_sum(random_unit_simple(rng)));
  for (const auto& xi : injected) r.max_sum = std::max(r.max_sum, pair.projection_sum(xi));
  r.margin = r.bound - r.max_sum;
  return r;
}

using Triangle4 = std::array<Vec4, 3>;

inline double triangle_area(const Triangle4& t) { return 0.5 * wedge(t[1] - t[0], t[2] - t[0]).norm(); }

inline double projected_triangle_area(const Plane& P, const Triangle4& t) {
  Eigen::Vector2d a = P.project(t[0]), b = P.project(t[1]), c = P.project(t[2]);
  Eigen::Vector2d u = b - a, v = c - a;
  return 0.5 * std::abs(u.x() * v.y() - u.y() * v.x());
}

/// Unit tangent 2-vector of a triangle.
inline TwoVector tangent(const Triangle4& t) {
  TwoVector w = wedge(t[1] - t[0], t[2] - t[0]);
  const double n = w.norm();
  if (n < 1e-14) throw InvalidInput("degenerate triangle");
  return (1.0 / n) * w;
}

struct AreaSums {
  double projected1 = 0;
  double projected2 = 0;
  double lambda = 0;
  double area = 0;
  double lambda_area() const { return lambda * area; }
};

/// Per-triangle projected areas summed over the set, and lambda = the largest
/// per-triangle projection sum.
inline AreaSums projected_area_sums(const std::vector<Triangle4>& triangles, const PlanePair& pair) {
  AreaSums s;
  for (const auto& t : triangles) {
    const TwoVector xi = tangent(t);
    s.projected1 += projected_triangle_area(pair.P1, t);
    s.projected2 += projected_triangle_area(pair.P2, t);
    s.area += triangle_area(t);
    s.lambda = std::max(s.lambda, pair.projection_sum(xi));
  }
  return s;
}

}  // namespace topomin
