#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "solver_support.hpp"
#include "test_support.hpp"

using namespace topomin;
using namespace testing_support;

namespace {

// Oracle: every subset of the pool, checked directly; min J then lexicographic.
std::pair<std::vector<std::size_t>, double> brute_force(const PlanarInstance& I) {
  const auto& items = I.pool.faces();
  std::optional<std::vector<std::size_t>> best;
  double best_J = 0;
  for (std::uint32_t mask = 0; mask < (1u << items.size()); ++mask) {
    std::vector<std::size_t> faces;
    for (std::size_t i = 0; i < items.size(); ++i)
      if (mask & (1u << i)) faces.push_back(items[i]);
    FaceSet F(I.K, 1, faces);
    if (!spanning_check(F, I.constraints).feasible()) continue;
    double J = measure_Jh(F, I.h);
    if (!best || J < best_J - 1e-9 || (std::abs(J - best_J) <= 1e-9 && F.faces() < *best)) {
      best = F.faces();
      best_J = J;
    }
  }
  return {*best, best_J};
}

double heron(double a, double b, double c) {
  double s = (a + b + c) / 2;
  return std::sqrt(s * (s - a) * (s - b) * (s - c));
}

}  // namespace

TEST(Measure, Examples) {
  std::vector<Point> pts{{Rational(0), Rational(0), Rational(0)},
                         {Rational(1), Rational(0), Rational(0)},
                         {Rational(0), Rational(2), Rational(0)}};
  auto K = Complex::from_simplices(3, pts, 1.0, {{0, 1, 2}});
  FaceSet F(K, 2, {0});
  EXPECT_DOUBLE_EQ(measure_Jh(F, WeightField::constant(1, 1)), 1.0);
  EXPECT_EQ(measure_Jh(FaceSet(K, 2), WeightField::constant(1, 1)), 0.0);
  auto G = build_grid_complex(3, {2, 2, 1});
  auto all = FaceSet::all(G, 2);
  EXPECT_DOUBLE_EQ(measure_Jh(all, WeightField::constant(2, 3)), 2 * measure_Jh(all, WeightField::constant(1, 3)));
}

TEST(Measure, VolumesMatchElementaryFormulas) {
  auto K = build_grid_complex(3, {1, 1, 1}, 0.5);
  for (std::size_t e = 0; e < K->size(1); ++e) {
    auto a = K->position(K->simplex(1, e)[0]), b = K->position(K->simplex(1, e)[1]);
    double len = 0;
    for (int i = 0; i < 3; ++i) len += (a[i] - b[i]) * (a[i] - b[i]);
    EXPECT_NEAR(face_volume(*K, 1, e), std::sqrt(len), 1e-14);
  }
  for (std::size_t t = 0; t < K->size(2); ++t) {
    const auto& s = K->simplex(2, t);
    auto dist = [&](VertexId u, VertexId v) {
      auto p = K->position(u), q = K->position(v);
      double r = 0;
      for (int i = 0; i < 3; ++i) r += (p[i] - q[i]) * (p[i] - q[i]);
      return std::sqrt(r);
    };
    EXPECT_NEAR(face_volume(*K, 2, t), heron(dist(s[0], s[1]), dist(s[1], s[2]), dist(s[0], s[2])), 1e-12);
  }
  double total = 0;
  for (std::size_t i = 0; i < K->size(3); ++i) total += face_volume(*K, 3, i);
  EXPECT_NEAR(total, 0.125, 1e-14);
}

TEST(Weight, BoundsAreEnforced) {
  EXPECT_THROW(WeightField::constant(0.5, 2), InvalidInput);
  EXPECT_THROW(WeightField::constant(3, 2), InvalidInput);
  EXPECT_THROW(WeightField::per_face({{0, 1.5}, {1, 0.9}}, 1, 2), InvalidInput);
  auto K = build_grid_complex(2, {1, 1});
  auto w = WeightField::function([](const std::vector<double>& x) { return 1 + x[0]; }, 1.2);
  EXPECT_THROW(measure_Jh(FaceSet::all(K, 1), w), InvalidInput);
  auto ok = WeightField::function([](const std::vector<double>& x) { return 1 + x[0]; }, 2);
  EXPECT_GT(measure_Jh(FaceSet::all(K, 1), ok), measure_Jh(FaceSet::all(K, 1), WeightField::constant(1, 1)));
}

TEST(Exhaustive, TwoByTwoSeparation) {
  for (double scale : {1.0, 0.5}) {
    auto K = build_grid_complex(2, {2, 2}, scale);
    auto w = ConstraintCycle::point_pair("w", at(K, {1, 0}), at(K, {1, 2}));
    auto r = minimize_exhaustive({w}, WeightField::constant(1, 1), FaceSet::all(K, 1));
    auto row = faces_where(K, 1, [](auto p) { return p[1] == 1; });
    EXPECT_EQ(r.best, row);
    EXPECT_NEAR(r.objective, 2 * scale, 1e-12);
    EXPECT_EQ(r.certificate.method, "exhaustive");
    EXPECT_TRUE(spanning_check(r.best, {w}).feasible());
  }
}

TEST(Exhaustive, NoConstraintsGivesEmptySet) {
  auto K = build_grid_complex(2, {2, 2});
  auto r = minimize_exhaustive({}, WeightField::constant(1, 1), FaceSet::all(K, 1));
  EXPECT_TRUE(r.best.empty());
  EXPECT_EQ(r.objective, 0.0);
}

TEST(Exhaustive, InfeasibleAndOversizedPools) {
  auto K = build_grid_complex(2, {2, 2});
  auto w = ConstraintCycle::point_pair("w", at(K, {1, 0}), at(K, {1, 2}));
  // every candidate touches a constraint point
  auto touching = faces_where(K, 1, [](auto p) { return p[0] == 1 && p[1] != 1; });
  EXPECT_THROW(minimize_exhaustive({w}, WeightField::constant(1, 1), touching), InfeasibleError);
  auto big = build_grid_complex(2, {3, 3});
  EXPECT_GT(big->size(1), kExhaustivePoolCap);
  EXPECT_THROW(minimize_exhaustive({}, WeightField::constant(1, 1), FaceSet::all(big, 1)), PoolTooLarge);
}

TEST(Exhaustive, MatchesBruteForce) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 25; ++trial) {
    auto I = random_planar_instance(rng, 11, trial % 2 == 1);
    auto [faces, J] = brute_force(I);
    auto r = minimize_exhaustive(I.constraints, I.h, I.pool);
    EXPECT_EQ(r.best.faces(), faces) << "trial " << trial;
    EXPECT_NEAR(r.objective, J, 1e-12);
  }
}

TEST(Exhaustive, WeightMonotonicity) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    auto I = random_planar_instance(rng, 14, true);
    std::map<std::size_t, double> heavier = I.h.table();
    for (auto& [f, v] : heavier) v = std::min(3.0, v + 1);
    auto low = minimize_exhaustive(I.constraints, I.h, I.pool);
    auto high = minimize_exhaustive(I.constraints, WeightField::per_face(heavier, 1.0, 3.0), I.pool);
    EXPECT_LE(low.objective, high.objective + 1e-12);
  }
}

TEST(Local, BumpedPathStraightens) {
  auto K = build_grid_complex(2, {3, 3});
  auto w = ConstraintCycle::point_pair("w", at(K, {1, 0}), at(K, {2, 3}));
  std::vector<std::vector<std::int64_t>> path{{0, 1}, {1, 1}, {1, 2}, {2, 2}, {2, 1}, {3, 1}};
  std::vector<std::size_t> faces;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) faces.push_back(face_of(K, {at(K, path[i]), at(K, path[i + 1])}));
  FaceSet init(K, 1, faces);
  ASSERT_TRUE(spanning_check(init, {w}).feasible());
  auto h = WeightField::constant(1, 1);
  LocalSearchOptions opt;
  opt.budget = 3000;
  opt.seed = 3;
  std::vector<FaceSet> accepted;
  opt.on_accept = [&](const FaceSet& F, double) { accepted.push_back(F); };
  auto all = FaceSet::all(K, 1);
  auto r = minimize_local({w}, h, init, opt, all);
  // oracle on a pool small enough for the exhaustive search: edges off the contact points
  std::vector<std::size_t> pool;
  for (std::size_t e = 0; e < K->size(1); ++e) {
    const auto& s = K->simplex(1, e);
    if (std::find(s.begin(), s.end(), w.vertices[0]) == s.end() && std::find(s.begin(), s.end(), w.vertices[1]) == s.end())
      pool.push_back(e);
  }
  ASSERT_LE(pool.size(), kExhaustivePoolCap);
  auto exact = minimize_exhaustive({w}, h, FaceSet(K, 1, pool));
  EXPECT_NEAR(r.objective, exact.objective, 1e-12);
  EXPECT_LT(r.objective, measure_Jh(init, h));
  EXPECT_TRUE(spanning_check(r.best, {w}).feasible());
  for (const auto& F : accepted) EXPECT_TRUE(spanning_check(F, {w}).feasible());
  for (std::size_t i = 1; i < r.trajectory.size(); ++i) EXPECT_LE(r.trajectory[i], r.trajectory[i - 1] + 1e-12);
  EXPECT_GT(r.accepted_moves, 0u);
}

TEST(Local, OptimalInitIsUnchanged) {
  auto K = build_grid_complex(2, {2, 2});
  auto w = ConstraintCycle::point_pair("w", at(K, {1, 0}), at(K, {1, 2}));
  auto row = faces_where(K, 1, [](auto p) { return p[1] == 1; });
  LocalSearchOptions opt;
  opt.budget = 500;
  auto r = minimize_local({w}, WeightField::constant(1, 1), row, opt);
  EXPECT_EQ(r.best, row);
  EXPECT_EQ(r.accepted_moves, 0u);
  EXPECT_DOUBLE_EQ(r.objective, 2.0);
}

TEST(Local, ZeroBudgetReturnsInit) {
  auto K = build_grid_complex(2, {2, 2});
  auto w = ConstraintCycle::point_pair("w", at(K, {1, 0}), at(K, {1, 2}));
  auto init = faces_where(K, 1, [](auto p) { return p[1] >= 1 && p[0] != 1; });
  std::vector<std::size_t> extra = faces_where(K, 1, [](auto p) { return p[1] == 1; }).faces();
  init = init.with(extra, {});
  ASSERT_TRUE(spanning_check(init, {w}).feasible());
  LocalSearchOptions opt;
  opt.budget = 0;
  auto r = minimize_local({w}, WeightField::constant(1, 1), init, opt);
  EXPECT_EQ(r.best, init);
  EXPECT_DOUBLE_EQ(r.objective, measure_Jh(init, WeightField::constant(1, 1)));
  EXPECT_EQ(r.evaluations, 0u);
}

TEST(Local, InfeasibleInitRejected) {
  auto K = build_grid_complex(2, {2, 2});
  auto w = ConstraintCycle::point_pair("w", at(K, {1, 0}), at(K, {1, 2}));
  EXPECT_THROW(minimize_local({w}, WeightField::constant(1, 1), FaceSet(K, 1)), PreconditionError);
}

TEST(Local, DeterministicPerSeed) {
  std::mt19937_64 rng(21);
  auto I = random_planar_instance(rng, 16, true);
  LocalSearchOptions opt;
  opt.budget = 300;
  opt.seed = 99;
  auto a = minimize_local(I.constraints, I.h, I.init, opt, I.pool);
  auto b = minimize_local(I.constraints, I.h, I.init, opt, I.pool);
  EXPECT_EQ(a.best, b.best);
  EXPECT_EQ(a.trajectory, b.trajectory);
  EXPECT_EQ(a.evaluations, b.evaluations);
}

TEST(Local, MatchesExhaustiveOnSmallInstances) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 8; ++trial) {
    auto I = random_planar_instance(rng, 16, trial % 2 == 0);
    auto exact = minimize_exhaustive(I.constraints, I.h, I.pool);
    LocalSearchOptions opt;
    opt.budget = 3000;
    opt.seed = static_cast<std::uint64_t>(trial);
    auto local = minimize_local(I.constraints, I.h, I.init, opt, I.pool);
    EXPECT_NEAR(local.objective, exact.objective, 1e-9) << "trial " << trial;
    EXPECT_TRUE(spanning_check(local.best, I.constraints).feasible());
  }
}

namespace {

struct OrthogonalPlanes {
  ComplexPtr K = build_grid_complex(4, {2, 2, 2, 2});
  FaceSet P1 = faces_where(K, 2, [](auto p) { return p[2] == 1 && p[3] == 1; });
  FaceSet P2 = faces_where(K, 2, [](auto p) { return p[0] == 1 && p[1] == 1; });
  FaceSet both = P1.with(P2.faces(), {});
  ProjectionTarget t1{Vec4(0, 0, 1, 1), Plane::coordinate(1, 2), ProjectionTarget::Shape::rectangle, {0, 0}, {2, 2}};
  ProjectionTarget t2{Vec4(1, 1, 0, 0), Plane::coordinate(3, 4), ProjectionTarget::Shape::rectangle, {0, 0}, {2, 2}};
};

}  // namespace

TEST(ProjectionBound, OrthogonalPlanesAreTight) {
  OrthogonalPlanes o;
  auto b = projection_lower_bound(o.both, o.t1, o.t2, 256);
  double J = measure_Jh(o.both, WeightField::constant(1, 1));
  EXPECT_DOUBLE_EQ(J, 8.0);
  EXPECT_DOUBLE_EQ(b.lambda, 1.0);
  EXPECT_NEAR(b.bound, J, 1e-9 * J);
  auto w1 = square_loop(o.K, "l1", {0, 0, 0, 0}, 2, 3);
  auto w2 = square_loop(o.K, "l2", {0, 0, 0, 0}, 0, 1);
  EXPECT_TRUE(spanning_check(o.both, {w1, w2}).feasible());
}

TEST(ProjectionBound, HoleLowersTheBound) {
  OrthogonalPlanes o;
  std::size_t hole[] = {o.P1.faces().front()};
  auto b = projection_lower_bound(o.both.with({}, hole), o.t1, o.t2, 256);
  EXPECT_LT(b.bound, 8.0 - 1e-3);
  EXPECT_NEAR(b.area2, 4.0, 1e-12);
}

TEST(ProjectionBound, DiskTargetsAndGeneralPairs) {
  OrthogonalPlanes o;
  auto d1 = o.t1;
  d1.shape = ProjectionTarget::Shape::disk;
  d1.lo = {1, 1};
  d1.hi = {1, 0};
  auto d2 = o.t2;
  d2.shape = d1.shape;
  d2.lo = d1.lo;
  d2.hi = d1.hi;
  auto b = projection_lower_bound(o.both, d1, d2, 1024);
  EXPECT_NEAR(b.area1, std::numbers::pi, 1e-2);
  EXPECT_NEAR(b.bound, 2 * std::numbers::pi, 2e-2);
  EXPECT_LE(b.bound, measure_Jh(o.both, WeightField::constant(1, 1)));

  auto tilted = o.t2;
  tilted.frame = PlanePair::with_angles(std::numbers::pi / 3, std::numbers::pi / 2.5).P2;
  auto g = projection_lower_bound(o.both, o.t1, tilted, 128);
  EXPECT_NEAR(g.lambda, 1 + 2 * std::cos(std::numbers::pi / 3), 1e-9);

  auto K3 = build_grid_complex(3, {1, 1, 1});
  EXPECT_THROW(projection_lower_bound(FaceSet(K3, 2), o.t1, o.t2), InvalidInput);
}

TEST(ProjectionBound, SoundOnSubsetsOfTheOptimum) {
  // grid-aligned subsets: pixel centers on shared diagonals are counted once
  OrthogonalPlanes o;
  std::mt19937_64 rng(41);
  auto h = WeightField::constant(1, 1);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<std::size_t> keep;
    for (auto f : o.both.faces())
      if (rng() % 4 != 0) keep.push_back(f);
    FaceSet F(o.K, 2, keep);
    auto b = projection_lower_bound(F, o.t1, o.t2, 256);
    // each half-square misses at most one row of diagonal pixel centers
    EXPECT_LE(b.bound, measure_Jh(F, h) + 32 * (2.0 / 256) * (2.0 / 256) * 256);
  }
}
