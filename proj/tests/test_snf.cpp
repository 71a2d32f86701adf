#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "topomin/int_matrix.hpp"

using namespace topomin;

namespace {

// Leibniz expansion; independent of the elimination code under test.
Integer leibniz_det(const std::vector<std::vector<Integer>>& m) {
  const std::size_t n = m.size();
  if (n == 0) return 1;
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  Integer total = 0;
  do {
    int sign = 1;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (p[i] > p[j]) sign = -sign;
    Integer prod = sign;
    for (std::size_t i = 0; i < n; ++i) prod *= m[i][p[i]];
    total += prod;
  } while (std::next_permutation(p.begin(), p.end()));
  return total;
}

void choose(std::size_t n, std::size_t k, std::size_t start, std::vector<std::size_t>& cur,
            std::vector<std::vector<std::size_t>>& out) {
  if (cur.size() == k) {
    out.push_back(cur);
    return;
  }
  for (std::size_t i = start; i < n; ++i) {
    cur.push_back(i);
    choose(n, k, i + 1, cur, out);
    cur.pop_back();
  }
}

// Invariant factors from determinantal divisors: d_k = D_k / D_{k-1}, D_k = gcd of k-minors.
std::vector<Integer> determinantal_invariants(const IntMatrix& A) {
  std::vector<Integer> out;
  Integer prev = 1;
  for (std::size_t k = 1; k <= std::min(A.rows(), A.cols()); ++k) {
    std::vector<std::vector<std::size_t>> rs, cs;
    std::vector<std::size_t> cur;
    choose(A.rows(), k, 0, cur, rs);
    choose(A.cols(), k, 0, cur, cs);
    Integer g = 0;
    for (const auto& r : rs)
      for (const auto& c : cs) {
        std::vector<std::vector<Integer>> m(k, std::vector<Integer>(k));
        for (std::size_t i = 0; i < k; ++i)
          for (std::size_t j = 0; j < k; ++j) m[i][j] = A(r[i], c[j]);
        Integer d = leibniz_det(m);
        if (d < 0) d = -d;
        g = boost::multiprecision::gcd(g, d);
      }
    if (g == 0) break;
    out.push_back(g / prev);
    prev = g;
  }
  return out;
}

void expect_valid_snf(const IntMatrix& A, const SnfResult& r) {
  EXPECT_EQ(r.U * A * r.V, r.D);
  for (std::size_t i = 0; i < r.D.rows(); ++i)
    for (std::size_t j = 0; j < r.D.cols(); ++j)
      if (i != j) EXPECT_EQ(r.D(i, j), 0);
  auto d = r.diagonal();
  for (std::size_t i = 0; i < d.size(); ++i) {
    EXPECT_GE(d[i], 0);
    if (i + 1 < d.size() && d[i] != 0) EXPECT_EQ(d[i + 1] % d[i], 0);
    if (d[i] == 0)
      for (std::size_t j = i; j < d.size(); ++j) EXPECT_EQ(d[j], 0);
  }
  Integer du = determinant(r.U), dv = determinant(r.V);
  EXPECT_TRUE(du == 1 || du == -1);
  EXPECT_TRUE(dv == 1 || dv == -1);
}

}  // namespace

TEST(SmithNormalForm, IdentityIsFixed) {
  IntMatrix I = IntMatrix::identity(3);
  auto r = smith_normal_form(I);
  EXPECT_EQ(r.D, I);
  EXPECT_EQ(r.rank, 3u);
  expect_valid_snf(I, r);
}

TEST(SmithNormalForm, ZeroMatrix) {
  IntMatrix Z(3, 4);
  auto r = smith_normal_form(Z);
  EXPECT_TRUE(r.D.is_zero());
  EXPECT_EQ(r.rank, 0u);
  expect_valid_snf(Z, r);
}

TEST(SmithNormalForm, EmptyMatrices) {
  for (auto [m, n] : {std::pair{0, 0}, std::pair{0, 3}, std::pair{2, 0}}) {
    IntMatrix A(m, n);
    auto r = smith_normal_form(A);
    EXPECT_EQ(r.rank, 0u);
    EXPECT_EQ(r.U * A * r.V, r.D);
  }
}

TEST(SmithNormalForm, TwoByTwoExample) {
  IntMatrix A{{2, 4}, {6, 8}};
  auto r = smith_normal_form(A);
  ASSERT_EQ(r.diagonal().size(), 2u);
  EXPECT_EQ(r.diagonal()[0], 2);
  EXPECT_EQ(r.diagonal()[1], 4);
  expect_valid_snf(A, r);
  EXPECT_EQ(determinantal_invariants(A), smith_invariants(A));
}

TEST(SmithNormalForm, TorsionOfProjectivePlaneStyleMatrix) {
  IntMatrix A{{2, 0, 0}, {0, 3, 0}, {0, 0, 0}};
  auto inv = smith_invariants(A);
  ASSERT_EQ(inv.size(), 2u);
  EXPECT_EQ(inv[0], 1);
  EXPECT_EQ(inv[1], 6);
}

TEST(SmithNormalForm, RandomMatricesMatchDeterminantalDivisors) {
  std::mt19937_64 rng(12345);
  std::uniform_int_distribution<int> shape(1, 4), entry(-6, 6), sparse(0, 2);
  for (int trial = 0; trial < 150; ++trial) {
    IntMatrix A(shape(rng), shape(rng));
    for (std::size_t i = 0; i < A.rows(); ++i)
      for (std::size_t j = 0; j < A.cols(); ++j) A(i, j) = sparse(rng) == 0 ? 0 : entry(rng);
    auto r = smith_normal_form(A);
    expect_valid_snf(A, r);
    EXPECT_EQ(smith_invariants(A), determinantal_invariants(A)) << "trial " << trial;
  }
}

TEST(SmithNormalForm, LargeEntriesDoNotOverflow) {
  IntMatrix A(2, 2);
  A(0, 0) = Integer(1) << 80;
  A(0, 1) = (Integer(1) << 80) + 6;
  A(1, 0) = Integer(3) << 70;
  A(1, 1) = 9;
  auto r = smith_normal_form(A);
  expect_valid_snf(A, r);
  EXPECT_EQ(smith_invariants(A), determinantal_invariants(A));
}

TEST(SparseIntMatrix, ProductAndDenseAgree) {
  SparseIntMatrix a(2, 2), b(2, 1);
  a.columns[0] = {{0, 1}, {1, 2}};
  a.columns[1] = {{1, -1}};
  b.columns[0] = {{0, 3}, {1, 6}};
  auto p = a * b;
  EXPECT_EQ(p.to_dense(), a.to_dense() * b.to_dense());
  EXPECT_EQ(p.at(0, 0), 3);
  EXPECT_EQ(p.at(1, 0), 0);
  EXPECT_TRUE(p.columns[0].size() == 1);
}
