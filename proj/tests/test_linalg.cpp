#include <gtest/gtest.h>

#include "charstrat/linalg.hpp"
#include "charstrat/rng.hpp"

using namespace charstrat;

namespace {

Matrix random_matrix(const Field& f, std::size_t r, std::size_t c, Rng& rng, int zero_bias) {
  Matrix m(f, r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j)
      if (rng.below(4) >= static_cast<std::uint64_t>(zero_bias)) m.set(i, j, f.random(rng, 5));
  return m;
}

// Product of row-rank-1 factors: rank(M) <= k by construction.
Matrix low_rank(const Field& f, std::size_t r, std::size_t c, std::size_t k, Rng& rng) {
  return random_matrix(f, r, k, rng, 0) * random_matrix(f, k, c, rng, 0);
}

}  // namespace

TEST(Linalg, IdentityAndZero) {
  const Field q = Field::rationals();
  auto id = rank_profile(Matrix::identity(q, 2));
  EXPECT_EQ(id.rank, 2u);
  EXPECT_TRUE(id.kernel_basis.empty());
  EXPECT_EQ(id.cokernel_projection.rows(), 0u);

  auto z = rank_profile(Matrix(q, 3, 2));
  EXPECT_EQ(z.rank, 0u);
  EXPECT_EQ(z.kernel_basis.size(), 2u);
  EXPECT_EQ(z.cokernel_projection.rows(), 3u);
  EXPECT_EQ(z.cokernel_projection.cols(), 3u);
}

TEST(Linalg, HandReducedExample) {
  const Field q = Field::rationals();
  const Matrix m = Matrix::from_ints(q, {{1, 2}, {2, 4}});
  auto rp = rank_profile(m);
  EXPECT_EQ(rp.rank, 1u);
  ASSERT_EQ(rp.kernel_basis.size(), 1u);
  // (2,-1) spans the kernel: the computed vector must be proportional to it.
  const Vector& v = rp.kernel_basis[0];
  EXPECT_EQ(v[0] * q.from_int(-1), v[1] * q.from_int(2));
  EXPECT_EQ(rp.cokernel_projection.rows(), 1u);
  EXPECT_TRUE((rp.cokernel_projection * m).is_zero());
}

TEST(Linalg, SolveExamples) {
  const Field q = Field::rationals();
  auto x = solve_linear(Matrix::identity(q, 2), {q.one(), q.zero()});
  ASSERT_TRUE(x);
  EXPECT_EQ(*x, (Vector{q.one(), q.zero()}));

  auto y = solve_linear(Matrix::from_ints(q, {{1, 1}}), {q.one()});
  ASSERT_TRUE(y);
  EXPECT_EQ(*y, (Vector{q.one(), q.zero()}));

  EXPECT_FALSE(solve_linear(Matrix(q, 2, 2), {q.one(), q.zero()}));
}

TEST(Linalg, FieldMismatch) {
  const Field q = Field::rationals();
  EXPECT_THROW(solve_linear(Matrix::identity(q, 1), {Field::gf(3).one()}), Error);
  EXPECT_THROW(Matrix::from_rows(q, {{q.one(), Field::gf(2).one()}}), Error);
}

TEST(Linalg, RankProperties) {
  Rng rng(5);
  for (Field f : {Field::rationals(), Field::gf(2), Field::gf(3), Field::gf(2, 4), Field::gf(101, 2)}) {
    for (int it = 0; it < 200; ++it) {
      const std::size_t r = 1 + rng.below(6), c = 1 + rng.below(6), k = rng.below(4);
      const Matrix m = it % 2 ? random_matrix(f, r, c, rng, 2) : low_rank(f, r, c, k, rng);
      auto rp = rank_profile(m);
      ASSERT_EQ(rp.rank, rank_profile(m.transpose()).rank);
      ASSERT_EQ(rp.rank, rank(m));
      ASSERT_EQ(rp.rank + rp.kernel_basis.size(), c);
      for (const Vector& v : rp.kernel_basis) {
        const Vector mv = m * v;
        for (const Elem& e : mv) ASSERT_TRUE(e.is_zero());
      }
      if (!rp.kernel_basis.empty()) {
        ASSERT_EQ(rank(Matrix::from_columns(f, c, rp.kernel_basis)), rp.kernel_basis.size());
      }
      ASSERT_EQ(rp.cokernel_projection.rows(), r - rp.rank);
      ASSERT_EQ(rank(rp.cokernel_projection), r - rp.rank);
      ASSERT_TRUE((rp.cokernel_projection * m).is_zero());
      if (it % 2 == 0) ASSERT_LE(rp.rank, k);
    }
  }
}

TEST(Linalg, SolveAgreesWithMembership) {
  Rng rng(9);
  for (Field f : {Field::rationals(), Field::gf(3), Field::gf(2, 2)}) {
    for (int it = 0; it < 200; ++it) {
      const Matrix a = random_matrix(f, 1 + rng.below(5), 1 + rng.below(5), rng, 2);
      Vector b;
      for (std::size_t i = 0; i < a.rows(); ++i) b.push_back(f.random(rng, 3));
      auto x = solve_linear(a, b);
      const bool in_span = rank(a) == rank(Matrix::from_columns(f, a.rows(), [&] {
                             std::vector<Vector> cols;
                             for (std::size_t c = 0; c < a.cols(); ++c) cols.push_back(a.column(c));
                             cols.push_back(b);
                             return cols;
                           }()));
      ASSERT_EQ(x.has_value(), in_span);
      if (x) ASSERT_EQ(a * *x, b);
    }
  }
}

TEST(Linalg, Inverse) {
  Rng rng(1);
  const Field f = Field::gf(5);
  int found = 0;
  for (int it = 0; it < 100; ++it) {
    const Matrix m = random_matrix(f, 3, 3, rng, 0);
    auto inv = inverse(m);
    ASSERT_EQ(inv.has_value(), rank(m) == 3);
    if (inv) {
      ++found;
      ASSERT_EQ(m * *inv, Matrix::identity(f, 3));
    }
  }
  EXPECT_GT(found, 50);
}
