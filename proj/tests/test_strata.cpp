#include <gtest/gtest.h>

#include "charstrat/jets.hpp"
#include "charstrat/rng.hpp"
#include "charstrat/strata.hpp"

using namespace charstrat;

namespace {

Vector origin(const Field& f, std::size_t n) { return Vector(n, f.zero()); }

Vector random_point(const Field& f, std::size_t n, Rng& rng) {
  Vector v;
  for (std::size_t i = 0; i < n; ++i) v.push_back(f.random(rng, 4));
  return v;
}

Matrix random_invertible(const Field& f, std::size_t n, Rng& rng) {
  Matrix m(f, n, n);
  do {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) m.set(i, j, f.random(rng, 3));
  } while (rank(m) < n);
  return m;
}

PolyMatrix poly_matrix(const Field& f, std::size_t nvars, const std::vector<std::vector<std::string>>& rows) {
  PolyMatrix m;
  for (const auto& row : rows) {
    m.emplace_back();
    for (const auto& s : row) m.back().push_back(Polynomial::parse(f, nvars, s));
  }
  return m;
}

PolyMatrix times(const Matrix& a, const PolyMatrix& p) {
  const Field f = a.field();
  const std::size_t nv = p[0][0].nvars();
  PolyMatrix out(a.rows(), std::vector<Polynomial>(p[0].size(), Polynomial(f, nv)));
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < p[0].size(); ++j)
      for (std::size_t k = 0; k < a.cols(); ++k) out[i][j] += p[k][j] * a.at(i, k);
  return out;
}

PolyMatrix times(const PolyMatrix& p, const Matrix& b) {
  const Field f = b.field();
  const std::size_t nv = p[0][0].nvars();
  PolyMatrix out(p.size(), std::vector<Polynomial>(b.cols(), Polynomial(f, nv)));
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j)
      for (std::size_t k = 0; k < b.rows(); ++k) out[i][j] += p[i][k] * b.at(k, j);
  return out;
}

// Random map whose Jacobian at the origin has prescribed rank `rk` (corank min(n,r) - rk).
PolyMap map_with_rank(const Field& f, std::size_t n, std::size_t r, std::size_t rk, Rng& rng) {
  std::vector<Polynomial> comps;
  for (std::size_t c = 0; c < r; ++c) {
    Polynomial p(f, n);
    if (c < rk) p += Polynomial::variable(f, n, c);
    for (const Monomial& m : Monomial::of_degree(n, 2)) p += Polynomial::monomial(f, n, m, f.random(rng, 3));
    for (const Monomial& m : Monomial::of_degree(n, 3))
      if (rng.below(3) == 0) p += Polynomial::monomial(f, n, m, f.random(rng, 3));
    comps.push_back(p);
  }
  // Mix source and target coordinates linearly so that kernels are not coordinate-aligned.
  const Matrix a = random_invertible(f, n, rng), b = random_invertible(f, r, rng);
  std::vector<Polynomial> subs;
  for (std::size_t i = 0; i < n; ++i) {
    Polynomial s(f, n);
    for (std::size_t j = 0; j < n; ++j) s += Polynomial::variable(f, n, j) * a.at(i, j);
    subs.push_back(s);
  }
  std::vector<Polynomial> mixed(r, Polynomial(f, n));
  for (std::size_t c = 0; c < r; ++c)
    for (std::size_t d = 0; d < r; ++d) mixed[c] += comps[d].compose(subs) * b.at(c, d);
  return PolyMap(f, n, mixed);
}

}  // namespace

TEST(Strata, CorankExamples) {
  const Field q = Field::rationals();
  Rng rng(1);
  const PolyMap id = PolyMap::parse(q, 2, "x; y");
  for (int k = 0; k < 5; ++k) EXPECT_EQ(corank_at(id, random_point(q, 2, rng)), 0u);
  EXPECT_EQ(corank_at(PolyMap::parse(q, 2, "x; y^2"), origin(q, 2)), 1u);
  EXPECT_EQ(corank_at(PolyMap::parse(q, 2, "x^2 + y^3"), origin(q, 2)), 1u);
  EXPECT_THROW(corank_at(id, origin(q, 3)), Error);
}

TEST(Strata, IntrinsicDifferentialExamples) {
  const Field q = Field::rationals();
  const auto d1 = intrinsic_differential_at(poly_matrix(q, 1, {{"x"}}), origin(q, 1));
  EXPECT_EQ(d1.dim_kernel(), 1u);
  EXPECT_EQ(d1.dim_cokernel(), 1u);
  EXPECT_EQ(d1.tensor[0], Matrix::from_ints(q, {{1}}));

  const auto d2 = intrinsic_differential_at(poly_matrix(q, 1, {{"1", "0"}, {"0", "x"}}), origin(q, 1));
  EXPECT_EQ(d2.corank, 1u);
  ASSERT_EQ(d2.dim_kernel(), 1u);
  EXPECT_EQ(d2.kernel, Matrix::from_ints(q, {{0}, {1}}));
  EXPECT_EQ(d2.cokernel_proj, Matrix::from_ints(q, {{0, 1}}));
  EXPECT_EQ(d2.tensor[0], Matrix::from_ints(q, {{1}}));
}

TEST(Strata, SecondDifferentialExamples) {
  const Field q = Field::rationals();
  const auto s1 = second_intrinsic_differential_at(PolyMap::parse(q, 2, "x^2 + y^3"), origin(q, 2));
  EXPECT_EQ(s1.base.dim_kernel(), 2u);
  EXPECT_EQ(s1.base.dim_cokernel(), 1u);
  EXPECT_EQ(s1.forms[0], Matrix::from_ints(q, {{2, 0}, {0, 0}}));

  const Field f2 = Field::gf(2);
  const auto s2 = second_intrinsic_differential_at(PolyMap::parse(f2, 2, "x*y + x^3"), origin(f2, 2));
  EXPECT_EQ(s2.forms[0], Matrix::from_ints(f2, {{0, 1}, {1, 0}}));

  const auto s3 = second_intrinsic_differential_at(PolyMap::parse(q, 2, "x; y^2"), origin(q, 2));
  EXPECT_EQ(s3.base.kernel, Matrix::from_ints(q, {{0}, {1}}));
  EXPECT_EQ(s3.forms[0], Matrix::from_ints(q, {{2}}));
}

TEST(Strata, SymbolExamples) {
  const Field q = Field::rationals(), f2 = Field::gf(2);
  EXPECT_EQ(symbol_at(PolyMap::parse(q, 2, "x^2 + y^2"), origin(q, 2)), (SymbolClass{1, 0}));
  EXPECT_EQ(symbol_at(PolyMap::parse(q, 2, "x^2 + y^3"), origin(q, 2)), (SymbolClass{1, 1}));
  EXPECT_EQ(symbol_at(PolyMap::parse(f2, 2, "x; y^2"), origin(f2, 2)), (SymbolClass{1, 1}));
  // Submersion: corank 0 and j = 0 even though the kernel is nonzero.
  EXPECT_EQ(symbol_at(PolyMap::parse(q, 3, "x"), origin(q, 3)), (SymbolClass{0, 0}));
}

TEST(Strata, BadLocusExamples) {
  const Field q = Field::rationals(), f2 = Field::gf(2);
  EXPECT_FALSE(bad_locus_member(PolyMap::parse(q, 2, "x^2 + y^2"), origin(q, 2)));
  EXPECT_TRUE(bad_locus_member(PolyMap::parse(f2, 2, "x^2 + y^2"), origin(f2, 2)));
  EXPECT_FALSE(bad_locus_member(PolyMap::parse(q, 2, "x; y"), origin(q, 2)));
  // Corank 2 on A^2 -> A^2: i(|n-r|+i) = 4 > n, so the point is bad by convention.
  EXPECT_TRUE(bad_locus_member(PolyMap::parse(q, 2, "x^2; y^2"), origin(q, 2)));
}

TEST(Strata, IntrinsicDifferentialBasisInvariance) {
  Rng rng(7);
  for (Field f : {Field::rationals(), Field::gf(2), Field::gf(3), Field::gf(2, 2)}) {
    for (int it = 0; it < 100; ++it) {
      // alpha(x) of rank-deficient shape at the origin, plus linear and quadratic terms.
      const std::size_t rows = 2 + rng.below(2), cols = 2 + rng.below(2), nv = 2;
      PolyMatrix alpha(rows, std::vector<Polynomial>(cols, Polynomial(f, nv)));
      for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) {
          Polynomial p(f, nv);
          if (i == j && i == 0) p += Polynomial::constant(f, nv, f.one());
          p += Polynomial::variable(f, nv, 0) * f.random(rng, 2) + Polynomial::variable(f, nv, 1) * f.random(rng, 2);
          p += Polynomial::parse(f, nv, "x*y") * f.random(rng, 2);
          alpha[i][j] = p;
        }
      const Vector x = origin(f, nv);
      const Matrix phi = random_invertible(f, rows, rng), psi = random_invertible(f, cols, rng);
      const IntrinsicDiff d = intrinsic_differential_at(alpha, x);
      const IntrinsicDiff e = intrinsic_differential_at(times(times(phi, alpha), psi), x);
      ASSERT_EQ(d.dim_kernel(), e.dim_kernel());
      ASSERT_EQ(d.dim_cokernel(), e.dim_cokernel());
      const std::size_t k = d.dim_kernel(), c = d.dim_cokernel();
      // psi K' = K A and P' = M P phi^{-1}; then T'_l = M T_l A.
      const Matrix pk = psi * e.kernel;
      Matrix a(f, k, k);
      for (std::size_t col = 0; col < k; ++col) {
        auto sol = solve_linear(d.kernel, pk.column(col));
        ASSERT_TRUE(sol);
        for (std::size_t row = 0; row < k; ++row) a.set(row, col, (*sol)[row]);
      }
      const Matrix pp = d.cokernel_proj * *inverse(phi);
      Matrix m(f, c, c);
      for (std::size_t row = 0; row < c; ++row) {
        auto sol = solve_linear(pp.transpose(), e.cokernel_proj.row(row));
        ASSERT_TRUE(sol);
        for (std::size_t col = 0; col < c; ++col) m.set(row, col, (*sol)[col]);
      }
      for (std::size_t l = 0; l < nv; ++l) ASSERT_EQ(e.tensor[l], m * d.tensor[l] * a) << f.name();
    }
  }
}

TEST(Strata, SecondDifferentialSymmetry) {
  Rng rng(3);
  for (Field f : {Field::rationals(), Field::gf(2), Field::gf(3), Field::gf(2, 2), Field::gf(5)}) {
    for (int it = 0; it < 250; ++it) {
      const std::size_t n = 1 + rng.below(4), r = 1 + rng.below(4), m = std::min(n, r);
      const PolyMap fm = map_with_rank(f, n, r, rng.below(m), rng);
      const SecondDiff s = second_intrinsic_differential_at(fm, origin(f, n));
      for (const Matrix& b : s.forms) {
        ASSERT_EQ(b, b.transpose());
        if (f.characteristic() == 2)
          for (std::size_t a = 0; a < b.rows(); ++a) ASSERT_TRUE(b.at(a, a).is_zero());
      }
    }
  }
}

TEST(Strata, SecondDifferentialAdditivity) {
  Rng rng(5);
  for (Field f : {Field::rationals(), Field::gf(2), Field::gf(3), Field::gf(2, 2)}) {
    for (int it = 0; it < 150; ++it) {
      const std::size_t n = 2 + rng.below(3), r = 1 + rng.below(3), m = std::min(n, r);
      const PolyMap fm = map_with_rank(f, n, r, rng.below(m), rng);
      const Vector x = random_point(f, n, rng);
      // delta_c(y) = quadratic form in (y - x), plus a cubic tail; it vanishes to order 2 at x.
      std::vector<Polynomial> shift_subs;
      for (std::size_t i = 0; i < n; ++i)
        shift_subs.push_back(Polynomial::variable(f, n, i) - Polynomial::constant(f, n, x[i]));
      std::vector<Polynomial> quad, pert;
      for (std::size_t c = 0; c < r; ++c) {
        Polynomial qd(f, n), tail(f, n);
        for (const Monomial& mo : Monomial::of_degree(n, 2)) qd += Polynomial::monomial(f, n, mo, f.random(rng, 3));
        for (const Monomial& mo : Monomial::of_degree(n, 3))
          if (rng.below(4) == 0) tail += Polynomial::monomial(f, n, mo, f.random(rng, 3));
        quad.push_back(qd);
        pert.push_back(fm.components[c] + (qd + tail).compose(shift_subs));
      }
      const SecondDiff before = second_intrinsic_differential_at(fm, x);
      const SecondDiff after = second_intrinsic_differential_at(PolyMap(f, n, pert), x);
      ASSERT_EQ(before.base.kernel, after.base.kernel);
      ASSERT_EQ(before.base.cokernel_proj, after.base.cokernel_proj);
      const std::size_t k = before.base.dim_kernel();
      for (std::size_t g = 0; g < before.forms.size(); ++g) {
        for (std::size_t a = 0; a < k; ++a) {
          for (std::size_t b = 0; b < k; ++b) {
            // Polarization by evaluation: beta(u, v) = delta(u + v) - delta(u) - delta(v).
            const Vector u = before.base.kernel.column(a), v = before.base.kernel.column(b);
            Vector uv;
            for (std::size_t i = 0; i < n; ++i) uv.push_back(u[i] + v[i]);
            Elem expected = f.zero();
            for (std::size_t c = 0; c < r; ++c) {
              const Elem beta = quad[c].evaluate(uv) - quad[c].evaluate(u) - quad[c].evaluate(v);
              expected += before.base.cokernel_proj.at(g, c) * beta;
            }
            ASSERT_EQ(after.forms[g].at(a, b), before.forms[g].at(a, b) + expected);
          }
        }
      }
    }
  }
}

TEST(Strata, CharacteristicTwoParityAtCorankOne) {
  Rng rng(9);
  for (Field f : {Field::gf(2), Field::gf(2, 2)}) {
    for (int it = 0; it < 400; ++it) {
      const std::size_t r = 1 + rng.below(3), n = r + rng.below(3);
      const PolyMap fm = map_with_rank(f, n, r, r - 1, rng);
      const SymbolClass s = symbol_at(fm, origin(f, n));
      ASSERT_EQ(s.i, 1u);
      ASSERT_EQ((n - r + 1 - s.j) % 2, 0u);
    }
  }
}

TEST(Strata, FoldFamilyAgreesWithRestriction) {
  // F = (x, y^2 + a*x*y + y^3): Sigma^1 = {2y + a x + 3y^2 = 0} over Q. Along it, the restriction
  // F|Sigma^1 has corank equal to j; the symbol should be (1, 0) off the cusp set.
  const Field q = Field::rationals();
  const PolyMap fm = PolyMap::parse(q, 2, "x; y^2 + x*y + y^3");
  // Points of Sigma^1: solve 2y + x + 3y^2 = 0 for x.
  int singular_seen = 0;
  for (long long t = -6; t <= 6; ++t) {
    const Elem y = q.from_rational(mpq_class(static_cast<long>(t), 6L));
    const Elem x = -(q.from_int(2) * y + q.from_int(3) * y * y);
    const Vector pt{x, y};
    ASSERT_EQ(corank_at(fm, pt), 1u);
    // Sigma^1 parametrized by y -> (x(y), y); F restricted is y -> (x(y), ...), whose
    // differential has rank 1 iff dx/dy = -(2 + 6y) != 0.
    const bool restricted_singular = (q.from_int(2) + q.from_int(6) * y).is_zero();
    const SymbolClass s = symbol_at(fm, pt);
    ASSERT_EQ(s.j, restricted_singular ? 1u : 0u);
    singular_seen += restricted_singular;
  }
  EXPECT_EQ(singular_seen, 1);
}

TEST(Strata, ScanMatchesPointwiseClassification) {
  Rng rng(11);
  for (Field f : {Field::gf(3), Field::gf(2, 2), Field::gf(5)}) {
    for (int it = 0; it < 10; ++it) {
      const PolyMap fm = sample_member(LinearSystem::monomials(f, 2, 2, 3), rng.next());
      const PointScan scan = scan_critical_points(fm);
      std::uint64_t crit = 0, bad = 0;
      for (const Elem& a : f.enumerate())
        for (const Elem& b : f.enumerate()) {
          const Vector x{a, b};
          if (corank_at(fm, x) >= 1) {
            ++crit;
            if (bad_locus_member(fm, x)) ++bad;
          }
        }
      ASSERT_EQ(scan.critical, crit);
      ASSERT_EQ(scan.bad, bad);
      ASSERT_EQ(count_critical_points_plane(fm), crit);
    }
  }
}

TEST(Strata, PlaneCountMatchesScanForFunctions) {
  Rng rng(12);
  for (Field f : {Field::gf(7), Field::gf(3, 2), Field::gf(2, 3)}) {
    for (int it = 0; it < 20; ++it) {
      const PolyMap fm = sample_member(LinearSystem::monomials(f, 2, 1, 3), rng.next());
      ASSERT_EQ(count_critical_points_plane(fm), scan_critical_points(fm).critical) << fm.to_string();
    }
  }
  // Degenerate: x^2 over F_2 has zero gradient everywhere.
  const Field f2 = Field::gf(2);
  EXPECT_EQ(count_critical_points_plane(PolyMap::parse(f2, 2, "x^2 + y^2")), 4u);
}
