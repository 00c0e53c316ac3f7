#include <gtest/gtest.h>

#include "charstrat/poly.hpp"
#include "charstrat/rng.hpp"

using namespace charstrat;

namespace {

Polynomial random_poly(const Field& f, std::size_t nvars, unsigned maxdeg, std::size_t nterms, Rng& rng,
                       unsigned mindeg = 0) {
  std::vector<Term> terms;
  for (std::size_t k = 0; k < nterms; ++k) {
    std::vector<unsigned> e(nvars, 0);
    const unsigned d = mindeg + static_cast<unsigned>(rng.below(maxdeg - mindeg + 1));
    for (unsigned s = 0; s < d; ++s) ++e[rng.below(nvars)];
    terms.push_back({Monomial::from_exponents(e), f.random(rng, 4)});
  }
  return Polynomial::from_terms(f, nvars, terms);
}

Vector random_point(const Field& f, std::size_t n, Rng& rng) {
  Vector v;
  for (std::size_t i = 0; i < n; ++i) v.push_back(f.random(rng, 5));
  return v;
}

}  // namespace

TEST(Poly, GrevlexOrder) {
  // Degree first, then the smaller exponent on the last variable wins: x0^2 > x0*x1 > x1^2.
  const auto deg2 = Monomial::of_degree(2, 2);
  ASSERT_EQ(deg2.size(), 3u);
  EXPECT_EQ(deg2[0].to_string(), "x1^2");
  EXPECT_EQ(deg2[1].to_string(), "x0*x1");
  EXPECT_EQ(deg2[2].to_string(), "x0^2");
  const auto deg3 = Monomial::of_degree(3, 3);
  EXPECT_EQ(deg3.size(), 10u);
  // x1^3 vs x0*x2^2: last variable decides, x1^3 has exponent 0 on x2 so it is larger.
  EXPECT_TRUE(GrevlexLess{}(Monomial::from_exponents({1, 0, 2}), Monomial::from_exponents({0, 3, 0})));
  EXPECT_EQ(Monomial::up_to_degree(2, 2).size(), 6u);
}

TEST(Poly, ComposeExamples) {
  const Field q = Field::rationals();
  const auto f = TruncatedSeries::parse(q, 2, "x0^2", 4);
  const auto s = TruncatedSeries::parse(q, 2, "x0 + x1", 4);
  EXPECT_EQ(series_compose(f, {s, TruncatedSeries::parse(q, 2, "x1", 4)}, 4).poly(),
            Polynomial::parse(q, 2, "x0^2 + 2*x0*x1 + x1^2"));

  const Field f2 = Field::gf(2);
  const auto f_2 = TruncatedSeries::parse(f2, 2, "x0^2", 4);
  const auto s_2 = TruncatedSeries::parse(f2, 2, "x0 + x1", 4);
  EXPECT_EQ(series_compose(f_2, {s_2, TruncatedSeries::parse(f2, 2, "x1", 4)}, 4).poly(),
            Polynomial::parse(f2, 2, "x0^2 + x1^2"));

  // (y+y^2) + (y+y^2)^2 = y + 2y^2 + 2y^3 + y^4, truncated at 3.
  const auto g = TruncatedSeries::parse(q, 1, "x + x^2", 3);
  const auto h = TruncatedSeries::parse(q, 1, "x + x^2", 3);
  EXPECT_EQ(series_compose(g, {h}, 3).poly(), Polynomial::parse(q, 1, "x + 2*x^2 + 2*x^3"));
}

TEST(Poly, ComposeRejectsConstantTerm) {
  const Field q = Field::rationals();
  try {
    series_compose(TruncatedSeries::parse(q, 1, "x^2"), {TruncatedSeries::parse(q, 1, "1 + x")}, 4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonzeroConstantTerm);
  }
}

TEST(Poly, DeriveExamples) {
  EXPECT_TRUE(Polynomial::parse(Field::gf(3), 1, "x^3").derive(0).is_zero());
  const Field q = Field::rationals();
  EXPECT_EQ(Polynomial::parse(q, 2, "x*y").derive(0), Polynomial::parse(q, 2, "y"));
  const Field f2 = Field::gf(2);
  EXPECT_EQ(Polynomial::parse(f2, 2, "x^2*y + y^2").derive(1), Polynomial::parse(f2, 2, "x^2"));
  EXPECT_EQ(derive(TruncatedSeries::parse(q, 2, "x*y"), 0).poly(), Polynomial::parse(q, 2, "y"));
}

TEST(Poly, Jet2Examples) {
  const Field q = Field::rationals();
  auto j = jet2_at(PolyMap::parse(q, 2, "x^2 + y^2"), {q.zero(), q.zero()});
  EXPECT_TRUE(j.value[0].is_zero());
  EXPECT_TRUE(j.jacobian.is_zero());
  EXPECT_EQ(j.hessian[0], Matrix::from_ints(q, {{2, 0}, {0, 2}}));

  const Field f2 = Field::gf(2);
  auto j2 = jet2_at(PolyMap::parse(f2, 2, "x*y"), {f2.zero(), f2.zero()});
  EXPECT_EQ(j2.hessian[0], Matrix::from_ints(f2, {{0, 1}, {1, 0}}));

  auto j3 = jet2_at(PolyMap::parse(q, 1, "x^3"), {q.one()});
  EXPECT_EQ(j3.value[0], q.one());
  EXPECT_EQ(j3.jacobian.at(0, 0), q.from_int(3));
  EXPECT_EQ(j3.hessian[0].at(0, 0), q.from_int(6));

  try {
    jet2_at(PolyMap::parse(q, 2, "x"), {q.zero()});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(Poly, ParseAndPrintRoundTrip) {
  const Field q = Field::rationals();
  const Polynomial p = Polynomial::parse(q, 2, "x0^2 + 3*x0*x1 - x1^3");
  EXPECT_EQ(p.to_string(), "x0^2 + 3*x0*x1 - x1^3");
  EXPECT_EQ(Polynomial::parse(q, 2, p.to_string()), p);
  EXPECT_EQ(Polynomial::parse(q, 1, "x/2 - 1/3").to_string(), "-1/3 + 1/2*x0");
  EXPECT_EQ(Polynomial::parse(q, 1, "(x+1)^3"), Polynomial::parse(q, 1, "x^3 + 3*x^2 + 3*x + 1"));
  EXPECT_EQ(Polynomial::count_vars("x0^2 + x3"), 4u);
  EXPECT_EQ(Polynomial::count_vars("x*y"), 2u);

  const Field f4 = Field::gf(2, 2);
  const Polynomial r = Polynomial::parse(f4, 2, "t*x + (t+1)*y^2 + t^2");
  EXPECT_EQ(Polynomial::parse(f4, 2, r.to_string()), r);
  EXPECT_EQ(r.coeff(Monomial()), f4.t() + f4.one());

  for (const char* bad : {"x +", "x0^", "(x", "x9", "x/y", "2 $ x", "t*x"}) {
    try {
      Polynomial::parse(q, 2, bad);
      ADD_FAILURE() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::ParseError) << bad;
    }
  }
}

TEST(Poly, ArithmeticMatchesEvaluation) {
  Rng rng(21);
  for (Field f : {Field::rationals(), Field::gf(2), Field::gf(5), Field::gf(3, 2)}) {
    for (int it = 0; it < 200; ++it) {
      const Polynomial a = random_poly(f, 3, 4, 6, rng), b = random_poly(f, 3, 4, 6, rng);
      const Vector x = random_point(f, 3, rng);
      ASSERT_EQ((a + b).evaluate(x), a.evaluate(x) + b.evaluate(x));
      ASSERT_EQ((a - b).evaluate(x), a.evaluate(x) - b.evaluate(x));
      ASSERT_EQ((a * b).evaluate(x), a.evaluate(x) * b.evaluate(x));
      ASSERT_EQ(a.pow(3).evaluate(x), a.evaluate(x).pow(3));
      ASSERT_EQ(a.mul(b, 3), (a * b).truncated(3));
    }
  }
}

TEST(Poly, ComposeMatchesPointwiseEvaluation) {
  Rng rng(4);
  for (Field f : {Field::rationals(), Field::gf(2), Field::gf(7), Field::gf(2, 3)}) {
    for (int it = 0; it < 100; ++it) {
      const Polynomial p = random_poly(f, 2, 4, 5, rng);
      std::vector<Polynomial> subs{random_poly(f, 3, 3, 4, rng), random_poly(f, 3, 3, 4, rng)};
      const Polynomial c = p.compose(subs);
      const Vector x = random_point(f, 3, rng);
      ASSERT_EQ(c.evaluate(x), p.evaluate({subs[0].evaluate(x), subs[1].evaluate(x)}));
      const Vector x0 = random_point(f, 2, rng);
      ASSERT_EQ(p.shifted(x0).evaluate(x.size() == 3 ? Vector{x[0], x[1]} : x),
                p.evaluate({x0[0] + x[0], x0[1] + x[1]}));
    }
  }
}

TEST(Poly, PartialsCommute) {
  Rng rng(8);
  for (Field f : {Field::rationals(), Field::gf(2), Field::gf(3), Field::gf(2, 2)}) {
    for (int it = 0; it < 1000 / 4; ++it) {
      const Polynomial p = random_poly(f, 3, 6, 8, rng);
      for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) ASSERT_EQ(p.derive(i).derive(j), p.derive(j).derive(i));
    }
  }
}

TEST(Poly, SeriesCompositionIsAssociative) {
  Rng rng(13);
  const int n = 5;
  for (Field f : {Field::rationals(), Field::gf(2), Field::gf(5)}) {
    for (int it = 0; it < 60; ++it) {
      const Polynomial p = random_poly(f, 2, 4, 5, rng, 1);
      std::vector<Polynomial> g{random_poly(f, 2, 3, 4, rng, 1), random_poly(f, 2, 3, 4, rng, 1)};
      std::vector<Polynomial> h{random_poly(f, 2, 3, 4, rng, 1), random_poly(f, 2, 3, 4, rng, 1)};
      std::vector<Polynomial> gh{series_compose(g[0], h, n), series_compose(g[1], h, n)};
      ASSERT_EQ(series_compose(series_compose(p, g, n), h, n), series_compose(p, gh, n));
      // Truncation commutes with exact composition.
      ASSERT_EQ(series_compose(p, g, n), p.compose(g).truncated(n));
    }
  }
}

TEST(Poly, CharacteristicTwoHessianHasZeroDiagonal) {
  Rng rng(2);
  for (Field f : {Field::gf(2), Field::gf(2, 2), Field::gf(2, 4)}) {
    for (int it = 0; it < 300; ++it) {
      const PolyMap m(f, 3, {random_poly(f, 3, 5, 8, rng), random_poly(f, 3, 5, 8, rng)});
      const Jet2 j = jet2_at(m, random_point(f, 3, rng));
      for (const Matrix& h : j.hessian) {
        for (std::size_t a = 0; a < 3; ++a) {
          ASSERT_TRUE(h.at(a, a).is_zero());
          for (std::size_t b = 0; b < 3; ++b) ASSERT_EQ(h.at(a, b), h.at(b, a));
        }
      }
    }
  }
}

TEST(Poly, Jet2MatchesTaylorCoefficients) {
  // Taylor coefficient of y_a*y_b in f(x0+y) is the mixed partial (a != b); over Q also h_aa / 2.
  Rng rng(6);
  const Field q = Field::rationals();
  for (int it = 0; it < 100; ++it) {
    const Polynomial p = random_poly(q, 2, 4, 6, rng);
    const Vector x0 = random_point(q, 2, rng);
    const Jet2 j = jet2_at(PolyMap(q, 2, {p}), x0);
    const Polynomial s = p.shifted(x0);
    ASSERT_EQ(s.constant_term(), j.value[0]);
    ASSERT_EQ(s.coeff(Monomial::var(0)), j.jacobian.at(0, 0));
    ASSERT_EQ(s.coeff(Monomial::var(0) * Monomial::var(1)), j.hessian[0].at(0, 1));
    ASSERT_EQ(s.coeff(Monomial::var(1, 2)) * q.from_int(2), j.hessian[0].at(1, 1));
  }
}
