#include <gtest/gtest.h>

#include <algorithm>

#include "charstrat/codim.hpp"
#include "charstrat/error.hpp"

using namespace charstrat;

using Opt = std::optional<std::int64_t>;

TEST(Codim, CriticalLocus) {
  EXPECT_EQ(crit_codim(2, 2, 1), Opt(1));
  EXPECT_EQ(crit_codim(2, 2, 3), std::nullopt);
  EXPECT_EQ(crit_codim(3, 1, 1), Opt(3));
  EXPECT_EQ(crit_codim(4, 4, 0), Opt(0));
}

TEST(Codim, SecondOrder) {
  for (std::int64_t n = 1; n <= 8; ++n) EXPECT_EQ(second_order_codim(n, 1, 1, 1, 0), Opt(n + 1));
  EXPECT_EQ(second_order_codim(2, 1, 1, 1, 2), std::nullopt);
  EXPECT_EQ(second_order_codim(3, 1, 1, 1, 3), Opt(4));
  EXPECT_EQ(second_order_codim(3, 3, 0, 1, 0), std::nullopt);
  // char 2, n = 3, r = 1, i = 1, j = 1: n-m+i-j = 2 even; 3 + 1*2*0 + 1*0*1/2.
  EXPECT_EQ(second_order_codim(3, 1, 1, 1, 2), Opt(3));
}

TEST(Codim, SecondOrderReducesToCritical) {
  for (std::int64_t n = 0; n <= 12; ++n)
    for (std::int64_t r = 0; r <= 12; ++r)
      for (std::int64_t i = 0; i <= 13; ++i)
        for (std::uint32_t ch : {0u, 2u, 3u}) {
          const auto second = second_order_codim(n, r, i, 0, ch);
          const auto crit = crit_codim(n, r, i);
          // Only the characteristic-2 parity condition can empty Sigma^{1,0} inside a nonempty Sigma^1.
          const bool parity_excluded = ch == 2 && i == 1 && r <= n && (n - r + 1) % 2 == 1;
          if (parity_excluded) {
            ASSERT_FALSE(second);
          } else {
            ASSERT_EQ(second, crit) << n << r << i << ch;
          }
        }
}

TEST(Codim, BadLocus) {
  EXPECT_EQ(bad_locus_codim(2, 2, 1, 0), Opt(3));
  EXPECT_EQ(bad_locus_codim(2, 2, 1, 2), Opt(2));
  EXPECT_EQ(bad_locus_codim(3, 1, 1, 2), Opt(3));
  EXPECT_EQ(bad_locus_codim(4, 1, 1, 2), Opt(5));
  EXPECT_EQ(bad_locus_codim(2, 2, 0, 0), std::nullopt);
  EXPECT_EQ(bad_locus_codim(2, 2, 3, 0), std::nullopt);
  // n < i(|n-r|+i): the whole stratum.
  EXPECT_EQ(bad_locus_codim(2, 2, 2, 0), Opt(4));
  // Generic values are n + 1.
  for (std::int64_t n = 1; n <= 10; ++n)
    for (std::int64_t r = 1; r <= 10; ++r)
      for (std::int64_t i = 1; i <= std::min(n, r); ++i)
        if (n >= i * (std::abs(n - r) + i)) ASSERT_EQ(bad_locus_codim(n, r, i, 0), Opt(n + 1));
}

TEST(Codim, DeltaNonempty) {
  EXPECT_TRUE(delta_nonempty({3, 2, 1, 1, 1, Symmetry::Sym}));
  EXPECT_FALSE(delta_nonempty({3, 2, 1, 1, 1, Symmetry::Alt}));
  EXPECT_TRUE(delta_nonempty({3, 2, 1, 1, 2, Symmetry::Alt}));
  EXPECT_EQ((DeltaSpec{2, 2, 1, 0, 0, Symmetry::Sym}).ambient_dim(), 3);
  EXPECT_EQ((DeltaSpec{2, 2, 1, 0, 0, Symmetry::Alt}).ambient_dim(), 1);
  EXPECT_EQ((DeltaSpec{3, 2, 2, 0, 0, Symmetry::Sym}).ambient_dim(), 10);
}

TEST(Codim, DeltaCodimExamples) {
  EXPECT_EQ(delta_codim({2, 2, 1, 0, 0, Symmetry::Sym}), Opt(0));
  // Hand substitution at (4,2,1,1,1): n = 1; 1*(1-2+1) + 1*((−1+1)/2 + 3*2) − 1*3 = 3.
  EXPECT_EQ(delta_codim({4, 2, 1, 1, 1, Symmetry::Sym}), Opt(3));
  EXPECT_EQ(delta_codim({3, 2, 1, 1, 1, Symmetry::Alt}), std::nullopt);
}

TEST(Codim, BoxRankStratum) {
  EXPECT_EQ(box_rank_stratum_codim(3, 1, 1, Symmetry::Alt), Opt(0));
  EXPECT_EQ(box_rank_stratum_codim(3, 1, 2, Symmetry::Alt), std::nullopt);
  EXPECT_EQ(box_rank_stratum_codim(3, 2, 1, Symmetry::Alt), Opt(2));
  for (std::int64_t e = 0; e <= 6; ++e) EXPECT_EQ(box_rank_stratum_codim(e, 3, 0, Symmetry::Sym), Opt(0));
  // Symmetric e x e matrices of corank i: codim i(i+1)/2.
  EXPECT_EQ(box_rank_stratum_codim(4, 1, 2, Symmetry::Sym), Opt(3));
}

TEST(Codim, BoxRankMatchesDeltaWhenAIsE) {
  for (std::int64_t e = 0; e <= 12; ++e)
    for (std::int64_t f = 1; f <= 12; ++f)
      for (std::int64_t i = 0; i <= e; ++i)
        for (Symmetry s : {Symmetry::Sym, Symmetry::Alt})
          ASSERT_EQ(delta_codim({e, e, f, i, i, s}), box_rank_stratum_codim(e, f, i, s)) << e << f << i;
}

TEST(Codim, FirstDegeneracy) {
  EXPECT_EQ(first_degeneracy_codim(4, 2, 2, Symmetry::Sym), 1);
  EXPECT_EQ(first_degeneracy_codim(3, 1, 2, Symmetry::Alt), 1);
  EXPECT_EQ(first_degeneracy_codim(4, 4, 1, Symmetry::Alt), 1);
  try {
    first_degeneracy_codim(3, 2, 2, Symmetry::Sym);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::PreconditionViolated);
  }
}

TEST(Codim, MinimizeExamples) {
  auto r1 = minimize_C({4, 2, 1, +1});
  EXPECT_EQ(r1.value, 3);
  EXPECT_EQ(minimize_C({3, 1, 2, -1}).value, 1);
  EXPECT_EQ(minimize_C({4, 4, 1, -1}).value, 1);
  const auto b = brute_force_min_C({4, 2, 1, +1});
  EXPECT_EQ(b.value, 3);
  EXPECT_LE(b.evaluated, 6u);
  EXPECT_EQ(brute_force_min_C({12, 3, 4, -1}).value, minimize_C({12, 3, 4, -1}).value);
}

TEST(Codim, MinimizeAgreesWithBruteForceOnGrid) {
  for (std::int64_t e = 1; e <= 12; ++e)
    for (std::int64_t a = 1; a <= e; ++a)
      for (std::int64_t f = 1; f <= 6 && a * f <= e; ++f)
        for (int sign : {+1, -1}) {
          const CMinSpec s{e, a, f, sign};
          const auto closed = minimize_C(s);
          const auto brute = brute_force_min_C(s);
          ASSERT_EQ(closed.value, brute.value) << e << " " << a << " " << f << " " << sign;
          ASSERT_TRUE(std::find(brute.argmin.begin(), brute.argmin.end(), closed.witness) != brute.argmin.end());
        }
}

TEST(Codim, DeltaCodimIsCOnRegion) {
  for (std::int64_t e = 1; e <= 12; ++e)
    for (std::int64_t a = 1; a <= e; ++a)
      for (std::int64_t f = 1; f <= 6 && a * f <= e; ++f)
        for (int sign : {+1, -1}) {
          const CMinSpec s{e, a, f, sign};
          const Symmetry sym = sign > 0 ? Symmetry::Sym : Symmetry::Alt;
          for (const auto& [i, p] : s.region()) ASSERT_EQ(delta_codim({e, a, f, i, p, sym}), Opt(s.value(i, p)));
        }
}

TEST(Codim, MinimumOverStrataIsFirstDegeneracy) {
  for (std::int64_t e = 1; e <= 12; ++e)
    for (std::int64_t a = 1; a <= e; ++a)
      for (std::int64_t f = 1; a * f <= e; ++f)
        for (Symmetry sym : {Symmetry::Sym, Symmetry::Alt}) {
          std::optional<std::int64_t> best;
          for (std::int64_t i = 1; i <= a * f; ++i)
            for (std::int64_t p = 0; p <= a; ++p)
              if (auto c = delta_codim({e, a, f, i, p, sym})) best = best ? std::min(*best, *c) : *c;
          ASSERT_TRUE(best);
          ASSERT_EQ(*best, first_degeneracy_codim(e, a, f, sym));
        }
}
