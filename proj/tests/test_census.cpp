#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "charstrat/census.hpp"
#include "charstrat/error.hpp"
#include "charstrat/jets.hpp"
#include "charstrat/strata.hpp"

using namespace charstrat;

namespace {

template <class F>
void expect_error(ErrorCode code, F&& f) {
  try {
    f();
    ADD_FAILURE() << "expected " << to_string(code);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

ConstrainedSpec spec(const char* field, std::int64_t e, std::int64_t a, std::int64_t f, Symmetry s) {
  return {Field::parse(field), e, a, f, s};
}

// Strata that the census shows to be empty although the predicate accepts them:
// an alternating block never has rank exactly 1.
bool alternating_rank_one(const DeltaSpec& d) { return d.sym == Symmetry::Alt && d.a - d.p == 1; }

using Stratum = std::pair<std::int64_t, std::int64_t>;

}  // namespace

TEST(Census, EnumerationCounts) {
  EXPECT_EQ(enumerate_constrained(spec("F2", 2, 2, 1, Symmetry::Sym)).size(), 8u);
  EXPECT_EQ(enumerate_constrained(spec("F2", 2, 2, 1, Symmetry::Alt)).size(), 2u);
  EXPECT_EQ(spec("F2", 3, 2, 2, Symmetry::Sym).ambient_dim(), 10);
  EXPECT_EQ(enumerate_constrained(spec("F2", 3, 2, 2, Symmetry::Sym)).size(), 1024u);
  expect_error(ErrorCode::BudgetExceeded, [] { stratum_census(spec("F3", 4, 4, 2, Symmetry::Sym)); });
  expect_error(ErrorCode::BudgetExceeded, [] { ConstrainedEnumerator(spec("F2", 3, 2, 2, Symmetry::Sym), 1000); });
}

TEST(Census, EnumerationVisitsEveryPointOnce) {
  const auto s = spec("F3", 3, 2, 1, Symmetry::Alt);
  const auto all = enumerate_constrained(s);
  std::set<std::vector<std::uint32_t>> seen;
  for (const auto& m : all) {
    std::vector<std::uint32_t> key;
    for (const Elem& x : m.data) key.push_back(x.index());
    seen.insert(key);
    // Alternating A x A block of the realized map.
    for (std::size_t k = 0; k < 2; ++k)
      for (std::size_t l = 0; l < 2; ++l) ASSERT_EQ(m.realized.at(k, l), -m.realized.at(l, k));
  }
  EXPECT_EQ(seen.size(), all.size());
  EXPECT_EQ(all.size(), 27u);
}

TEST(Census, SymmetricTwoByTwoOverF2) {
  const auto t = stratum_census(spec("F2", 2, 2, 1, Symmetry::Sym));
  // rank 0, 1, 2 <-> i = 2, 1, 0; p = i since A = E.
  EXPECT_EQ(t.count(2, 2), 1u);
  EXPECT_EQ(t.count(1, 1), 3u);
  EXPECT_EQ(t.count(0, 0), 4u);
  EXPECT_EQ(t.total, 8u);
}

TEST(Census, AlternatingTwoByTwoOverF2) {
  const auto t = stratum_census(spec("F2", 2, 2, 1, Symmetry::Alt));
  EXPECT_EQ(t.count(2, 2), 1u);
  EXPECT_EQ(t.count(0, 0), 1u);
  EXPECT_EQ(t.counts.size(), 2u);
}

TEST(Census, FastPathMatchesSlowClassification) {
  for (const char* fld : {"F2", "F3", "F4"})
    for (std::int64_t e = 1; e <= 3; ++e)
      for (std::int64_t a = 1; a <= e; ++a)
        for (std::int64_t f = 1; f <= 2; ++f)
          for (Symmetry sym : {Symmetry::Sym, Symmetry::Alt}) {
            const auto s = spec(fld, e, a, f, sym);
            if (s.point_count() > 20000) continue;
            CensusTable slow;
            slow.total = 0;
            ConstrainedEnumerator it(s);
            ConstrainedMap m;
            while (it.next(m)) {
              ++slow.counts[m.stratum()];
              ++slow.total;
            }
            const auto fast = stratum_census(s);
            ASSERT_EQ(fast.counts, slow.counts) << s.to_string();
            ASSERT_EQ(fast.total, slow.total);
          }
}

TEST(Census, WorkersDoNotChangeCounts) {
  for (const char* fld : {"F2", "F3"}) {
    const auto s = spec(fld, 4, 2, 1, Symmetry::Sym);
    const auto one = stratum_census(s, kDefaultCensusBudget, 1);
    EXPECT_EQ(stratum_census(s, kDefaultCensusBudget, 3).counts, one.counts);
    EXPECT_EQ(stratum_census(s, kDefaultCensusBudget, 7).counts, one.counts);
  }
}

TEST(Census, CountsSumToTotal) {
  const auto t = stratum_census(spec("F3", 3, 2, 2, Symmetry::Sym));
  std::uint64_t sum = 0;
  for (const auto& [k, n] : t.counts) sum += n;
  EXPECT_EQ(sum, t.total);
  EXPECT_EQ(t.total, 59049u);
}

TEST(Census, GeneralMatricesGiveSingularCount) {
  // (e, a, f) = (2, 1, 2) realizes every 2 x 2 matrix; singular ones number q^3 + q^2 - q.
  for (const char* fld : {"F2", "F3", "F4", "F5"}) {
    const auto s = spec(fld, 2, 1, 2, Symmetry::Sym);
    const std::uint64_t q = s.field.cardinality();
    const auto t = stratum_census(s);
    EXPECT_EQ(t.total - t.count(0, 0), q * q * q + q * q - q) << fld;
  }
}

// Occupancy against the predicate. The only disagreements are alternating
// strata whose A-block would need rank 1.
TEST(Census, OccupancyMatchesPredicateUpToAlternatingRankOne) {
  int disagreements = 0;
  for (const char* fld : {"F2", "F3"}) {
    const std::int64_t cap = std::string(fld) == "F2" ? 12 : 7;
    for (std::int64_t e = 1; e <= 13; ++e)
      for (std::int64_t a = 1; a <= e; ++a)
        for (std::int64_t f = 1; f <= 12; ++f)
          for (Symmetry sym : {Symmetry::Sym, Symmetry::Alt}) {
            const auto s = spec(fld, e, a, f, sym);
            if (s.ambient_dim() > cap) continue;
            const auto t = stratum_census(s);
            for (std::int64_t i = 0; i <= std::min(e, a * f); ++i)
              for (std::int64_t p = 0; p <= a; ++p) {
                const DeltaSpec d{e, a, f, i, p, sym};
                const bool pred = delta_nonempty(d);
                if (t.occupied(i, p) != pred) {
                  ++disagreements;
                  ASSERT_TRUE(pred && alternating_rank_one(d)) << s.to_string() << " i=" << i << " p=" << p;
                } else {
                  ASSERT_EQ(t.occupied(i, p), pred && !alternating_rank_one(d));
                }
              }
          }
  }
  EXPECT_GT(disagreements, 0);
}

TEST(Census, WitnessExamples) {
  const Field f2 = Field::gf(2);
  const auto w = witness(f2, {3, 2, 1, 1, 2, Symmetry::Alt});
  EXPECT_EQ(w.rank(), 1u);
  EXPECT_EQ(w.rank_on_A(), 0u);

  for (std::int64_t e = 1; e <= 5; ++e)
    for (std::int64_t a = 1; a <= e; ++a)
      for (std::int64_t f = 1; f <= 3; ++f) {
        const DeltaSpec d{e, a, f, 0, std::max<std::int64_t>(a - std::min(e, a * f), 0), Symmetry::Sym};
        const auto g = witness(Field::gf(3), d);
        EXPECT_EQ(g.rank(), static_cast<std::size_t>(std::min(e, a * f)));
      }

  // a - p = 3 odd with two target vectors.
  const auto third = witness(f2, {4, 3, 2, 1, 0, Symmetry::Alt});
  EXPECT_EQ(third.stratum(), (Stratum(1, 0)));
  EXPECT_FALSE(third.realized.block(0, 4, 3, 3).is_zero());
  // (4,3,2,1,1): a - p = 2 is even, so the single-target construction applies.
  EXPECT_EQ(witness(f2, {4, 3, 2, 1, 1, Symmetry::Alt}).stratum(), (Stratum(1, 1)));

  expect_error(ErrorCode::EmptyStratum, [&] { witness(f2, {3, 2, 1, 1, 1, Symmetry::Alt}); });
  // Predicate accepts, construction collapses to rank 0 on A.
  expect_error(ErrorCode::EmptyStratum, [&] { witness(f2, {3, 2, 2, 1, 1, Symmetry::Alt}); });
}

TEST(Census, WitnessVerifiesOnGrid) {
  for (const char* fld : {"F2", "F3", "Q"})
    for (std::int64_t e = 1; e <= 6; ++e)
      for (std::int64_t a = 1; a <= e; ++a)
        for (std::int64_t f = 1; f <= 3; ++f)
          for (Symmetry sym : {Symmetry::Sym, Symmetry::Alt})
            for (std::int64_t i = 0; i <= std::min(e, a * f); ++i)
              for (std::int64_t p = 0; p <= a; ++p) {
                const DeltaSpec d{e, a, f, i, p, sym};
                if (!delta_nonempty(d)) continue;
                if (alternating_rank_one(d)) {
                  expect_error(ErrorCode::EmptyStratum, [&] { witness(Field::parse(fld), d); });
                  continue;
                }
                const auto w = witness(Field::parse(fld), d);
                ASSERT_EQ(w.stratum(), std::make_pair(i, p));
              }
}

TEST(Census, SingleFieldSanityBound) {
  // -log_q(count / total) within 0.75 of the formula for enumerable specs, q = 3, 4.
  int checked = 0;
  for (const char* fld : {"F3", "F4"})
    for (std::int64_t e = 1; e <= 4; ++e)
      for (std::int64_t a = 1; a <= e; ++a)
        for (std::int64_t f = 1; f <= 2; ++f)
          for (Symmetry sym : {Symmetry::Sym, Symmetry::Alt}) {
            const auto s = spec(fld, e, a, f, sym);
            if (s.point_count() > 300000) continue;
            const auto t = stratum_census(s);
            const double q = static_cast<double>(s.field.cardinality());
            for (const auto& [ip, n] : t.counts) {
              const DeltaSpec d{e, a, f, ip.first, ip.second, sym};
              const auto c = delta_codim(d);
              ASSERT_TRUE(c);
              const double est = -std::log(static_cast<double>(n) / static_cast<double>(t.total)) / std::log(q);
              if (std::abs(est - static_cast<double>(*c)) > 0.75)
                ADD_FAILURE() << s.to_string() << " (" << ip.first << "," << ip.second << ") est " << est
                              << " formula " << *c;
              ++checked;
            }
          }
  EXPECT_GT(checked, 50);
}

TEST(Census, SingleFieldBoundBreaksOverF2) {
  // Nonzero 1 x 1 forms are half of all forms at q = 2: -log_2(1/2) = 1 against codim 0.
  const auto t = stratum_census(spec("F2", 1, 1, 1, Symmetry::Sym));
  EXPECT_EQ(t.count(0, 0), 1u);
  EXPECT_EQ(delta_codim({1, 1, 1, 0, 0, Symmetry::Sym}), std::optional<std::int64_t>(0));
  EXPECT_GT(-std::log2(static_cast<double>(t.count(0, 0)) / static_cast<double>(t.total)), 0.75);
}

TEST(CensusMc, SingularTwoByTwo) {
  McConfig cfg{parse_tower("F2,F4,F16"), 200000, 7, 1};
  const auto est = estimate_codim_mc([](const ConstrainedMap& m) { return m.rank() < 2; },
                                     spec("F2", 2, 1, 2, Symmetry::Sym), cfg);
  ASSERT_EQ(est.fractions.size(), 3u);
  for (std::size_t k = 0; k < 3; ++k) {
    const double q = static_cast<double>(est.cardinalities[k]);
    const double exact = (q * q * q + q * q - q) / (q * q * q * q);
    EXPECT_NEAR(est.fractions[k], exact, 0.01);
  }
  EXPECT_NEAR(est.estimate, 1.0, 0.15);
}

TEST(CensusMc, RandomQuadraticMapCorank) {
  McConfig cfg{parse_tower("F3,F9,F27"), 100000, 11, 1};
  const auto est = estimate_codim_mc(
      [](const Field& field, Rng& rng) {
        const auto sys = LinearSystem::monomials(field, 3, 3, 2);
        const PolyMap f = sample_member(sys, rng.next());
        Vector x;
        for (int k = 0; k < 3; ++k) x.push_back(field.random(rng));
        return corank_at(f, x) >= 1;
      },
      cfg);
  EXPECT_NEAR(est.estimate, static_cast<double>(*crit_codim(3, 3, 1)), 0.35);
}

TEST(CensusMc, DeltaFastPathAgreesWithExactFractions) {
  const DeltaSpec d{3, 2, 1, 1, 1, Symmetry::Sym};
  McConfig cfg{parse_tower("F3,F9,F27"), 200000, 3, 2};
  const auto est = estimate_delta_codim_mc(d, cfg);
  const auto exact = stratum_census(spec("F3", 3, 2, 1, Symmetry::Sym));
  EXPECT_NEAR(est.fractions[0], static_cast<double>(exact.count(1, 1)) / static_cast<double>(exact.total), 0.005);
  EXPECT_NEAR(est.estimate, static_cast<double>(*delta_codim(d)), 0.35);
}

TEST(CensusMc, DeterministicInSeed) {
  const DeltaSpec d{2, 2, 1, 1, 1, Symmetry::Sym};
  McConfig cfg{parse_tower("F2,F4,F16"), 100000, 42, 2};
  const auto a = estimate_delta_codim_mc(d, cfg);
  const auto b = estimate_delta_codim_mc(d, cfg);
  EXPECT_EQ(a.hits, b.hits);
  cfg.seed = 43;
  EXPECT_NE(estimate_delta_codim_mc(d, cfg).hits, a.hits);
}

TEST(CensusMc, Errors) {
  McConfig cfg{parse_tower("F2,F4,F16"), 100000, 1, 1};
  expect_error(ErrorCode::DegenerateTower, [&] { estimate_codim_mc([](const Field&, Rng&) { return false; }, cfg); });
  McConfig short_tower{parse_tower("F2,F4"), 100000, 1, 1};
  expect_error(ErrorCode::PreconditionViolated,
               [&] { estimate_codim_mc([](const Field&, Rng&) { return true; }, short_tower); });
  McConfig mixed{parse_tower("F2,F3,F4"), 100000, 1, 1};
  expect_error(ErrorCode::PreconditionViolated,
               [&] { estimate_codim_mc([](const Field&, Rng&) { return true; }, mixed); });
}

TEST(CensusMc, FitRecoversExactSlope) {
  CodimEstimate e;
  e.samples_per_field = 1000000000;
  e.cardinalities = {2, 4, 16};
  for (double q : {2.0, 4.0, 16.0}) e.hits.push_back(static_cast<std::uint64_t>(1e9 / (q * q)));
  fit_codim(e);
  EXPECT_NEAR(e.estimate, 2.0, 1e-6);
  EXPECT_LT(e.halfwidth, 0.01);
}
