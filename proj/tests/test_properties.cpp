#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "coalesce/checks.hpp"
#include "coalesce/exact_oracle.hpp"
#include "coalesce/rmm.hpp"
#include "generators.hpp"

using namespace coalesce;

namespace {

// Nested pair r1 ⊆ r2: r2 is r1 plus a random extra relation.
std::pair<Relation, Relation> nested(gen::Rng& rng, std::size_t n) {
  auto r1 = gen::relation(rng, n);
  auto r2 = Relation::union_of(r1, gen::relation(rng, n));
  return {r1, r2};
}

}  // namespace

// Per-seed monotone coupling on inputs drawn by the test-side generator.
TEST(CouplingProperty, NormMonotoneInRelationMassAndTime) {
  gen::Rng rng(61);
  for (int trial = 0; trial < 3000; ++trial) {
    const std::size_t n = gen::size_in(rng, 2, 14);
    const auto x = gen::masses(rng, n);
    std::vector<double> ys = x.data();
    for (double& a : ys) a += gen::real_in(rng, 0.0, 1.0) < 0.5 ? gen::real_in(rng, 0.0, 0.5) : 0.0;
    auto [r1, r2] = nested(rng, n);
    const double t1 = gen::real_in(rng, 0.0, 2.0);
    const double t2 = t1 + (gen::real_in(rng, 0.0, 1.0) < 0.3 ? 0.0 : gen::real_in(rng, 0.0, 1.0));
    const MonotoneInstance inst{x, MassVector(ys), r1, r2, t1, t2};
    ASSERT_TRUE(monotone_coupling_holds(inst, ThresholdField(6, trial))) << r1.to_string() << " " << r2.to_string();
  }
}

// The predicate is not vacuous: swapping the roles breaks it somewhere.
TEST(CouplingProperty, ReversedInstancesFail) {
  gen::Rng rng(62);
  int failures = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = gen::size_in(rng, 3, 10);
    const auto x = gen::masses(rng, n);
    const MonotoneInstance reversed{x, x, Relation::maximal(), Relation::maximal(), 2.0, 0.5};
    failures += !monotone_coupling_holds(reversed, ThresholdField(7, trial));
  }
  EXPECT_GT(failures, 100);
}

TEST(ShiftProperty, TailOfMergedBelowMergedTail) {
  gen::Rng rng(63);
  for (int trial = 0; trial < 3000; ++trial) {
    const std::size_t m = std::vector<std::size_t>{1, 2, 5}[trial % 3];
    const std::size_t n = gen::size_in(rng, m + 1, 50);
    auto xs = gen::masses(rng, n).data();
    std::sort(xs.begin(), xs.end(), std::greater<>());
    const double s = sum_of_squares(xs);
    const double t = s > 0.0 ? gen::real_in(rng, 0.0, 2.5) / s : 1.0;
    const ShiftInstance inst{MassVector(xs), gen::relation(rng, n), m, t};
    ASSERT_TRUE(shift_inequality_holds(inst, ThresholdField(8, trial))) << inst.r.to_string();
  }
}

TEST(ShiftProperty, LibraryChecksReportZeroViolations) {
  const std::vector<std::size_t> ms = {1, 2, 5};
  EXPECT_EQ(shift_inequality_check(500, ms, 3, 0, 2).violations, 0u);
  EXPECT_EQ(monotone_coupling_check(500, 3, 1 << 20, 2).violations, 0u);
}

// With R maximal and m at least the support, the glued relation is R itself
// and the two-stage construction has nothing above m to merge.
TEST(GlueProperty, DegenerateCaseCollapsesToPlainRmm) {
  const GlueSetup s{MassVector{1.0, 0.8, 0.5}, Relation::maximal(), 3, 0.9};
  for (std::uint64_t k = 0; k < 200; ++k) {
    const ThresholdField a(9, trial_stream(0, k));
    EXPECT_DOUBLE_EQ(glue_direct_sample(s, a), rmm(s.x, a, Relation::maximal(), s.t).norm_sq());
  }
  EXPECT_FALSE(glue_property_check(s, 2000, 9, 0, 2).rejected);
}

// R empty: the direct construction merges only across m, so its law is the
// exact law of the straddling relation.
TEST(GlueProperty, EmptyRelationMatchesCrossMergingOracle) {
  const MassVector x{1.0, 0.7, 0.6, 0.4, 0.3};
  const std::size_t m = 2;
  const double t = 1.0;
  const GlueSetup s{x, Relation::empty(), m, t};
  const auto law = enumerate_law(x, Relation::up_down(Relation::maximal(), m), t);
  // Outcomes bucketed by ||.||^2; different partitions may share a norm.
  std::vector<double> keys;
  std::vector<double> probs;
  auto key_index = [&](double v) {
    for (std::size_t k = 0; k < keys.size(); ++k)
      if (std::fabs(keys[k] - v) < 1e-9) return k;
    return keys.size();
  };
  for (const auto& [v, p] : law.outcomes) {
    const auto k = key_index(v.norm_sq());
    if (k == keys.size()) {
      keys.push_back(v.norm_sq());
      probs.push_back(p);
    } else {
      probs[k] += p;
    }
  }
  std::vector<std::size_t> count_direct(keys.size(), 0);
  std::vector<std::size_t> count_staged(keys.size(), 0);
  for (std::uint64_t k = 0; k < 20000; ++k) {
    const auto d = key_index(glue_direct_sample(s, ThresholdField(10, trial_stream(0, k))));
    const auto g = key_index(glue_two_stage_sample(s, ThresholdField(10, trial_stream(1 << 20, k))));
    ASSERT_LT(d, keys.size());
    ASSERT_LT(g, keys.size());
    ++count_direct[d];
    ++count_staged[g];
  }
  EXPECT_FALSE(chi_square_gof(count_direct, probs, 1e-3).rejected);
  EXPECT_FALSE(chi_square_gof(count_staged, probs, 1e-3).rejected);
}

TEST(Grinding, SinglePieceIsIdentity) {
  EXPECT_DOUBLE_EQ(grinding_acceptance(MassVector{2.0, 1.0}, 1, 1, 0.5), 1.0);
  const MassVector x{2.0, 1.0};
  for (std::uint64_t k = 0; k < 50; ++k) {
    const ThresholdField a(11, k);
    const auto v = grinding_sample(x, 1, 1, 0.5, a);
    ASSERT_TRUE(v.has_value());
  }
}

// Reassembly probability for (2,1), m=1, M=2: the two unit halves must share
// their own edge, probability 1 - e^{-t}.
TEST(Grinding, AcceptanceMatchesOracleAndMonteCarlo) {
  EXPECT_NEAR(grinding_acceptance(MassVector{2.0, 1.0}, 1, 2, 0.5), 1.0 - std::exp(-0.5), 1e-15);
  const auto r = grinding_check(MassVector{2.0, 1.0}, 1, 2, 0.5, 4000, 12, 0, 2);
  EXPECT_TRUE(r.acceptance_matches());
  EXPECT_FALSE(r.ks.rejected);
}

TEST(Martingale, LibraryCheckWithinThreeStandardErrors) {
  const auto r = martingale_check(MassVector{1.0, 0.8, 0.6, 0.4, 0.2}, 0.7, 20000, 13, 0, 2);
  EXPECT_LE(r.deviation(), 3.0 * r.estimate.std_error);
}

TEST(OracleFixtures, CoverTheRequiredRange) {
  const auto fixtures = oracle_fixtures();
  EXPECT_GE(fixtures.size(), 20u);
  for (const auto& f : fixtures) EXPECT_LE(f.x.size(), 5u);
}

TEST(ExactFixtures, AreSubcriticalAndSmall) {
  for (const auto& f : exact_fixtures(6)) {
    EXPECT_LE(f.x.size(), 6u);
    EXPECT_LE(f.t * f.x.norm_sq(), 0.9 + 1e-12);
  }
}
