#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "coalesce/bounds.hpp"
#include "coalesce/error.hpp"
#include "coalesce/exact_oracle.hpp"
#include "generators.hpp"

using namespace coalesce;

TEST(PairBound, Examples) {
  const MassVector x{0.5, 0.5, 0.5};
  EXPECT_DOUBLE_EQ(bound_connect_pair(x, 1.0, 1, 2), 1.0);
  EXPECT_LT(bound_connect_pair(x, 1e-12, 1, 2), 1e-12);
  EXPECT_DOUBLE_EQ(bound_connect_pair(MassVector{0.5, 0.0, 0.5}, 1.0, 1, 2), 0.0);
  EXPECT_DOUBLE_EQ(bound_connect_pair(x, 1.0, 1, 9), 0.0);  // outside the support
  EXPECT_THROW(bound_connect_pair(x, 4.0 / 3.0, 1, 2), DomainError);
  EXPECT_THROW(bound_connect_pair(x, 0.0, 1, 2), DomainError);
}

TEST(StraddlingBound, KappaCases) {
  const MassVector x{1.0, 0.5, 0.4, 0.2};
  const double t = 0.7;
  const double a = 1.0 + 0.25;
  const double b = 0.16 + 0.04;
  const double gap = 1.0 - t * t * a * b;
  EXPECT_DOUBLE_EQ(bound_connect_straddling(x, t, 2, 1, 2), 1.0 * 0.5 * t * t * b / gap);
  EXPECT_DOUBLE_EQ(bound_connect_straddling(x, t, 2, 3, 4), 0.4 * 0.2 * t * t * a / gap);
  EXPECT_DOUBLE_EQ(bound_connect_straddling(x, t, 2, 1, 4), 1.0 * 0.2 * t / gap);
  EXPECT_DOUBLE_EQ(bound_connect_straddling(MassVector{1.0, 0.0, 0.4}, t, 2, 2, 3), 0.0);
}

TEST(TailPolynomial, Values) {
  EXPECT_DOUBLE_EQ(tail_polynomial(0.0, 3.7), 2.0);
  EXPECT_DOUBLE_EQ(tail_polynomial(2.5, 0.0), 2.0);
  EXPECT_DOUBLE_EQ(tail_polynomial(1.0, 1.0), 10.0);
  EXPECT_THROW(tail_polynomial(-1.0, 1.0), DomainError);
}

TEST(StraddlingGrowthBound, Formula) {
  const MassVector x{1.0, 0.5, 0.4, 0.2};
  EXPECT_DOUBLE_EQ(bound_straddling_growth(x, 1.0, 2, 0.5), 0.2 * tail_polynomial(1.0, 1.25) / 0.5);
  EXPECT_THROW(bound_straddling_growth(x, 1.0, 2, 0.0), DomainError);
  EXPECT_THROW(bound_straddling_growth(x, 1.0, 2, 1.5), DomainError);
}

TEST(TupleBound, ExponentsAndZeros) {
  const MassVector x{0.6, 0.5, 0.4, 0.3};
  const double t = 0.9;
  const double gap = 1.0 - t * x.norm_sq();
  const std::vector<std::size_t> three = {1, 2, 3};
  const std::vector<std::size_t> four = {1, 2, 3, 4};
  EXPECT_NEAR(bound_connect_tuple(x, t, three), 120.0 * 0.6 * 0.5 * 0.4 * std::pow(t, 1.5) / std::pow(gap, 3), 1e-12);
  EXPECT_NEAR(bound_connect_tuple(x, t, four), 120.0 * 0.6 * 0.5 * 0.4 * 0.3 * t * t / std::pow(gap, 5), 1e-12);
  EXPECT_DOUBLE_EQ(bound_connect_tuple(MassVector{0.6, 0.0, 0.4}, t, three), 0.0);
  const std::vector<std::size_t> repeated = {1, 1, 2};
  EXPECT_THROW(bound_connect_tuple(x, t, repeated), UsageError);
}

TEST(FourthMomentBound, AssembledConstant) {
  EXPECT_EQ(kFourthMomentConstant, 1579.0);
  const MassVector unit{0.6, 0.8};  // ||x||^2 = 1
  EXPECT_NEAR(bound_fourth_norm(unit, 0.1), 1579.0 / std::pow(0.9, 5), 1e-9);
  // Scaling x by c and t by 1/c^2 scales the bound by c^4.
  const MassVector doubled{1.2, 1.6};
  EXPECT_NEAR(bound_fourth_norm(doubled, 0.025), 16.0 * bound_fourth_norm(unit, 0.1), 1e-9);
  EXPECT_THROW(bound_fourth_norm(unit, 1.0), DomainError);
  EXPECT_GT(bound_fourth_norm(unit, 1.0 - 1e-6), 1e30);
}

TEST(SecondMomentBound, Formula) {
  const MassVector y{0.3, 0.4};  // ||y||^2 = 0.25
  EXPECT_DOUBLE_EQ(bound_second_moment(y, 2.0), 0.25 + 0.0625 * 2.0 / 0.5);
  EXPECT_DOUBLE_EQ(bound_second_moment(y, 0.0), 0.25);
  EXPECT_THROW(bound_second_moment(y, 4.0), DomainError);
}

TEST(BoundReport, Satisfaction) {
  const auto ok = make_report("x", 1.0, 2.0);
  EXPECT_TRUE(ok.satisfied);
  EXPECT_DOUBLE_EQ(ok.slack, 1.0);
  EXPECT_TRUE(make_report("eq", 2.0, 2.0).satisfied);
  EXPECT_FALSE(make_report("bad", 2.0, 1.0).satisfied);
}

// The pair and tuple bounds dominate exact connection probabilities.
TEST(BoundsProperty, DominateExactProbabilities) {
  gen::Rng rng(51);
  for (int trial = 0; trial < 80; ++trial) {
    const std::size_t n = gen::size_in(rng, 4, 6);
    const auto x = gen::masses(rng, n, 1.0);
    if (x.norm_sq() == 0.0) continue;
    const double t = gen::real_in(rng, 0.05, 0.9) / x.norm_sq();
    const auto& r = Relation::maximal();
    EXPECT_LE(connect_probability(x, r, t, {1, 2}), bound_connect_pair(x, t, 1, 2));
    const std::vector<std::size_t> three = {1, 2, 3};
    const std::vector<std::size_t> four = {1, 2, 3, 4};
    EXPECT_LE(connect_probability(x, r, t, three), bound_connect_tuple(x, t, three));
    EXPECT_LE(connect_probability(x, r, t, four), bound_connect_tuple(x, t, four));
  }
}
