#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "coalesce/compensated_sum.hpp"
#include "coalesce/error.hpp"
#include "coalesce/threshold_field.hpp"

using namespace coalesce;

// Published known-answer vectors for Philox2x64-10.
TEST(Philox, KnownAnswerVectors) {
  auto a = detail::philox2x64_10(0, 0, 0);
  EXPECT_EQ(a[0], 0xca00a0459843d731ULL);
  EXPECT_EQ(a[1], 0x66c24222c9a845b5ULL);
  auto b = detail::philox2x64_10(~0ULL, ~0ULL, ~0ULL);
  EXPECT_EQ(b[0], 0x65b021d60cd8310fULL);
  EXPECT_EQ(b[1], 0x4d02f3222f86df20ULL);
  auto c = detail::philox2x64_10(0xa4093822299f31d0ULL, 0x243f6a8885a308d3ULL, 0x13198a2e03707344ULL);
  EXPECT_EQ(c[0], 0x0a5e742c2997341cULL);
  EXPECT_EQ(c[1], 0xb0f883d38000de5dULL);
}

TEST(OpenUnit, StaysInsideTheInterval) {
  EXPECT_GT(to_open_unit(0), 0.0);
  EXPECT_LT(to_open_unit(~0ULL), 1.0);
  EXPECT_GT(to_exponential(~0ULL), 0.0);
  EXPECT_TRUE(std::isfinite(to_exponential(0)));
}

TEST(ThresholdField, DeterministicAndSymmetric) {
  const ThresholdField a(42, 7);
  const ThresholdField b(42, 7);
  for (std::uint64_t i = 1; i < 20; ++i)
    for (std::uint64_t j = i + 1; j < 20; ++j) {
      EXPECT_EQ(a(i, j), b(i, j));
      EXPECT_EQ(a(i, j), a(j, i));
    }
}

TEST(ThresholdField, LoopsAndVertexZeroAreRejected) {
  const ThresholdField a(1, 0);
  EXPECT_THROW((void)a(3, 3), UsageError);
  EXPECT_THROW((void)a(0, 2), UsageError);
}

TEST(ThresholdField, ShiftIsAnIndexOffsetView) {
  const ThresholdField a(5, 3);
  const auto up = a.shifted(4);
  for (std::uint64_t i = 1; i < 10; ++i)
    for (std::uint64_t j = i + 1; j < 10; ++j) EXPECT_EQ(up(i, j), a(i + 4, j + 4));
  EXPECT_EQ(up.shifted(2)(1, 2), a(7, 8));
}

TEST(ThresholdField, CopiesAndStreamsDiffer) {
  const ThresholdField a(5, 3);
  EXPECT_NE(a(1, 2), a.independent_copy()(1, 2));
  EXPECT_NE(a(1, 2), ThresholdField(6, 3)(1, 2));
  EXPECT_EQ(a.independent_copy().stream_id(), 4u);
}

TEST(ThresholdField, ExponentialMeanOverAMillionEdges) {
  const ThresholdField a(2024, 0);
  CompensatedSum sum;
  CompensatedSum sq;
  std::size_t count = 0;
  for (std::uint64_t i = 1; count < 1000000; ++i)
    for (std::uint64_t j = i + 1; j <= i + 1000 && count < 1000000; ++j, ++count) {
      const double v = a(i, j);
      sum += v;
      sq += v * v;
    }
  const double mean = sum.value() / 1e6;
  EXPECT_NEAR(mean, 1.0, 0.01);
  EXPECT_NEAR(sq.value() / 1e6, 2.0, 0.03);  // E X^2 = 2
}

TEST(ThresholdField, TailMatchesExponential) {
  const ThresholdField a(99, 1);
  std::size_t above = 0;
  const std::size_t n = 200000;
  for (std::uint64_t k = 1; k <= n; ++k) above += a(k, k + 1) > 2.0;
  const double p = std::exp(-2.0);
  EXPECT_NEAR(static_cast<double>(above) / n, p, 5.0 * std::sqrt(p * (1 - p) / n));
}

TEST(StreamRng, DeterministicPerStream) {
  StreamRng a(1, 2);
  StreamRng b(1, 2);
  StreamRng c(1, 3);
  std::set<std::uint64_t> seen;
  for (int k = 0; k < 100; ++k) {
    const auto x = a();
    EXPECT_EQ(x, b());
    seen.insert(x);
    seen.insert(c());
  }
  EXPECT_EQ(seen.size(), 200u);
}

TEST(StreamRng, TrialStreamsDoNotOverlap) {
  EXPECT_EQ(trial_stream(100, 0), 100u);
  EXPECT_EQ(trial_stream(100, 3), 100u + 3 * kStreamsPerTrial);
}
