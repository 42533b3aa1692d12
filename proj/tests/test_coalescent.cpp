#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "coalesce/coalescent.hpp"
#include "coalesce/exact_oracle.hpp"
#include "coalesce/stats.hpp"

using namespace coalesce;

TEST(JumpProcess, SingleBlockNeverJumps) {
  StreamRng rng(1, 1);
  const auto path = simulate_jump_process(MassVector{2.5}, 100.0, rng);
  EXPECT_EQ(path.jump_count(), 0u);
  EXPECT_DOUBLE_EQ(path.state_at(100.0).largest(), 2.5);
}

TEST(JumpProcess, MassConservedAndBlocksDropByOne) {
  StreamRng rng(2, 2);
  const MassVector x{1.0, 0.8, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1};
  const auto path = simulate_jump_process(x, 10.0, rng);
  for (std::size_t k = 0; k < path.points.size(); ++k) {
    EXPECT_NEAR(path.points[k].state.total(), x.total(), 1e-12);
    EXPECT_EQ(path.points[k].state.block_count(), x.len() - k);
    if (k > 0) {
      EXPECT_GT(path.points[k].time, path.points[k - 1].time);
    }
  }
}

TEST(JumpProcess, RejectsNegativeHorizon) {
  StreamRng rng(1, 1);
  EXPECT_THROW(simulate_jump_process(MassVector{1.0, 1.0}, -1.0, rng), UsageError);
}

TEST(Martingale, SingleBlockAndTimeZero) {
  StreamRng rng(3, 3);
  const auto single = simulate_jump_process(MassVector{1.5}, 4.0, rng);
  for (double t : {0.0, 1.0, 4.0}) EXPECT_DOUBLE_EQ(martingale_functional(single, t), 2.25);
  const MassVector x{1.0, 0.5, 0.25};
  const auto path = simulate_jump_process(x, 1.0, rng);
  EXPECT_DOUBLE_EQ(martingale_functional(path, 0.0), x.norm_sq());
}

// Two unit blocks merge at an Exp(1) time tau: M(t) = 4 - 2 tau if tau <= t,
// else 2 - 2t, and E M(t) = 2 in closed form.
TEST(Martingale, TwoUnitBlocksMeanIsTwo) {
  const MassVector x{1.0, 1.0};
  std::vector<double> values;
  for (std::uint64_t k = 0; k < 100000; ++k) {
    StreamRng rng(4, k);
    values.push_back(martingale_functional(simulate_jump_process(x, 0.5, rng), 0.5));
  }
  const auto est = estimate_mean(values);
  EXPECT_LE(std::fabs(est.mean - 2.0), 3.0 * est.std_error);
}

// Law of the jump process at time t against the exact enumeration of the
// graphical construction with the maximal relation.
TEST(JumpProcess, MatchesExactLawAtFixedTime) {
  const MassVector x{0.5, 0.5, 0.5};
  const auto law = enumerate_law(x, Relation::maximal(), 1.0);
  std::vector<std::size_t> counts(law.outcomes.size(), 0);
  std::vector<double> probs;
  for (const auto& o : law.outcomes) probs.push_back(o.second);
  for (std::uint64_t k = 0; k < 50000; ++k) {
    StreamRng rng(5, k);
    const auto state = simulate_jump_process(x, 1.0, rng).state_at(1.0);
    const auto idx = law.index_of(state);
    ASSERT_LT(idx, law.outcomes.size());
    ++counts[idx];
  }
  EXPECT_FALSE(chi_square_gof(counts, probs, 1e-3).rejected);
}

TEST(Trajectory, CsvHasFullPrecision) {
  StreamRng rng(6, 6);
  const auto path = simulate_jump_process(MassVector{1.0, 1.0}, 5.0, rng);
  std::ostringstream out;
  write_trajectory_csv(out, path);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "time,block_count,norm_sq,largest_mass");
  ASSERT_EQ(path.points.size(), 2u);
  std::getline(in, line);
  std::getline(in, line);
  EXPECT_EQ(std::stod(line.substr(0, line.find(','))), path.points[1].time);
}
