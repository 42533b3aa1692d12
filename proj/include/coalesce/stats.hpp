#pragma once

// Monte Carlo estimators and goodness-of-fit tests on scalar samples.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "coalesce/compensated_sum.hpp"
#include "coalesce/error.hpp"
#include "coalesce/parallel.hpp"
#include "coalesce/threshold_field.hpp"

namespace coalesce {

inline constexpr double kZ99 = 2.5758293035489004;  // two-sided 99% normal quantile

struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  double half_width = 0.0;  // 99% normal-approximation half width
  std::size_t trials = 0;

  [[nodiscard]] double lower() const { return mean - half_width; }
  [[nodiscard]] double upper() const { return mean + half_width; }
};

inline MeanEstimate estimate_mean(std::span<const double> samples) {
  if (samples.size() < 2) throw UsageError("estimate_mean: need at least two trials");
  CompensatedSum sum;
  for (double v : samples) sum += v;
  const double n = static_cast<double>(samples.size());
  const double mean = sum.value() / n;
  CompensatedSum dev;
  for (double v : samples) dev += (v - mean) * (v - mean);
  const double variance = dev.value() / (n - 1.0);
  MeanEstimate out;
  out.mean = mean;
  out.std_error = std::sqrt(variance / n);
  out.half_width = kZ99 * out.std_error;
  out.trials = samples.size();
  return out;
}

// Runs sampler(stream_id) for trial streams base, base+16, ... and estimates
// the mean. Results are reduced in trial order.
template <typename Sampler>
MeanEstimate estimate_mean(Sampler&& sampler, std::size_t trials, std::uint64_t stream_base, unsigned threads) {
  const auto samples =
      parallel_map(trials, threads, [&](std::size_t k) -> double { return sampler(trial_stream(stream_base, k)); });
  return estimate_mean(samples);
}

struct TwoSampleResult {
  double statistic = 0.0;
  double threshold = 0.0;
  bool rejected = false;
  double alpha = 0.0;
  std::size_t size_a = 0;
  std::size_t size_b = 0;
};

// Asymptotic Kolmogorov critical value c(alpha) = sqrt(-ln(alpha/2)/2).
inline double ks_critical_value(double alpha) { return std::sqrt(-0.5 * std::log(alpha / 2.0)); }

// Values closer than this (relative) are one atom: equal partitions reached
// by different summation orders differ in the last bits.
inline constexpr double kTieTolerance = 1e-12;

// sup_x |F_a(x) - F_b(x)|, evaluated after all ties at x are consumed.
inline double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t ia = 0;
  std::size_t ib = 0;
  double d = 0.0;
  while (ia < a.size() || ib < b.size()) {
    double x;
    if (ib == b.size() || (ia < a.size() && a[ia] <= b[ib]))
      x = a[ia];
    else
      x = b[ib];
    const double upto = x + kTieTolerance * std::max(1.0, std::fabs(x));
    while (ia < a.size() && a[ia] <= upto) ++ia;
    while (ib < b.size() && b[ib] <= upto) ++ib;
    d = std::max(d, std::fabs(static_cast<double>(ia) / na - static_cast<double>(ib) / nb));
  }
  return d;
}

inline TwoSampleResult ks_two_sample(std::span<const double> a, std::span<const double> b, double alpha) {
  if (a.size() < 25 || b.size() < 25) throw UsageError("ks_two_sample: each sample needs at least 25 values");
  if (!(alpha > 0.0 && alpha < 1.0)) throw UsageError("ks_two_sample: alpha must lie in (0,1)");
  TwoSampleResult out;
  out.statistic = ks_statistic({a.begin(), a.end()}, {b.begin(), b.end()});
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  out.threshold = ks_critical_value(alpha) * std::sqrt((na + nb) / (na * nb));
  out.rejected = out.statistic > out.threshold;
  out.alpha = alpha;
  out.size_a = a.size();
  out.size_b = b.size();
  return out;
}

// One-sample KS against a continuous CDF.
template <typename Cdf>
TwoSampleResult ks_one_sample(std::span<const double> a, Cdf&& cdf, double alpha) {
  if (a.size() < 25) throw UsageError("ks_one_sample: need at least 25 values");
  std::vector<double> sorted(a.begin(), a.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    const double f = cdf(sorted[k]);
    d = std::max({d, f - static_cast<double>(k) / n, static_cast<double>(k + 1) / n - f});
  }
  TwoSampleResult out;
  out.statistic = d;
  out.threshold = ks_critical_value(alpha) / std::sqrt(n);
  out.rejected = d > out.threshold;
  out.alpha = alpha;
  out.size_a = sorted.size();
  return out;
}

struct ChiSquareResult {
  double statistic = 0.0;
  double threshold = 0.0;
  std::size_t degrees_of_freedom = 0;
  bool rejected = false;
};

// Pearson goodness of fit of observed counts to exact probabilities. Cells
// with expected count below `min_expected` are pooled into one cell.
inline ChiSquareResult chi_square_gof(std::span<const std::size_t> observed, std::span<const double> probabilities,
                                      double alpha, double min_expected = 5.0) {
  if (observed.size() != probabilities.size()) throw UsageError("chi_square_gof: size mismatch");
  std::size_t total = 0;
  for (auto c : observed) total += c;
  if (total == 0) throw UsageError("chi_square_gof: no observations");
  const double n = static_cast<double>(total);
  for (std::size_t k = 0; k < observed.size(); ++k)
    if (probabilities[k] <= 0.0 && observed[k] > 0) return {INFINITY, 0.0, 0, true};  // impossible outcome seen

  double stat = 0.0;
  std::size_t cells = 0;
  double pooled_expected = 0.0;
  double pooled_observed = 0.0;
  for (std::size_t k = 0; k < observed.size(); ++k) {
    const double e = probabilities[k] * n;
    if (e < min_expected) {
      pooled_expected += e;
      pooled_observed += static_cast<double>(observed[k]);
      continue;
    }
    const double diff = static_cast<double>(observed[k]) - e;
    stat += diff * diff / e;
    ++cells;
  }
  if (pooled_expected > 0.0) {
    const double diff = pooled_observed - pooled_expected;
    stat += diff * diff / pooled_expected;
    ++cells;
  }

  ChiSquareResult out;
  out.statistic = stat;
  out.degrees_of_freedom = cells > 1 ? cells - 1 : 0;
  if (out.degrees_of_freedom == 0) {
    out.threshold = 0.0;
    out.rejected = stat > 0.0;
    return out;
  }
  const boost::math::chi_squared dist(static_cast<double>(out.degrees_of_freedom));
  out.threshold = boost::math::quantile(boost::math::complement(dist, alpha));
  out.rejected = stat > out.threshold;
  return out;
}

}  // namespace coalesce
