#pragma once

// Desk-scale experiments on the block model: convergence of the rescaled
// largest component along n, and the largest-component exceedance
// probability along n in the three near-critical regimes.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "coalesce/bounds.hpp"
#include "coalesce/error.hpp"
#include "coalesce/mass_vector.hpp"
#include "coalesce/parallel.hpp"
#include "coalesce/relation.hpp"
#include "coalesce/rmm.hpp"
#include "coalesce/sbm.hpp"
#include "coalesce/stats.hpp"
#include "coalesce/threshold_field.hpp"

namespace coalesce {

// Samples of the first coordinate of zeta^(n)(t,u), trial order.
inline std::vector<double> zeta_largest_samples(std::size_t n, std::size_t m, double t, double u, SampleMode mode,
                                                std::size_t trials, std::uint64_t seed, std::uint64_t stream_base,
                                                unsigned threads) {
  critical_times(n, t, u);
  return parallel_map(trials, threads, [&](std::size_t k) -> double {
    return zeta_n(n, m, t, u, mode, seed, trial_stream(stream_base, k)).largest();
  });
}

struct ConvergencePoint {
  std::size_t n = 0;
  std::uint64_t stream_id = 0;
  MeanEstimate largest;
};

struct ConvergenceStep {
  std::size_t n_from = 0;
  std::size_t n_to = 0;
  TwoSampleResult ks;
};

struct ConvergenceResult {
  std::vector<ConvergencePoint> points;
  std::vector<ConvergenceStep> steps;  // consecutive entries of the n list

  // KS distances strictly decrease along the list.
  [[nodiscard]] bool decreasing() const {
    for (std::size_t k = 1; k < steps.size(); ++k)
      if (!(steps[k].ks.statistic < steps[k - 1].ks.statistic)) return false;
    return true;
  }
};

inline ConvergenceResult convergence_experiment(std::size_t m, double t, double u, const std::vector<std::size_t>& ns,
                                                std::size_t trials, SampleMode mode, std::uint64_t seed,
                                                std::uint64_t stream_base, unsigned threads, double alpha = 0.01) {
  if (trials < 2) throw UsageError("convergence: need at least two trials");
  if (ns.empty()) throw UsageError("convergence: empty n list");
  ConvergenceResult out;
  std::vector<std::vector<double>> samples;
  for (std::size_t k = 0; k < ns.size(); ++k) {
    const std::uint64_t base = stream_base + k * (std::uint64_t{1} << 32);
    samples.push_back(zeta_largest_samples(ns[k], m, t, u, mode, trials, seed, base, threads));
    out.points.push_back({ns[k], base, estimate_mean(samples.back())});
  }
  for (std::size_t k = 1; k < ns.size(); ++k)
    out.steps.push_back({ns[k - 1], ns[k], ks_two_sample(samples[k - 1], samples[k], alpha)});
  return out;
}

// Near-critical schedules for G_m(n, p_n, q_n):
//   critical:       p_n = 1/n + t n^{-4/3},        q_n = u n^{-4/3}
//   supercritical:  p_n = 1/n + n^{-gap},          q_n = u n^{-4/3}
//   subcritical:    p_n = 1/n - n^{-gap},          q_n = u n^{-4/3}
//   dense:          p_n = t/(mn),                  q_n = u/(mn)
// with 1 < gap < 4/3, so that |p_n - 1/n| is far outside the critical window.
// The dense schedule has a giant component iff t + (m-1)u > m.
enum class Regime { kCritical, kSupercritical, kSubcritical, kDense };

inline Regime parse_regime(const std::string& s) {
  if (s == "i" || s == "critical") return Regime::kCritical;
  if (s == "ii" || s == "supercritical") return Regime::kSupercritical;
  if (s == "iii" || s == "subcritical") return Regime::kSubcritical;
  if (s == "dense") return Regime::kDense;
  throw UsageError("unknown regime '" + s + "' (expected i, ii, iii, dense)");
}

inline const char* regime_name(Regime r) {
  switch (r) {
    case Regime::kCritical:
      return "i";
    case Regime::kSupercritical:
      return "ii";
    case Regime::kSubcritical:
      return "iii";
    default:
      return "dense";
  }
}

inline SbmParams regime_params(Regime regime, std::size_t n, std::size_t m, double t, double u, double gap = 1.2) {
  if (!(gap > 1.0 && gap < 4.0 / 3.0)) throw DomainError("regime_params: gap must lie in (1, 4/3)");
  const double nn = static_cast<double>(n);
  const double q = u * std::pow(nn, -4.0 / 3.0);
  switch (regime) {
    case Regime::kCritical:
      return SbmParams::critical(n, m, t, u);
    case Regime::kSupercritical:
      return SbmParams::raw(n, m, 1.0 / nn + std::pow(nn, -gap), q);
    case Regime::kDense: {
      const double mn = static_cast<double>(m) * nn;
      return SbmParams::raw(n, m, t / mn, u / mn);
    }
    default: {
      const double p = 1.0 / nn - std::pow(nn, -gap);
      if (p < 0.0) throw DomainError("regime_params: n too small for the subcritical schedule");
      return SbmParams::raw(n, m, p, q);
    }
  }
}

// Wilson score interval for a binomial proportion.
struct Proportion {
  double estimate = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  std::size_t trials = 0;
};

inline Proportion wilson_interval(std::size_t hits, std::size_t trials, double z = kZ99) {
  if (trials == 0) throw UsageError("wilson_interval: no trials");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(hits) / n;
  const double z2 = z * z;
  const double centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / (1.0 + z2 / n);
  return {p, std::max(0.0, centre - half), std::min(1.0, centre + half), trials};
}

struct PhasePoint {
  std::size_t n = 0;
  double p = 0.0;
  double q = 0.0;
  std::uint64_t stream_id = 0;
  Proportion exceedance;  // P{ n^{-2/3} C > level }
  double mean_scaled = 0.0;
};

inline std::vector<PhasePoint> phase_sweep(Regime regime, std::size_t m, double t, double u,
                                           const std::vector<std::size_t>& ns, double level, std::size_t trials,
                                           std::uint64_t seed, std::uint64_t stream_base, unsigned threads,
                                           double gap = 1.2) {
  if (trials == 0) throw UsageError("phase-sweep: trials must be positive");
  if (!(level > 0.0)) throw DomainError("phase-sweep: level must be positive");
  std::vector<PhasePoint> out;
  for (std::size_t k = 0; k < ns.size(); ++k) {
    const auto params = regime_params(regime, ns[k], m, t, u, gap);
    const std::uint64_t base = stream_base + k * (std::uint64_t{1} << 32);
    const auto sample = largest_component(params, trials, seed, base, threads);
    std::size_t hits = 0;
    for (double c : sample.scaled_sizes) hits += c > level;
    out.push_back({ns[k], params.p, params.q, base, wilson_interval(hits, trials), sample.mean});
  }
  return out;
}

enum class Trend { kIncreasing, kDecreasing, kConstant, kMixed };

inline const char* trend_name(Trend t) {
  switch (t) {
    case Trend::kIncreasing:
      return "increasing";
    case Trend::kDecreasing:
      return "decreasing";
    case Trend::kConstant:
      return "constant";
    default:
      return "mixed";
  }
}

// Direction of the point estimates along n. Weak monotonicity is enough:
// estimates saturate at 0 or 1 once n is large in the off-critical regimes.
inline bool nondecreasing(const std::vector<PhasePoint>& points) {
  for (std::size_t k = 1; k < points.size(); ++k)
    if (points[k].exceedance.estimate < points[k - 1].exceedance.estimate) return false;
  return true;
}

inline bool nonincreasing(const std::vector<PhasePoint>& points) {
  for (std::size_t k = 1; k < points.size(); ++k)
    if (points[k].exceedance.estimate > points[k - 1].exceedance.estimate) return false;
  return true;
}

inline Trend sweep_trend(const std::vector<PhasePoint>& points) {
  const bool up = nondecreasing(points);
  const bool down = nonincreasing(points);
  if (up && down) return Trend::kConstant;
  if (up) return Trend::kIncreasing;
  if (down) return Trend::kDecreasing;
  return Trend::kMixed;
}

// Fourth moments of X(t), the multiplicative coalescent started from x,
// sampled through the graphical construction with the maximal relation.
struct MomentsResult {
  MeanEstimate norm_fourth;  // E ||X(t)||^4
  MeanEstimate sum_fourth;   // sum_k E X_k(t)^4
  std::optional<double> bound;  // fourth-norm bound, when t ||x||^2 < 1
  std::uint64_t stream_id = 0;
};

inline MomentsResult moments_experiment(const MassVector& x, double t, std::size_t trials, std::uint64_t seed,
                                        std::uint64_t stream_base, unsigned threads) {
  if (trials < 2) throw UsageError("moments: need at least two trials");
  check_time(t);
  const auto maximal = Relation::maximal();
  const auto states = parallel_map(trials, threads, [&](std::size_t k) {
    return rmm(x, ThresholdField(seed, trial_stream(stream_base, k)), maximal, t);
  });
  std::vector<double> norm4(trials), sum4(trials);
  for (std::size_t k = 0; k < trials; ++k) {
    const double sq = states[k].norm_sq();
    norm4[k] = sq * sq;
    sum4[k] = sum_of_powers(states[k].values(), 4);
  }
  MomentsResult out{estimate_mean(norm4), estimate_mean(sum4), std::nullopt, stream_base};
  if (t > 0.0 && t * x.norm_sq() < 1.0) out.bound = bound_fourth_norm(x, t);
  return out;
}

}  // namespace coalesce
