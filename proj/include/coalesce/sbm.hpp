#pragma once

// Stochastic block model G_m(n, p, q) with classes B_l = {l, m+l, ..., (n-1)m+l}
// and its near-critical rescaling zeta^(n)(t, u), sampled either through the
// shared threshold table (coupled) or by direct Bernoulli edge sampling with
// geometric skipping (fast).

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "coalesce/error.hpp"
#include "coalesce/mass_vector.hpp"
#include "coalesce/parallel.hpp"
#include "coalesce/relation.hpp"
#include "coalesce/rmm.hpp"
#include "coalesce/threshold_field.hpp"
#include "coalesce/union_find.hpp"

namespace coalesce {

struct CriticalTimes {
  double t_n;
  double u_n;
};

// t_n = -n^{4/3} ln(1 - 1/n - t n^{-4/3}), u_n = -n^{4/3} ln(1 - u n^{-4/3}).
inline CriticalTimes critical_times(std::size_t n, double t, double u) {
  if (n == 0) throw DomainError("critical_times: n must be positive");
  if (u < 0.0) throw DomainError("critical_times: u must be nonnegative");
  const double nn = static_cast<double>(n);
  const double scale = std::pow(nn, 4.0 / 3.0);
  const double p = 1.0 / nn + t / scale;
  const double q = u / scale;
  if (!(p >= 0.0 && p < 1.0)) throw DomainError("critical_times: 1/n + t n^{-4/3} must lie in [0,1); n too small");
  if (!(q < 1.0)) throw DomainError("critical_times: u n^{-4/3} must be < 1; n too small");
  return {-scale * std::log1p(-p), -scale * std::log1p(-q)};
}

struct SbmParams {
  std::size_t n = 0;  // vertices per class
  std::size_t m = 1;  // classes
  double p = 0.0;     // intra-class edge probability
  double q = 0.0;     // inter-class edge probability

  static SbmParams raw(std::size_t n, std::size_t m, double p, double q) {
    if (n == 0 || m == 0) throw UsageError("SbmParams: n and m must be positive");
    if (!(p >= 0.0 && p <= 1.0) || !(q >= 0.0 && q <= 1.0)) throw DomainError("SbmParams: p and q must lie in [0,1]");
    return {n, m, p, q};
  }

  // p_n = 1/n + t n^{-4/3}, q_n = u n^{-4/3}; rejects n below n_0.
  static SbmParams critical(std::size_t n, std::size_t m, double t, double u) {
    critical_times(n, t, u);
    const double nn = static_cast<double>(n);
    const double scale = std::pow(nn, 4.0 / 3.0);
    return raw(n, m, 1.0 / nn + t / scale, u / scale);
  }

  [[nodiscard]] std::size_t vertex_count() const { return n * m; }
};

// 1-based class of vertex v under the round-robin layout.
inline std::size_t class_of(std::size_t v, std::size_t m) { return (v - 1) % m + 1; }

// Calls f(k) for each k in [0, count) independently with probability p, in
// increasing order, using O(1 + successes) uniforms.
template <typename F>
void for_each_bernoulli(std::uint64_t count, double p, StreamRng& rng, F&& f) {
  if (count == 0 || p <= 0.0) return;
  if (p >= 1.0) {
    for (std::uint64_t k = 0; k < count; ++k) f(k);
    return;
  }
  const double log_q = std::log1p(-p);
  std::uint64_t k = 0;
  while (true) {
    const double skip = std::floor(std::log(rng.uniform()) / log_q);
    if (skip >= static_cast<double>(count - k)) return;
    k += static_cast<std::uint64_t>(skip);
    f(k);
    if (++k >= count) return;
  }
}

// Component sizes (unit masses) of one draw of G_m(n, p, q).
inline ComponentVector sbm_fast_sample(const SbmParams& params, StreamRng& rng) {
  const std::size_t n = params.n;
  const std::size_t m = params.m;
  UnionFind sets(n * m);
  auto vertex = [m](std::size_t cls, std::size_t k) { return k * m + cls; };  // 0-based

  const std::uint64_t intra_pairs = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  for (std::size_t cls = 0; cls < m; ++cls) {
    // Triangular index k -> (row > col), rows visited in increasing order.
    std::uint64_t row = 1;
    std::uint64_t row_start = 0;
    for_each_bernoulli(intra_pairs, params.p, rng, [&](std::uint64_t k) {
      while (k >= row_start + row) {
        row_start += row;
        ++row;
      }
      sets.unite(vertex(cls, row), vertex(cls, k - row_start));
    });
  }

  if (m > 1) {
    // All ordered class pairs (a < b), each an n x n block, one index space.
    const std::uint64_t block = static_cast<std::uint64_t>(n) * n;
    const std::uint64_t class_pairs = static_cast<std::uint64_t>(m) * (m - 1) / 2;
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    pairs.reserve(class_pairs);
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = a + 1; b < m; ++b) pairs.emplace_back(a, b);
    for_each_bernoulli(block * class_pairs, params.q, rng, [&](std::uint64_t k) {
      const auto [a, b] = pairs[k / block];
      const std::uint64_t r = k % block;
      sets.unite(vertex(a, r / n), vertex(b, r % n));
    });
  }

  std::vector<double> sizes;
  sizes.reserve(sets.class_count());
  for (std::size_t v = 0; v < n * m; ++v)
    if (sets.find(v) == v) sizes.push_back(static_cast<double>(sets.class_size(v)));
  return ComponentVector::from_unsorted(std::move(sizes));
}

inline ComponentVector scaled(const ComponentVector& v, double factor) {
  std::vector<double> out = v.data();
  for (double& a : out) a *= factor;
  return ComponentVector::from_unsorted(std::move(out));
}

// x^(n): n*m entries equal to n^{-2/3}.
inline MassVector critical_masses(std::size_t n, std::size_t m) {
  return MassVector(std::vector<double>(n * m, std::pow(static_cast<double>(n), -2.0 / 3.0)));
}

// Per-class merging: RMM_{t_n} of x^(n) restricted to class B_l under the
// intra-class relation, trailing zeros dropped.
inline ComponentVector class_components(const MassVector& x, std::size_t m, std::size_t l, const ThresholdField& field,
                                        double t_n) {
  std::vector<double> masked(x.size(), 0.0);
  for (std::size_t v = l; v <= x.size(); v += m) masked[v - 1] = x[v - 1];
  return rmm(MassVector(std::move(masked)), field, Relation::intra_class(m, l), t_n).trimmed();
}

// zeta^(n)(t,u) through the three-step graphical construction: per-class
// merging with A at t_n, round-robin join, inter-class merging with the
// independent copy A' at u_n.
inline ComponentVector zeta_n_coupled(std::size_t n, std::size_t m, double t, double u, const ThresholdField& field) {
  const auto times = critical_times(n, t, u);
  const MassVector x = critical_masses(n, m);
  std::vector<ComponentVector> per_class;
  per_class.reserve(m);
  for (std::size_t l = 1; l <= m; ++l) per_class.push_back(class_components(x, m, l, field, times.t_n));
  const MassVector joined = round_robin_join(per_class);
  return rmm(joined, field.independent_copy(), Relation::inter_class(m), times.u_n);
}

// Same law as zeta_n_coupled via direct sampling of G_m(n, p_n, q_n).
inline ComponentVector zeta_n_fast(std::size_t n, std::size_t m, double t, double u, StreamRng& rng) {
  const auto params = SbmParams::critical(n, m, t, u);
  return scaled(sbm_fast_sample(params, rng), std::pow(static_cast<double>(n), -2.0 / 3.0));
}

enum class SampleMode { kCoupled, kFast };

// One trial of zeta^(n)(t,u); the trial's stream block supplies A, A' and the
// fast-mode generator.
inline ComponentVector zeta_n(std::size_t n, std::size_t m, double t, double u, SampleMode mode, std::uint64_t seed,
                              std::uint64_t stream_id) {
  if (mode == SampleMode::kCoupled) return zeta_n_coupled(n, m, t, u, ThresholdField(seed, stream_id));
  StreamRng rng(seed, stream_id + 2);
  return zeta_n_fast(n, m, t, u, rng);
}

struct LargestComponentSample {
  std::vector<double> scaled_sizes;  // n^{-2/3} C per trial, trial order
  double mean = 0.0;

  // Empirical P{ n^{-2/3} C > level }.
  [[nodiscard]] double exceedance(double level) const {
    if (scaled_sizes.empty()) return 0.0;
    std::size_t hits = 0;
    for (double c : scaled_sizes)
      if (c > level) ++hits;
    return static_cast<double>(hits) / static_cast<double>(scaled_sizes.size());
  }

  // Empirical CDF at c.
  [[nodiscard]] double cdf(double c) const { return 1.0 - exceedance(c); }
};

// Monte Carlo law of the largest component C(n, p, q) of G_m(n, p, q).
inline LargestComponentSample largest_component(const SbmParams& params, std::size_t trials, std::uint64_t seed,
                                                std::uint64_t stream_base, unsigned threads) {
  const double factor = std::pow(static_cast<double>(params.n), -2.0 / 3.0);
  LargestComponentSample out;
  out.scaled_sizes = parallel_map(trials, threads, [&](std::size_t k) {
    StreamRng rng(seed, trial_stream(stream_base, k));
    return sbm_fast_sample(params, rng).largest() * factor;
  });
  double sum = 0.0;
  for (double c : out.scaled_sizes) sum += c;
  out.mean = trials ? sum / static_cast<double>(trials) : 0.0;
  return out;
}

}  // namespace coalesce
