#pragma once

// Checks of the graphical construction. Per-sample checks count violations
// of couplings that must hold for every threshold table; exact checks compare
// oracle probabilities with closed-form bounds; statistical checks compare
// two constructions of one law.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "coalesce/bounds.hpp"
#include "coalesce/coalescent.hpp"
#include "coalesce/error.hpp"
#include "coalesce/exact_oracle.hpp"
#include "coalesce/mass_vector.hpp"
#include "coalesce/parallel.hpp"
#include "coalesce/relation.hpp"
#include "coalesce/rmm.hpp"
#include "coalesce/stats.hpp"
#include "coalesce/threshold_field.hpp"
#include "coalesce/union_find.hpp"

namespace coalesce {

// Second sample of a two-sample comparison lives this many stream ids above
// the first, far beyond any trial block used by a check.
inline constexpr std::uint64_t kSideOffset = std::uint64_t{1} << 30;

namespace detail {

inline std::size_t uniform_int(StreamRng& rng, std::size_t lo, std::size_t hi) {
  const auto span = static_cast<double>(hi - lo + 1);
  return std::min(hi, lo + static_cast<std::size_t>(rng.uniform() * span));
}

inline bool coin(StreamRng& rng, double p) { return rng.uniform() < p; }

inline std::vector<double> random_masses(StreamRng& rng, std::size_t n, double zero_prob, double scale) {
  std::vector<double> out(n);
  for (double& a : out) a = coin(rng, zero_prob) ? 0.0 : scale * rng.uniform();
  return out;
}

inline std::vector<Edge> random_edge_subset(StreamRng& rng, std::span<const Edge> from, double keep) {
  std::vector<Edge> out;
  for (const auto& e : from)
    if (coin(rng, keep)) out.push_back(e);
  return out;
}

inline Relation random_relation(StreamRng& rng, std::size_t n) {
  switch (uniform_int(rng, 0, 6)) {
    case 0:
      return Relation::maximal();
    case 1:
      return Relation::empty();
    case 2: {
      const std::size_t m = uniform_int(rng, 2, 4);
      return Relation::intra_class(m, uniform_int(rng, 1, m));
    }
    case 3:
      return Relation::inter_class(uniform_int(rng, 2, 4));
    case 4:
      return Relation::up_down(Relation::maximal(), uniform_int(rng, 1, std::max<std::size_t>(1, n - 1)));
    case 5:
      return Relation::shifted(Relation::intra_class(2, 1), uniform_int(rng, 1, 3));
    default: {
      const auto all = Relation::maximal().enumerate_within(n);
      return Relation::explicit_edges(random_edge_subset(rng, all, 0.5));
    }
  }
}

// A pair r1 ⊆ r2 on [n].
inline std::pair<Relation, Relation> random_nested_relations(StreamRng& rng, std::size_t n) {
  switch (uniform_int(rng, 0, 5)) {
    case 0: {
      auto r1 = random_relation(rng, n);
      auto extra = random_relation(rng, n);
      return {r1, Relation::union_of(r1, extra)};
    }
    case 1: {
      auto r2 = random_relation(rng, n);
      return {Relation::up_down(r2, uniform_int(rng, 1, n)), r2};
    }
    case 2: {
      auto r2 = random_relation(rng, n);
      const auto edges = r2.enumerate_within(n);
      return {Relation::explicit_edges(random_edge_subset(rng, edges, 0.6)), r2};
    }
    case 3:
      return {Relation::empty(), random_relation(rng, n)};
    case 4: {
      auto r = random_relation(rng, n);
      return {r, r};
    }
    default: {
      const std::size_t m = uniform_int(rng, 2, 3);
      auto r1 = Relation::intra_class(m, uniform_int(rng, 1, m));
      if (coin(rng, 0.5)) return {r1, Relation::maximal()};
      return {r1, Relation::union_of(r1, Relation::inter_class(m))};
    }
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Per-sample couplings.

struct PerSampleResult {
  std::size_t trials = 0;
  std::size_t violations = 0;
};

// x <= y coordinatewise, r1 ⊆ r2, t1 <= t2.
struct MonotoneInstance {
  MassVector x;
  MassVector y;
  Relation r1;
  Relation r2;
  double t1 = 0.0;
  double t2 = 0.0;
};

inline MonotoneInstance random_monotone_instance(StreamRng& rng) {
  const std::size_t n = detail::uniform_int(rng, 2, 12);
  auto xs = detail::random_masses(rng, n, 0.2, 1.5);
  auto ys = xs;
  for (double& a : ys)
    if (detail::coin(rng, 0.5)) a += 0.5 * rng.uniform();
  auto [r1, r2] = detail::random_nested_relations(rng, n);
  const double t1 = 2.0 * rng.uniform();
  const double t2 = detail::coin(rng, 0.3) ? t1 : t1 + rng.uniform();
  return {MassVector(std::move(xs)), MassVector(std::move(ys)), std::move(r1), std::move(r2), t1, t2};
}

// ||RMM_{t1}(x; A, r1)|| <= ||RMM_{t2}(y; A, r2)|| and every open edge of
// the smaller graph is open in the larger one.
inline bool monotone_coupling_holds(const MonotoneInstance& inst, const ThresholdField& field) {
  const auto small = rmm(inst.x, field, inst.r1, inst.t1);
  const auto large = rmm(inst.y, field, inst.r2, inst.t2);
  if (!(small.norm_sq() <= large.norm_sq())) return false;
  auto e1 = open_edges(inst.x, field, inst.r1, inst.t1);
  auto e2 = open_edges(inst.y, field, inst.r2, inst.t2);
  std::sort(e1.begin(), e1.end());
  std::sort(e2.begin(), e2.end());
  return std::includes(e2.begin(), e2.end(), e1.begin(), e1.end());
}

// Trial k draws its instance and its table from the trial's stream block.
inline PerSampleResult monotone_coupling_check(std::size_t trials, std::uint64_t seed, std::uint64_t stream_base,
                                               unsigned threads) {
  const auto ok = parallel_map(trials, threads, [&](std::size_t k) -> int {
    const auto stream = trial_stream(stream_base, k);
    StreamRng rng(seed, stream + 1);
    return monotone_coupling_holds(random_monotone_instance(rng), ThresholdField(seed, stream)) ? 1 : 0;
  });
  PerSampleResult out{trials, 0};
  for (int v : ok) out.violations += v == 0;
  return out;
}

// x nonincreasing with at least m+1 coordinates.
struct ShiftInstance {
  MassVector x;
  Relation r;
  std::size_t m = 1;
  double t = 0.0;
};

inline ShiftInstance random_shift_instance(StreamRng& rng, std::size_t m, std::size_t max_n = 50) {
  const std::size_t n = detail::uniform_int(rng, m + 1, max_n);
  auto xs = detail::random_masses(rng, n, 0.1, 1.0);
  std::sort(xs.begin(), xs.end(), std::greater<>());
  const double norm_sq = sum_of_squares(xs);
  const double t = norm_sq > 0.0 ? 2.5 * rng.uniform() / norm_sq : rng.uniform();
  auto r = detail::random_relation(rng, n);
  return {MassVector(std::move(xs)), std::move(r), m, t};
}

// ||RMM_t(x; A, R)^{[m up]}|| <= ||RMM_t(x^{[m up]}; A^{[m up]}, R^{[m up]})||.
inline bool shift_inequality_holds(const ShiftInstance& inst, const ThresholdField& field) {
  const double lhs = rmm(inst.x, field, inst.r, inst.t).tail(inst.m).norm_sq();
  const double rhs =
      rmm(tail_shift(inst.x, inst.m), field.shifted(inst.m), Relation::shifted(inst.r, inst.m), inst.t).norm_sq();
  return lhs <= rhs;
}

// Trial k uses m = ms[k mod |ms|].
inline PerSampleResult shift_inequality_check(std::size_t trials, std::span<const std::size_t> ms, std::uint64_t seed,
                                              std::uint64_t stream_base, unsigned threads) {
  if (ms.empty()) throw UsageError("shift_inequality_check: need at least one m");
  const auto ok = parallel_map(trials, threads, [&](std::size_t k) -> int {
    const auto stream = trial_stream(stream_base, k);
    StreamRng rng(seed, stream + 1);
    return shift_inequality_holds(random_shift_instance(rng, ms[k % ms.size()]), ThresholdField(seed, stream)) ? 1
                                                                                                             : 0;
  });
  PerSampleResult out{trials, 0};
  for (int v : ok) out.violations += v == 0;
  return out;
}

// ---------------------------------------------------------------------------
// Exact bounds against the enumeration oracle.

struct ExactFixture {
  MassVector x;
  Relation r;
  double t = 0.0;
};

// Small instances with t ||x||^2 in {0.3, 0.6, 0.9}.
inline std::vector<ExactFixture> exact_fixtures(std::size_t max_n = 6) {
  const std::vector<std::vector<double>> masses = {
      {0.5, 0.5, 0.5},      {0.9, 0.3},          {1.0, 0.5, 0.25, 0.125},         {0.6, 0.4, 0.3, 0.2, 0.1},
      {0.8, 0.6, 0.0, 0.4}, {0.45, 0.45, 0.3, 0.3, 0.15}, {0.3, 0.3, 0.3, 0.3, 0.3, 0.3}, {0.7, 0.2, 0.2, 0.1, 0.05, 0.05},
  };
  const std::vector<Relation> relations = {
      Relation::maximal(),
      Relation::inter_class(2),
      Relation::union_of(Relation::intra_class(2, 1), Relation::up_down(Relation::maximal(), 2)),
  };
  std::vector<ExactFixture> out;
  for (const auto& xs : masses) {
    if (xs.size() > max_n) continue;
    const MassVector x(xs);
    for (const auto& r : relations)
      for (double fraction : {0.3, 0.6, 0.9}) out.push_back({x, r, fraction / x.norm_sq()});
  }
  return out;
}

// Running summary over many (exact value, bound) cases; remembers the case
// closest to violation.
struct ExactSummary {
  std::size_t cases = 0;
  std::size_t violations = 0;
  double worst_lhs = 0.0;
  double worst_rhs = 0.0;
  double worst_ratio = -1.0;

  void add(double lhs, double rhs) {
    ++cases;
    if (!(lhs <= rhs)) ++violations;
    double ratio;
    if (rhs > 0.0)
      ratio = lhs / rhs;
    else
      ratio = lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    if (ratio > worst_ratio) {
      worst_ratio = ratio;
      worst_lhs = lhs;
      worst_rhs = rhs;
    }
  }

  [[nodiscard]] bool satisfied() const { return cases > 0 && violations == 0; }

  [[nodiscard]] BoundReport report(std::string name) const {
    auto r = make_report(std::move(name), worst_lhs, worst_rhs);
    r.satisfied = satisfied();
    r.cases = cases;
    return r;
  }
};

// P{i ~ j} against x_i x_j t / (1 - t||x||^2), every pair of every fixture.
inline ExactSummary pair_connection_check(std::span<const ExactFixture> fixtures) {
  ExactSummary out;
  for (const auto& f : fixtures) {
    const std::size_t n = f.x.size();
    std::vector<std::vector<std::size_t>> sets;
    for (std::size_t i = 1; i <= n; ++i)
      for (std::size_t j = i + 1; j <= n; ++j) sets.push_back({i, j});
    const auto probs = connect_probabilities(f.x, f.r, f.t, sets);
    for (std::size_t k = 0; k < sets.size(); ++k)
      out.add(probs[k], bound_connect_pair(f.x, f.t, sets[k][0], sets[k][1]));
  }
  return out;
}

// P{i ~_m j} under R^{[down m up]}, split by the three kappa cases:
// [0] i,j <= m, [1] i,j > m, [2] mixed.
inline std::array<ExactSummary, 3> straddling_connection_check(std::span<const ExactFixture> fixtures) {
  std::array<ExactSummary, 3> out;
  for (const auto& f : fixtures) {
    const std::size_t n = f.x.size();
    for (std::size_t m = 1; m < n; ++m) {
      const auto r = Relation::up_down(f.r, m);
      std::vector<std::vector<std::size_t>> sets;
      for (std::size_t i = 1; i <= n; ++i)
        for (std::size_t j = i + 1; j <= n; ++j) sets.push_back({i, j});
      const auto probs = connect_probabilities(f.x, r, f.t, sets);
      for (std::size_t k = 0; k < sets.size(); ++k) {
        const std::size_t i = sets[k][0];
        const std::size_t j = sets[k][1];
        const std::size_t kind = (i <= m && j <= m) ? 0 : (i > m && j > m) ? 1 : 2;
        out[kind].add(probs[k], bound_connect_straddling(f.x, f.t, m, i, j));
      }
    }
  }
  return out;
}

// P{ ||RMM_t(x; A, R^{[down m up]})||^2 - ||x^{[down m]}||^2 >= eps } against
// ||x^{[m up]}||^2 P_t(||x^{[down m]}||^2) / eps.
inline ExactSummary straddling_growth_check(std::span<const ExactFixture> fixtures,
                                            std::span<const double> epsilons) {
  ExactSummary out;
  for (const auto& f : fixtures) {
    for (std::size_t m = 1; m < f.x.size(); ++m) {
      const auto law = enumerate_law(f.x, Relation::up_down(f.r, m), f.t);
      const double a = head_truncate(f.x, m).norm_sq();
      for (double eps : epsilons) {
        const double p = law.probability([&](const ComponentVector& v) { return v.norm_sq() - a >= eps; });
        out.add(p, bound_straddling_growth(f.x, f.t, m, eps));
      }
    }
  }
  return out;
}

// P(□_k {i_k ~ j_k}) against prod_k P{i_k ~ j_k} for every list of two
// pairs (a pair may repeat).
inline ExactSummary disjoint_occurrence_check(std::span<const ExactFixture> fixtures) {
  ExactSummary out;
  for (const auto& f : fixtures) {
    const std::size_t n = f.x.size();
    std::vector<Edge> pairs;
    std::vector<std::vector<std::size_t>> sets;
    for (std::size_t i = 1; i <= n; ++i)
      for (std::size_t j = i + 1; j <= n; ++j) {
        pairs.push_back({i, j});
        sets.push_back({i, j});
      }
    const auto marginal = connect_probabilities(f.x, f.r, f.t, sets);
    std::vector<std::vector<Edge>> lists;
    std::vector<double> products;
    for (std::size_t a = 0; a < pairs.size(); ++a)
      for (std::size_t b = a; b < pairs.size(); ++b) {
        lists.push_back({pairs[a], pairs[b]});
        products.push_back(marginal[a] * marginal[b]);
      }
    const auto joint = disjoint_occurrence_probabilities(f.x, f.t, lists, f.r);
    for (std::size_t k = 0; k < lists.size(); ++k) out.add(joint[k], products[k]);
  }
  return out;
}

// Triples [0] and quadruples [1] of distinct vertices.
inline std::array<ExactSummary, 2> tuple_connection_check(std::span<const ExactFixture> fixtures) {
  std::array<ExactSummary, 2> out;
  for (const auto& f : fixtures) {
    const std::size_t n = f.x.size();
    std::vector<std::vector<std::size_t>> sets;
    for (std::size_t a = 1; a <= n; ++a)
      for (std::size_t b = a + 1; b <= n; ++b)
        for (std::size_t c = b + 1; c <= n; ++c) {
          sets.push_back({a, b, c});
          for (std::size_t d = c + 1; d <= n; ++d) sets.push_back({a, b, c, d});
        }
    if (sets.empty()) continue;
    const auto probs = connect_probabilities(f.x, f.r, f.t, sets);
    for (std::size_t k = 0; k < sets.size(); ++k)
      out[sets[k].size() - 3].add(probs[k], bound_connect_tuple(f.x, f.t, sets[k]));
  }
  return out;
}

// sum_k E X_k(t)^4 against the assembled fourth-moment bound.
inline ExactSummary fourth_moment_check(std::span<const ExactFixture> fixtures) {
  ExactSummary out;
  for (const auto& f : fixtures) {
    const auto law = enumerate_law(f.x, f.r, f.t);
    CompensatedSum s;
    for (const auto& [v, p] : law.outcomes) s += p * moment_norm(v, 4);
    out.add(s.value(), bound_fourth_norm(f.x, f.t));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Statistical checks.

// Samples f(field) over trial streams base, base+16, ...
template <typename F>
std::vector<double> sample_fields(std::size_t trials, std::uint64_t seed, std::uint64_t stream_base, unsigned threads,
                                  F&& f) {
  return parallel_map(trials, threads,
                      [&](std::size_t k) -> double { return f(ThresholdField(seed, trial_stream(stream_base, k))); });
}

struct GlueSetup {
  MassVector x;
  Relation r;
  std::size_t m = 1;
  double t = 0.0;
};

// ||RMM_t(x; A, R ∪ (R*)^{[down m up]})||^2.
inline double glue_direct_sample(const GlueSetup& s, const ThresholdField& a) {
  return rmm(s.x, a, glued(s.r, s.m), s.t).norm_sq();
}

// Two-stage construction: Z^{<=m} and Z^{>m} from A, then cross merging of
// Z^{<=m} (+) Z^{>m} with a fresh table across len(Z^{<=m}).
inline double glue_two_stage_sample(const GlueSetup& s, const ThresholdField& a) {
  const auto low = rmm(head_truncate(s.x, s.m), a, s.r, s.t);
  const auto high = rmm(tail_shift(s.x, s.m), a.shifted(s.m), Relation::shifted(s.r, s.m), s.t);
  const auto joined = uplus(low, high);
  return rmm(joined, a.independent_copy(), Relation::up_down(Relation::maximal(), low.len()), s.t).norm_sq();
}

inline TwoSampleResult glue_property_check(const GlueSetup& s, std::size_t trials, std::uint64_t seed,
                                           std::uint64_t stream_base, unsigned threads, double alpha = 0.01) {
  const auto direct =
      sample_fields(trials, seed, stream_base, threads, [&](const ThresholdField& a) { return glue_direct_sample(s, a); });
  const auto staged = sample_fields(trials, seed, stream_base + kSideOffset, threads,
                                    [&](const ThresholdField& a) { return glue_two_stage_sample(s, a); });
  return ks_two_sample(direct, staged, alpha);
}

struct GrowthChainResult {
  MeanEstimate probability;  // of ||Z||^2 - ||Z^{<=m}||^2 >= eps
  MeanEstimate tail_norm;    // E ||Z^{>m}||^2
  MeanEstimate polynomial;   // E P_t(||Z^{<=m}||^2)
  double rhs = 0.0;          // tail_norm.mean * polynomial.mean / eps
};

inline GrowthChainResult growth_chain_check(const GlueSetup& s, double eps, std::size_t trials, std::uint64_t seed,
                                            std::uint64_t stream_base, unsigned threads) {
  if (!(eps > 0.0)) throw DomainError("growth_chain_check: eps must be positive");
  const auto rows = parallel_map(trials, threads, [&](std::size_t k) -> std::array<double, 3> {
    const ThresholdField a(seed, trial_stream(stream_base, k));
    const double whole = rmm(s.x, a, s.r, s.t).norm_sq();
    const double low = rmm(head_truncate(s.x, s.m), a, s.r, s.t).norm_sq();
    const double high = rmm(tail_shift(s.x, s.m), a.shifted(s.m), Relation::shifted(s.r, s.m), s.t).norm_sq();
    return {whole - low >= eps ? 1.0 : 0.0, high, tail_polynomial(s.t, low)};
  });
  std::array<std::vector<double>, 3> cols;
  for (const auto& row : rows)
    for (std::size_t c = 0; c < 3; ++c) cols[c].push_back(row[c]);
  GrowthChainResult out;
  out.probability = estimate_mean(cols[0]);
  out.tail_norm = estimate_mean(cols[1]);
  out.polynomial = estimate_mean(cols[2]);
  out.rhs = out.tail_norm.mean * out.polynomial.mean / eps;
  return out;
}

struct TailUniformityResult {
  std::size_t m = 0;
  double epsilon = 0.0;
  std::vector<double> analytic;          // second-moment bound per family member
  std::vector<MeanEstimate> estimates;   // E ||RMM_T(x^{[m up]}; A^{[m up]}, R*)||^2
  [[nodiscard]] double worst_upper() const {
    double w = 0.0;
    for (const auto& e : estimates) w = std::max(w, e.upper());
    return w;
  }
};

// Smallest m for which the analytic tail bound is below eps for every member
// of the family, then Monte Carlo of the sup-tail second moment at that m.
// With the maximal relation the supremum over [0,T] is attained at T.
inline TailUniformityResult tail_uniformity_check(std::span<const MassVector> family, double horizon, double eps,
                                                  std::size_t trials, std::uint64_t seed, std::uint64_t stream_base,
                                                  unsigned threads) {
  std::size_t longest = 0;
  for (const auto& x : family) longest = std::max(longest, x.size());
  TailUniformityResult out;
  out.epsilon = eps;
  bool found = false;
  for (std::size_t m = 0; m <= longest && !found; ++m) {
    std::vector<double> bounds;
    bool ok = true;
    for (const auto& x : family) {
      const auto y = tail_shift(x, m);
      if (!(horizon * y.norm_sq() < 1.0)) {
        ok = false;
        break;
      }
      const double b = bound_second_moment(y, horizon);
      if (!(b < eps)) ok = false;
      bounds.push_back(b);
    }
    if (ok) {
      out.m = m;
      out.analytic = std::move(bounds);
      found = true;
    }
  }
  if (!found) throw DomainError("tail_uniformity_check: no m brings the tail bound below eps");
  for (std::size_t f = 0; f < family.size(); ++f) {
    const auto y = tail_shift(family[f], out.m);
    const auto samples = sample_fields(trials, seed, stream_base + f * kSideOffset, threads, [&](const ThresholdField& a) {
      return rmm(y, a.shifted(out.m), Relation::maximal(), horizon).norm_sq();
    });
    out.estimates.push_back(estimate_mean(samples));
  }
  return out;
}

struct JumpComparison {
  TwoSampleResult largest;
  TwoSampleResult blocks;
};

// Jump process at time t against RMM_t(x; A, R*), compared on the largest
// mass and on the number of blocks.
inline JumpComparison jump_vs_graphical_check(const MassVector& x, double t, std::size_t trials, std::uint64_t seed,
                                              std::uint64_t stream_base, unsigned threads, double alpha = 0.01) {
  const auto jump = parallel_map(trials, threads, [&](std::size_t k) -> std::array<double, 2> {
    StreamRng rng(seed, trial_stream(stream_base, k));
    const auto path = simulate_jump_process(x, t, rng);
    const auto& state = path.state_at(t);
    return {state.largest(), static_cast<double>(state.block_count())};
  });
  const auto graph = parallel_map(trials, threads, [&](std::size_t k) -> std::array<double, 2> {
    const auto v = rmm(x, ThresholdField(seed, trial_stream(stream_base + kSideOffset, k)), Relation::maximal(), t);
    return {v.largest(), static_cast<double>(v.block_count())};
  });
  std::array<std::vector<double>, 4> cols;
  for (const auto& r : jump) {
    cols[0].push_back(r[0]);
    cols[1].push_back(r[1]);
  }
  for (const auto& r : graph) {
    cols[2].push_back(r[0]);
    cols[3].push_back(r[1]);
  }
  return {ks_two_sample(cols[0], cols[2], alpha), ks_two_sample(cols[1], cols[3], alpha)};
}

struct MartingaleResult {
  MeanEstimate estimate;
  double target = 0.0;  // ||x||^2
  [[nodiscard]] double deviation() const { return std::fabs(estimate.mean - target); }
  [[nodiscard]] bool within(double standard_errors = 3.0) const {
    return deviation() <= standard_errors * estimate.std_error;
  }
};

inline MartingaleResult martingale_check(const MassVector& x, double t, std::size_t trials, std::uint64_t seed,
                                         std::uint64_t stream_base, unsigned threads) {
  const auto estimate = estimate_mean(
      [&](std::uint64_t stream) {
        StreamRng rng(seed, stream);
        return martingale_functional(simulate_jump_process(x, t, rng), t);
      },
      trials, stream_base, threads);
  return {estimate, x.norm_sq()};
}

// One proposal of the superposition construction on x^g: A-edges at t and
// A'-edges at t/2, maximal relation. Returns ||components||^2 when every
// ground group is connected by its own internal A-edges, nothing otherwise.
inline std::optional<double> grinding_sample(const MassVector& x, std::size_t m, std::size_t pieces, double t,
                                             const ThresholdField& a) {
  const auto g = grind(x, m, pieces);
  for (std::size_t l = 0; l < m; ++l) {
    UnionFind group(pieces);
    for (std::size_t p = 0; p < pieces; ++p)
      for (std::size_t q = p + 1; q < pieces; ++q) {
        const std::size_t i = l * pieces + p + 1;
        const std::size_t j = l * pieces + q + 1;
        if (a.unchecked(i, j) <= g[i - 1] * g[j - 1] * t) group.unite(p, q);
      }
    if (group.class_count() != 1) return std::nullopt;
  }
  UnionFind sets(g.size());
  add_open_edges(sets, g, a, Relation::maximal(), t);
  add_open_edges(sets, g, a.independent_copy(), Relation::maximal(), t / 2.0);
  return component_masses(g, sets).norm_sq();
}

// Probability that every ground group reassembles through internal edges.
inline double grinding_acceptance(const MassVector& x, std::size_t m, std::size_t pieces, double t) {
  if (m > x.size()) throw UsageError("grinding_acceptance: m exceeds the support");
  double p = 1.0;
  std::vector<std::size_t> all(pieces);
  for (std::size_t k = 0; k < pieces; ++k) all[k] = k + 1;
  for (std::size_t l = 0; l < m; ++l) {
    const MassVector group(std::vector<double>(pieces, x[l] / static_cast<double>(pieces)));
    p *= connect_probability(group, Relation::maximal(), t, all);
  }
  return p;
}

struct GrindingResult {
  TwoSampleResult ks;
  std::size_t proposals = 0;
  std::size_t accepted = 0;
  double acceptance = 0.0;        // empirical
  double exact_acceptance = 0.0;  // product of per-group connection probabilities
  double acceptance_half_width = 0.0;
  [[nodiscard]] bool acceptance_matches() const {
    return std::fabs(acceptance - exact_acceptance) <= acceptance_half_width;
  }
};

// RMM_{3t/2}(x; A, R*) against the superposition on x^g conditioned on
// reassembly. Proposals are sized to yield about `target` accepted samples.
inline GrindingResult grinding_check(const MassVector& x, std::size_t m, std::size_t pieces, double t,
                                     std::size_t target, std::uint64_t seed, std::uint64_t stream_base,
                                     unsigned threads, double alpha = 0.01) {
  GrindingResult out;
  out.exact_acceptance = grinding_acceptance(x, m, pieces, t);
  if (!(out.exact_acceptance > 0.0)) throw DomainError("grinding_check: reassembly has probability zero");
  out.proposals = static_cast<std::size_t>(std::ceil(1.1 * static_cast<double>(target) / out.exact_acceptance));
  const auto proposals = parallel_map(out.proposals, threads, [&](std::size_t k) -> std::array<double, 2> {
    const auto v = grinding_sample(x, m, pieces, t, ThresholdField(seed, trial_stream(stream_base, k)));
    return {v ? 1.0 : 0.0, v.value_or(0.0)};
  });
  std::vector<double> accepted;
  for (const auto& p : proposals)
    if (p[0] > 0.0) accepted.push_back(p[1]);
  out.accepted = accepted.size();
  const double n = static_cast<double>(out.proposals);
  out.acceptance = static_cast<double>(out.accepted) / n;
  out.acceptance_half_width = kZ99 * std::sqrt(out.exact_acceptance * (1.0 - out.exact_acceptance) / n);
  const auto direct = sample_fields(target, seed, stream_base + kSideOffset, threads, [&](const ThresholdField& a) {
    return rmm(x, a, Relation::maximal(), 1.5 * t).norm_sq();
  });
  out.ks = ks_two_sample(direct, accepted, alpha);
  return out;
}

struct OracleInstance {
  MassVector x;
  Relation r;
  double t = 0.0;
};

// Instances on at most five vertices with mixed masses and relations.
inline std::vector<OracleInstance> oracle_fixtures() {
  struct Row {
    std::vector<double> x;
    const char* r;
    double t;
  };
  const std::vector<Row> rows = {
      {{1, 1}, "maximal", 0.7},
      {{0.5, 0.5, 0.5}, "maximal", 1.0},
      {{1, 1, 1}, "maximal", std::log(2.0)},
      {{1.2, 0.7, 0.3}, "inter:2", 1.5},
      {{0.9, 0.6, 0.6, 0.2}, "maximal", 1.0},
      {{0.9, 0.6, 0.6, 0.2}, "intra:2,1", 2.0},
      {{1, 0.5, 0.5, 0.25}, "updown:2(maximal)", 1.5},
      {{1, 0.5, 0.5, 0.25}, "inter:3", 1.2},
      {{0.8, 0.8, 0.4, 0.4, 0.2}, "maximal", 0.8},
      {{0.8, 0.8, 0.4, 0.4, 0.2}, "union(intra:2,1,updown:1(maximal))", 1.2},
      {{0.6, 0.5, 0.4, 0.3, 0.2}, "inter:2", 2.0},
      {{0.6, 0.5, 0.4, 0.3, 0.2}, "shift:1(intra:2,1)", 3.0},
      {{1.5, 0.3, 0.3, 0.3}, "maximal", 1.0},
      {{1.5, 0.3, 0.3, 0.3}, "updown:1(maximal)", 2.0},
      {{0.7, 0.0, 0.7, 0.7}, "maximal", 1.5},
      {{1, 1, 1, 1, 1}, "maximal", 0.3},
      {{1, 1, 1, 1, 1}, "edges(1-2,2-3,3-4,4-5,1-5)", 0.7},
      {{2, 1}, "maximal", 0.4},
      {{0.5, 1, 1.5}, "union(edges(1-2),edges(2-3))", 0.8},
      {{0.3, 0.9, 0.2, 0.6, 0.4}, "inter:2", 1.6},
      {{1.1, 0.9, 0.5, 0.5, 0.5}, "updown:3(inter:2)", 1.0},
  };
  std::vector<OracleInstance> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back({MassVector(row.x), parse_relation(row.r), row.t});
  return out;
}

// Empirical law of rmm over trial streams against the exact law.
inline ChiSquareResult oracle_equivalence_check(const OracleInstance& inst, std::size_t trials, std::uint64_t seed,
                                                std::uint64_t stream_base, unsigned threads, double alpha = 1e-3) {
  const auto law = enumerate_law(inst.x, inst.r, inst.t);
  std::map<std::vector<double>, std::size_t> index;
  for (std::size_t k = 0; k < law.outcomes.size(); ++k) index.emplace(law.outcomes[k].first.data(), k);
  const auto hits = parallel_map(trials, threads, [&](std::size_t k) -> std::size_t {
    const auto v = rmm(inst.x, ThresholdField(seed, trial_stream(stream_base, k)), inst.r, inst.t);
    const auto it = index.find(v.data());
    return it == index.end() ? law.outcomes.size() : it->second;
  });
  std::vector<std::size_t> counts(law.outcomes.size() + 1, 0);
  for (auto h : hits) ++counts[h];
  std::vector<double> probs;
  for (const auto& [v, p] : law.outcomes) probs.push_back(p);
  probs.push_back(0.0);  // outcomes the oracle does not know
  return chi_square_gof(counts, probs, alpha);
}

}  // namespace coalesce
