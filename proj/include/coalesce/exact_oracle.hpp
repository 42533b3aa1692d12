#pragma once

// Exhaustive enumeration over open/closed configurations of the admissible
// pairs of a small instance. Each pair {i,j} is open independently with
// probability 1 - exp(-x_i x_j t), which is exactly P{A(i,j) <= x_i x_j t}.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "coalesce/compensated_sum.hpp"
#include "coalesce/error.hpp"
#include "coalesce/mass_vector.hpp"
#include "coalesce/relation.hpp"
#include "coalesce/rmm.hpp"

namespace coalesce {

inline constexpr std::size_t kMaxEnumeratedPairs = 24;

struct EdgeProbability {
  Edge edge;
  double p;
};

struct ExactDistribution {
  std::vector<std::pair<ComponentVector, double>> outcomes;
  std::vector<EdgeProbability> edge_probs;

  [[nodiscard]] double probability_sum() const {
    CompensatedSum s;
    for (const auto& [v, p] : outcomes) s += p;
    return s.value();
  }

  template <typename Pred>
  [[nodiscard]] double probability(Pred&& pred) const {
    CompensatedSum s;
    for (const auto& [v, p] : outcomes)
      if (pred(v)) s += p;
    return s.value();
  }

  // Position of an outcome identical to v, or outcomes.size().
  [[nodiscard]] std::size_t index_of(const ComponentVector& v) const {
    for (std::size_t k = 0; k < outcomes.size(); ++k)
      if (outcomes[k].first == v) return k;
    return outcomes.size();
  }
};

// Pairs of R within the support that can be open at time t.
inline std::vector<EdgeProbability> admissible_pairs(const MassVector& x, const Relation& r, double t) {
  check_time(t);
  std::vector<EdgeProbability> out;
  r.for_each_edge(x.size(), [&](std::size_t i, std::size_t j) {
    const double p = -std::expm1(-x[i - 1] * x[j - 1] * t);
    if (p > 0.0) out.push_back({{i, j}, p});
  });
  if (out.size() > kMaxEnumeratedPairs)
    throw CapacityError("exact oracle: " + std::to_string(out.size()) + " admissible pairs exceed the limit of " +
                        std::to_string(kMaxEnumeratedPairs));
  return out;
}

namespace detail {

using LabelKey = std::vector<std::uint32_t>;

inline LabelKey canonical_labels(const std::vector<std::uint32_t>& roots) {
  LabelKey out(roots.size());
  std::vector<std::uint32_t> seen(roots.size(), UINT32_MAX);
  std::uint32_t next = 0;
  for (std::size_t v = 0; v < roots.size(); ++v) {
    auto& slot = seen[roots[v]];
    if (slot == UINT32_MAX) slot = next++;
    out[v] = slot;
  }
  return out;
}

// Law of the partition. A pair whose ends are already joined cannot change
// the partition, so both of its branches are folded into one.
inline void partition_dfs(std::span<const EdgeProbability> edges, std::size_t e, double prob,
                          std::vector<std::uint32_t>& roots, std::map<LabelKey, CompensatedSum>& law) {
  if (prob == 0.0) return;
  if (e == edges.size()) {
    law[canonical_labels(roots)] += prob;
    return;
  }
  const auto a = roots[edges[e].edge.i - 1];
  const auto b = roots[edges[e].edge.j - 1];
  if (a == b) {
    partition_dfs(edges, e + 1, prob, roots, law);
    return;
  }
  const double p = edges[e].p;
  partition_dfs(edges, e + 1, prob * (1.0 - p), roots, law);
  const auto saved = roots;
  for (auto& r : roots)
    if (r == b) r = a;
  partition_dfs(edges, e + 1, prob * p, roots, law);
  roots = saved;
}

inline std::map<LabelKey, CompensatedSum> partition_law(std::size_t n, std::span<const EdgeProbability> edges) {
  std::vector<std::uint32_t> roots(n);
  for (std::size_t v = 0; v < n; ++v) roots[v] = static_cast<std::uint32_t>(v);
  std::map<LabelKey, CompensatedSum> law;
  partition_dfs(edges, 0, 1.0, roots, law);
  return law;
}

}  // namespace detail

// Exact law of RMM_t(x; A, R) for A i.i.d. Exp(1).
inline ExactDistribution enumerate_law(const MassVector& x, const Relation& r, double t) {
  ExactDistribution out;
  out.edge_probs = admissible_pairs(x, r, t);
  const auto law = detail::partition_law(x.size(), out.edge_probs);

  std::map<std::vector<double>, CompensatedSum, std::greater<>> by_vector;
  for (const auto& [labels, prob] : law) {
    const Partition partition(labels.begin(), labels.end());
    by_vector[component_masses(x, partition).data()] += prob.value();
  }
  out.outcomes.reserve(by_vector.size());
  for (const auto& [masses, prob] : by_vector) out.outcomes.emplace_back(ComponentVector::from_unsorted(masses), prob.value());
  return out;
}

// Exact probability that all vertices of `vertices` (1-based) share a component.
inline double connect_probability(const MassVector& x, const Relation& r, double t,
                                  std::span<const std::size_t> vertices) {
  for (std::size_t v : vertices)
    if (v == 0 || v > x.size()) throw UsageError("connect_probability: vertex outside the support");
  const auto edges = admissible_pairs(x, r, t);
  if (vertices.size() <= 1) return 1.0;
  const auto law = detail::partition_law(x.size(), edges);
  CompensatedSum s;
  for (const auto& [labels, prob] : law) {
    const auto first = labels[vertices.front() - 1];
    if (std::all_of(vertices.begin(), vertices.end(), [&](std::size_t v) { return labels[v - 1] == first; }))
      s += prob.value();
  }
  return s.value();
}

// connect_probability for several vertex sets from one enumeration.
inline std::vector<double> connect_probabilities(const MassVector& x, const Relation& r, double t,
                                                 const std::vector<std::vector<std::size_t>>& sets) {
  for (const auto& set : sets)
    for (std::size_t v : set)
      if (v == 0 || v > x.size()) throw UsageError("connect_probability: vertex outside the support");
  const auto law = detail::partition_law(x.size(), admissible_pairs(x, r, t));
  std::vector<double> out;
  out.reserve(sets.size());
  for (const auto& set : sets) {
    if (set.size() <= 1) {
      out.push_back(1.0);
      continue;
    }
    CompensatedSum s;
    for (const auto& [labels, prob] : law) {
      const auto first = labels[set.front() - 1];
      if (std::all_of(set.begin(), set.end(), [&](std::size_t v) { return labels[v - 1] == first; }))
        s += prob.value();
    }
    out.push_back(s.value());
  }
  return out;
}

inline double connect_probability(const MassVector& x, const Relation& r, double t,
                                  std::initializer_list<std::size_t> vertices) {
  return connect_probability(x, r, t, std::span<const std::size_t>(vertices.begin(), vertices.size()));
}

// Visits every configuration of `edges` with its probability; bit e of the
// mask is set when edges[e] is open.
template <typename F>
void for_each_configuration(std::span<const EdgeProbability> edges, F&& f) {
  const std::uint32_t count = std::uint32_t{1} << edges.size();
  for (std::uint32_t mask = 0; mask < count; ++mask) {
    double prob = 1.0;
    for (std::size_t e = 0; e < edges.size(); ++e) prob *= (mask >> e) & 1U ? edges[e].p : 1.0 - edges[e].p;
    if (prob > 0.0) f(mask, prob);
  }
}

namespace detail {

// Edge masks of all simple paths from `from` to `to` in the open graph.
inline void simple_paths(const std::vector<std::vector<std::pair<std::size_t, std::uint32_t>>>& adjacency,
                         std::size_t from, std::size_t to, std::uint64_t visited, std::uint32_t used,
                         std::vector<std::uint32_t>& out) {
  if (from == to) {
    out.push_back(used);
    return;
  }
  for (const auto& [next, edge_bit] : adjacency[from]) {
    if ((visited >> next) & 1U) continue;
    simple_paths(adjacency, next, to, visited | (std::uint64_t{1} << next), used | edge_bit, out);
  }
}

inline bool choose_disjoint(const std::vector<std::vector<std::uint32_t>>& candidates, std::size_t k,
                            std::uint32_t taken) {
  if (k == candidates.size()) return true;
  for (std::uint32_t path : candidates[k])
    if ((path & taken) == 0 && choose_disjoint(candidates, k + 1, taken | path)) return true;
  return false;
}

}  // namespace detail

namespace detail {

using Adjacency = std::vector<std::vector<std::pair<std::size_t, std::uint32_t>>>;

inline Adjacency build_adjacency(std::size_t n, std::span<const Edge> open) {
  if (n > 64 || open.size() > 32) throw CapacityError("disjoint paths: instance too large");
  Adjacency adjacency(n);
  for (std::size_t e = 0; e < open.size(); ++e) {
    const std::uint32_t bit = std::uint32_t{1} << e;
    adjacency[open[e].i - 1].emplace_back(open[e].j - 1, bit);
    adjacency[open[e].j - 1].emplace_back(open[e].i - 1, bit);
  }
  return adjacency;
}

inline bool disjoint_paths_exist(const Adjacency& adjacency, std::span<const Edge> pairs) {
  std::vector<std::vector<std::uint32_t>> candidates;
  candidates.reserve(pairs.size());
  for (const auto& pr : pairs) {
    std::vector<std::uint32_t> paths;
    simple_paths(adjacency, pr.i - 1, pr.j - 1, std::uint64_t{1} << (pr.i - 1), 0, paths);
    if (paths.empty()) return false;
    std::sort(paths.begin(), paths.end(),
              [](std::uint32_t a, std::uint32_t b) { return __builtin_popcount(a) < __builtin_popcount(b); });
    candidates.push_back(std::move(paths));
  }
  return choose_disjoint(candidates, 0, 0);
}

}  // namespace detail

// Whether every pair {i_k, j_k} is joined by its own path, with the paths
// pairwise edge-disjoint. `open` lists the open edges of a graph on [n].
inline bool disjoint_paths_exist(std::size_t n, std::span<const Edge> open, std::span<const Edge> pairs) {
  return detail::disjoint_paths_exist(detail::build_adjacency(n, open), pairs);
}

// disjoint_occurrence_probability for several pair lists from one pass over
// the configurations.
inline std::vector<double> disjoint_occurrence_probabilities(const MassVector& x, double t,
                                                             const std::vector<std::vector<Edge>>& lists,
                                                             const Relation& r = Relation::maximal()) {
  for (const auto& pairs : lists)
    for (const auto& pr : pairs)
      if (pr.i == pr.j || pr.i == 0 || pr.j == 0 || pr.i > x.size() || pr.j > x.size())
        throw UsageError("disjoint_occurrence_probability: pairs must be distinct vertices in the support");
  const auto edges = admissible_pairs(x, r, t);
  std::vector<CompensatedSum> sums(lists.size());
  std::vector<Edge> open;
  for_each_configuration(edges, [&](std::uint32_t mask, double prob) {
    open.clear();
    for (std::size_t e = 0; e < edges.size(); ++e)
      if ((mask >> e) & 1U) open.push_back(edges[e].edge);
    const auto adjacency = detail::build_adjacency(x.size(), open);
    for (std::size_t k = 0; k < lists.size(); ++k)
      if (detail::disjoint_paths_exist(adjacency, lists[k])) sums[k] += prob;
  });
  std::vector<double> out;
  out.reserve(sums.size());
  for (const auto& s : sums) out.push_back(s.value());
  return out;
}

// Exact probability that {i_k ~ j_k} occur jointly for disjoint reasons: the
// connecting paths can be chosen pairwise edge-disjoint.
inline double disjoint_occurrence_probability(const MassVector& x, double t, std::span<const Edge> pairs,
                                              const Relation& r = Relation::maximal()) {
  return disjoint_occurrence_probabilities(x, t, {std::vector<Edge>(pairs.begin(), pairs.end())}, r).front();
}

}  // namespace coalesce
