#pragma once

// Restricted multiplicative merging in coupled mode: every related pair
// {i,j} with positive masses is tested against the shared threshold table,
// edge {i,j} open iff A(i,j) <= x_i x_j t.

#include <cstddef>
#include <vector>

#include "coalesce/error.hpp"
#include "coalesce/mass_vector.hpp"
#include "coalesce/relation.hpp"
#include "coalesce/threshold_field.hpp"
#include "coalesce/union_find.hpp"

namespace coalesce {

// Class label per vertex (index v-1 for vertex v), dense, by first appearance.
using Partition = std::vector<std::size_t>;

inline void check_time(double t) {
  if (!(t >= 0.0)) throw UsageError("time must be nonnegative");
}

// Merges the endpoints of every open edge of G_t(x; field, r) into `sets`.
// Pairs already in one class are skipped without reading the threshold; this
// never changes the resulting partition.
inline void add_open_edges(UnionFind& sets, const MassVector& x, const ThresholdField& field, const Relation& r,
                           double t) {
  check_time(t);
  if (t == 0.0) return;
  const std::size_t n = x.size();
  r.for_each_edge(n, [&](std::size_t i, std::size_t j) {
    const double w = x[i - 1] * x[j - 1] * t;
    if (w <= 0.0) return;
    if (sets.same(i - 1, j - 1)) return;
    if (field.unchecked(i, j) <= w) sets.unite(i - 1, j - 1);
  });
}

// Every open edge, in lexicographic order.
inline std::vector<Edge> open_edges(const MassVector& x, const ThresholdField& field, const Relation& r, double t) {
  check_time(t);
  std::vector<Edge> out;
  r.for_each_edge(x.size(), [&](std::size_t i, std::size_t j) {
    const double w = x[i - 1] * x[j - 1] * t;
    if (w > 0.0 && field.unchecked(i, j) <= w) out.push_back({i, j});
  });
  return out;
}

inline Partition build_components(const MassVector& x, const ThresholdField& field, const Relation& r, double t) {
  UnionFind sets(x.size());
  add_open_edges(sets, x, field, r, t);
  return sets.labels();
}

// Per-class mass, summed in increasing vertex order so that equal vertex sets
// always produce bit-identical masses regardless of how they were merged.
inline ComponentVector component_masses(const MassVector& x, const Partition& labels) {
  std::size_t classes = 0;
  for (std::size_t l : labels) classes = std::max(classes, l + 1);
  std::vector<double> mass(classes, 0.0);
  for (std::size_t v = 0; v < labels.size(); ++v) mass[labels[v]] += x[v];
  return ComponentVector::from_unsorted(std::move(mass));
}

inline ComponentVector component_masses(const MassVector& x, UnionFind& sets) {
  return component_masses(x, sets.labels());
}

// RMM_t(x; field, r).
inline ComponentVector rmm(const MassVector& x, const ThresholdField& field, const Relation& r, double t) {
  return component_masses(x, build_components(x, field, r, t));
}

}  // namespace coalesce
