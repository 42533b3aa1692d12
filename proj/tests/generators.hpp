#pragma once

// Hand-rolled generators for property tests. They use std::mt19937_64 so that
// the inputs are independent of the library's own random streams.

#include <cstddef>
#include <random>
#include <vector>

#include "coalesce/mass_vector.hpp"
#include "coalesce/relation.hpp"

namespace gen {

using Rng = std::mt19937_64;

inline std::size_t size_in(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline double real_in(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

// Masses in [0, scale), some exactly zero, some repeated.
inline coalesce::MassVector masses(Rng& rng, std::size_t n, double scale = 1.0) {
  std::vector<double> x(n);
  for (auto& a : x) {
    const double r = real_in(rng, 0.0, 1.0);
    a = r < 0.1 ? 0.0 : r < 0.2 ? 0.5 * scale : real_in(rng, 0.0, scale);
  }
  return coalesce::MassVector(std::move(x));
}

inline coalesce::Relation relation(Rng& rng, std::size_t n, int depth = 2) {
  using coalesce::Relation;
  const std::size_t pick = size_in(rng, 0, depth > 0 ? 7 : 3);
  const std::size_t m = size_in(rng, 1, 3);
  switch (pick) {
    case 0:
      return Relation::maximal();
    case 1:
      return Relation::empty();
    case 2:
      return Relation::intra_class(m, size_in(rng, 1, m));
    case 3: {
      std::vector<coalesce::Edge> edges;
      for (std::size_t i = 1; i <= n; ++i)
        for (std::size_t j = i + 1; j <= n; ++j)
          if (real_in(rng, 0.0, 1.0) < 0.5) edges.push_back({i, j});
      return Relation::explicit_edges(std::move(edges));
    }
    case 4:
      return Relation::inter_class(m);
    case 5:
      return Relation::shifted(relation(rng, n, depth - 1), size_in(rng, 0, 2));
    case 6:
      return Relation::up_down(relation(rng, n, depth - 1), size_in(rng, 0, n));
    default:
      return Relation::union_of(relation(rng, n, depth - 1), relation(rng, n, depth - 1));
  }
}

}  // namespace gen
