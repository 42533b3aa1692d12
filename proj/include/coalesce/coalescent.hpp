#pragma once

// Event-driven simulation of the finite multiplicative coalescent: each pair
// of blocks with masses a, b merges at rate a*b.

#include <cstddef>
#include <ostream>
#include <vector>

#include "coalesce/error.hpp"
#include "coalesce/mass_vector.hpp"
#include "coalesce/threshold_field.hpp"

namespace coalesce {

struct TrajectoryPoint {
  double time;
  ComponentVector state;
};

// Piecewise-constant path on [0, horizon]: points[k].state holds on
// [points[k].time, points[k+1].time).
struct Trajectory {
  std::vector<TrajectoryPoint> points;
  double horizon = 0.0;

  [[nodiscard]] const ComponentVector& state_at(double t) const {
    if (points.empty()) throw UsageError("state_at: empty trajectory");
    if (t < 0.0 || t > horizon) throw UsageError("state_at: time outside the simulated horizon");
    std::size_t k = 0;
    while (k + 1 < points.size() && points[k + 1].time <= t) ++k;
    return points[k].state;
  }

  [[nodiscard]] std::size_t jump_count() const { return points.empty() ? 0 : points.size() - 1; }
};

namespace detail {

// Index drawn with probability proportional to weights[k].
inline std::size_t sample_proportional(const std::vector<double>& weights, double total, StreamRng& rng) {
  double target = rng.uniform() * total;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    target -= weights[k];
    if (target < 0.0) return k;
  }
  return weights.size() - 1;
}

}  // namespace detail

// Runs the jump process from x up to time horizon. Holding times are
// exponential with rate sum_{i<j} x_i x_j; the merging pair is chosen with
// probability proportional to x_i x_j by drawing both ends proportional to
// mass and rejecting i == j.
inline Trajectory simulate_jump_process(const MassVector& x, double horizon, StreamRng& rng) {
  if (!(horizon >= 0.0)) throw UsageError("simulate_jump_process: horizon must be nonnegative");
  std::vector<double> blocks;
  for (double a : x.values())
    if (a > 0.0) blocks.push_back(a);

  Trajectory path;
  path.horizon = horizon;
  path.points.push_back({0.0, ComponentVector::from_unsorted(blocks)});

  double now = 0.0;
  while (blocks.size() > 1) {
    double total = 0.0;
    double squares = 0.0;
    for (double a : blocks) {
      total += a;
      squares += a * a;
    }
    const double rate = 0.5 * (total * total - squares);
    if (!(rate > 0.0)) break;
    now += rng.exponential(rate);
    if (now > horizon) break;

    std::size_t i = 0;
    std::size_t j = 0;
    do {
      i = detail::sample_proportional(blocks, total, rng);
      j = detail::sample_proportional(blocks, total, rng);
    } while (i == j);

    blocks[i] += blocks[j];
    blocks[j] = blocks.back();
    blocks.pop_back();
    path.points.push_back({now, ComponentVector::from_unsorted(blocks)});
  }
  return path;
}

// Sum of v_k^p.
inline double moment_norm(const ComponentVector& v, int p) { return sum_of_powers(v.values(), p); }

// ||v||^4 = (sum v_k^2)^2.
inline double norm_fourth(const ComponentVector& v) { return v.norm_sq() * v.norm_sq(); }

// M(t) = ||X(t)||^2 - int_0^t (||X(s)||^4 - sum_k X_k(s)^4) ds, exact for a
// piecewise-constant path.
inline double martingale_functional(const Trajectory& path, double t) {
  if (path.points.empty()) throw UsageError("martingale_functional: empty trajectory");
  if (t < 0.0 || t > path.horizon) throw UsageError("martingale_functional: trajectory does not cover [0,t]");
  double integral = 0.0;
  std::size_t k = 0;
  for (; k < path.points.size(); ++k) {
    const double start = path.points[k].time;
    if (start > t) break;
    const double end = k + 1 < path.points.size() ? std::min(path.points[k + 1].time, t) : t;
    const auto& s = path.points[k].state;
    integral += (norm_fourth(s) - moment_norm(s, 4)) * (end - start);
  }
  return path.state_at(t).norm_sq() - integral;
}

// CSV columns: time,block_count,norm_sq,largest_mass.
inline void write_trajectory_csv(std::ostream& out, const Trajectory& path) {
  const auto precision = out.precision(17);
  out << "time,block_count,norm_sq,largest_mass\n";
  for (const auto& p : path.points)
    out << p.time << ',' << p.state.block_count() << ',' << p.state.norm_sq() << ',' << p.state.largest() << '\n';
  out.precision(precision);
}

}  // namespace coalesce
