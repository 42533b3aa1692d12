#pragma once

// Closed-form upper bounds on connection probabilities and moments of the
// multiplicative merging, and the report type used to check them.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>

#include "coalesce/error.hpp"
#include "coalesce/mass_vector.hpp"

namespace coalesce {

struct BoundReport {
  std::string name;
  double lhs = 0.0;  // exact value, or upper CI endpoint of an estimate
  double rhs = 0.0;  // bound value
  bool satisfied = false;
  double slack = 0.0;  // rhs - lhs
  std::size_t trials = 0;  // 0 for exact checks
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
  std::size_t cases = 1;  // instances aggregated into this row
};

inline BoundReport make_report(std::string name, double lhs, double rhs, std::size_t trials = 0,
                               std::uint64_t seed = 0) {
  BoundReport r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.satisfied = lhs <= rhs;
  r.slack = rhs - lhs;
  r.trials = trials;
  r.seed = seed;
  return r;
}

namespace detail {

inline double vertex_mass(const MassVector& x, std::size_t i) {
  if (i == 0) throw UsageError("vertices are positive integers");
  return x.at_vertex(i);
}

inline void require_subcritical(const MassVector& x, double t, const char* who) {
  if (!(t > 0.0) || !(t * x.norm_sq() < 1.0)) throw DomainError(std::string(who) + ": need 0 < t < 1/||x||^2");
}

}  // namespace detail

// P{i ~ j} <= x_i x_j t / (1 - t ||x||^2).
inline double bound_connect_pair(const MassVector& x, double t, std::size_t i, std::size_t j) {
  detail::require_subcritical(x, t, "bound_connect_pair");
  return detail::vertex_mass(x, i) * detail::vertex_mass(x, j) * t / (1.0 - t * x.norm_sq());
}

// Bound on P{i ~_m j} for the relation restricted to pairs straddling m:
// x_i x_j kappa / (1 - t^2 a b), a = ||x^{[down m]}||^2, b = ||x^{[m up]}||^2,
// kappa = t^2 b if i,j <= m; t^2 a if i,j > m; t otherwise.
inline double bound_connect_straddling(const MassVector& x, double t, std::size_t m, std::size_t i, std::size_t j) {
  const double a = head_truncate(x, m).norm_sq();
  const double b = tail_shift(x, m).norm_sq();
  if (!(t > 0.0) || !(t * t * a * b < 1.0))
    throw DomainError("bound_connect_straddling: need 0 < t < 1/(||x^[down m]|| ||x^[m up]||)");
  double kappa;
  if (i <= m && j <= m)
    kappa = t * t * b;
  else if (i > m && j > m)
    kappa = t * t * a;
  else
    kappa = t;
  return detail::vertex_mass(x, i) * detail::vertex_mass(x, j) * kappa / (1.0 - t * t * a * b);
}

// P_t(s) = 2 + (4t + 2t^2) s + 2 t^2 s^2.
inline double tail_polynomial(double t, double s) {
  if (t < 0.0 || s < 0.0) throw DomainError("tail_polynomial: need t, s >= 0");
  return 2.0 + (4.0 * t + 2.0 * t * t) * s + 2.0 * t * t * s * s;
}

// P{ ||RMM_t(x; A, R^{[down m up]})||^2 - ||x^{[down m]}||^2 >= eps }
//   <= ||x^{[m up]}||^2 P_t(||x^{[down m]}||^2) / eps,  eps in (0,1].
inline double bound_straddling_growth(const MassVector& x, double t, std::size_t m, double eps) {
  if (!(eps > 0.0 && eps <= 1.0)) throw DomainError("bound_straddling_growth: eps must lie in (0,1]");
  const double a = head_truncate(x, m).norm_sq();
  const double b = tail_shift(x, m).norm_sq();
  return b * tail_polynomial(t, a) / eps;
}

// Constant in the triple and quadruple connection bounds.
inline constexpr double kTupleConstant = 120.0;  // 5!

// P(i1~i2~i3) <= 5! x x x t^{3/2} / (1 - t||x||^2)^3 and
// P(i1~i2~i3~i4) <= 5! x x x x t^2 / (1 - t||x||^2)^5.
inline double bound_connect_tuple(const MassVector& x, double t, std::span<const std::size_t> indices) {
  detail::require_subcritical(x, t, "bound_connect_tuple");
  if (indices.size() != 3 && indices.size() != 4) throw UsageError("bound_connect_tuple: need 3 or 4 indices");
  for (std::size_t a = 0; a < indices.size(); ++a)
    for (std::size_t b = a + 1; b < indices.size(); ++b)
      if (indices[a] == indices[b]) throw UsageError("bound_connect_tuple: indices must be distinct");
  double product = kTupleConstant;
  for (std::size_t i : indices) product *= detail::vertex_mass(x, i);
  const double gap = 1.0 - t * x.norm_sq();
  if (indices.size() == 3) return product * std::pow(t, 1.5) / (gap * gap * gap);
  return product * t * t / std::pow(gap, 5);
}

// Assembled constant of the fourth-moment bound:
// 1 + 12 + 6 + 12 * 5! + 5! (one coefficient per term of the expansion of
// sum_k X_k^4 over index patterns, each term dominated by ||x||^4 / gap^5).
inline constexpr double kFourthMomentConstant = 1.0 + 12.0 + 6.0 + 12.0 * kTupleConstant + kTupleConstant;

// sum_k E X_k(t)^4 < C ||x||^4 / (1 - t ||x||^2)^5.
inline double bound_fourth_norm(const MassVector& x, double t) {
  detail::require_subcritical(x, t, "bound_fourth_norm");
  const double s = x.norm_sq();
  return kFourthMomentConstant * s * s / std::pow(1.0 - t * s, 5);
}

// E ||RMM_T(y; A, R*)||^2 <= ||y||^2 + ||y||^4 T / (1 - T ||y||^2); applied to
// y = x^{[m up]} it bounds the tail of every RMM_t, t <= T.
inline double bound_second_moment(const MassVector& y, double horizon) {
  const double s = y.norm_sq();
  if (!(horizon >= 0.0) || !(horizon * s < 1.0)) throw DomainError("bound_second_moment: need 0 <= T < 1/||y||^2");
  return s + s * s * horizon / (1.0 - horizon * s);
}

}  // namespace coalesce
