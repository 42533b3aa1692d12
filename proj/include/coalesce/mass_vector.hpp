#pragma once

// Block-mass sequences with finite support and the vector maps used by the
// graphical constructions: ord, concatenation, round-robin join, shifts,
// truncation and grinding.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "coalesce/error.hpp"

namespace coalesce {

inline double sum_of_squares(std::span<const double> v) {
  double s = 0.0;
  for (double a : v) s += a * a;
  return s;
}

inline double sum_of_powers(std::span<const double> v, int p) {
  double s = 0.0;
  for (double a : v) s += std::pow(a, p);
  return s;
}

// Index (1-based) of the last strictly positive entry; 0 if there is none.
inline std::size_t last_nonzero(std::span<const double> v) {
  for (std::size_t k = v.size(); k > 0; --k)
    if (v[k - 1] > 0.0) return k;
  return 0;
}

// Nonnegative masses x_1..x_n; coordinates beyond n are zero. Zero entries are
// kept because vertex indices matter to relations and threshold tables.
class MassVector {
 public:
  MassVector() = default;
  MassVector(std::initializer_list<double> masses) : MassVector(std::vector<double>(masses)) {}
  explicit MassVector(std::vector<double> masses) : masses_(std::move(masses)) {
    for (double a : masses_)
      if (!(a >= 0.0) || !std::isfinite(a)) throw UsageError("MassVector: masses must be finite and nonnegative");
  }

  [[nodiscard]] std::size_t size() const { return masses_.size(); }
  [[nodiscard]] bool empty() const { return masses_.empty(); }
  [[nodiscard]] double operator[](std::size_t k) const { return masses_[k]; }
  // 1-based access matching vertex labels; zero past the support.
  [[nodiscard]] double at_vertex(std::size_t i) const { return i >= 1 && i <= masses_.size() ? masses_[i - 1] : 0.0; }
  [[nodiscard]] std::span<const double> values() const { return masses_; }
  [[nodiscard]] const std::vector<double>& data() const { return masses_; }

  [[nodiscard]] double total() const {
    double s = 0.0;
    for (double a : masses_) s += a;
    return s;
  }
  [[nodiscard]] double norm_sq() const { return sum_of_squares(masses_); }
  [[nodiscard]] double norm() const { return std::sqrt(norm_sq()); }
  [[nodiscard]] std::size_t len() const { return last_nonzero(masses_); }

  friend bool operator==(const MassVector&, const MassVector&) = default;

 private:
  std::vector<double> masses_;
};

// Nonincreasing nonnegative masses with the squared l2 norm cached.
class ComponentVector {
 public:
  ComponentVector() = default;

  // Sorts (stable, nonincreasing) and caches the norm.
  static ComponentVector from_unsorted(std::vector<double> masses) {
    std::stable_sort(masses.begin(), masses.end(), std::greater<>());
    return ComponentVector(std::move(masses));
  }

  [[nodiscard]] std::size_t size() const { return masses_.size(); }
  [[nodiscard]] bool empty() const { return masses_.empty(); }
  [[nodiscard]] double operator[](std::size_t k) const { return masses_[k]; }
  [[nodiscard]] std::span<const double> values() const { return masses_; }
  [[nodiscard]] const std::vector<double>& data() const { return masses_; }
  [[nodiscard]] double norm_sq() const { return norm_sq_; }
  [[nodiscard]] double norm() const { return std::sqrt(norm_sq_); }
  [[nodiscard]] double largest() const { return masses_.empty() ? 0.0 : masses_.front(); }
  [[nodiscard]] std::size_t len() const { return last_nonzero(masses_); }
  // Number of blocks with positive mass.
  [[nodiscard]] std::size_t block_count() const { return len(); }
  [[nodiscard]] double total() const {
    double s = 0.0;
    for (double a : masses_) s += a;
    return s;
  }

  // Drops trailing zero entries.
  [[nodiscard]] ComponentVector trimmed() const {
    return ComponentVector(std::vector<double>(masses_.begin(), masses_.begin() + static_cast<std::ptrdiff_t>(len())));
  }

  // The vector with its m largest entries removed, x^{[m up]}.
  [[nodiscard]] ComponentVector tail(std::size_t m) const {
    if (m >= masses_.size()) return {};
    return ComponentVector(std::vector<double>(masses_.begin() + static_cast<std::ptrdiff_t>(m), masses_.end()));
  }

  [[nodiscard]] MassVector as_masses() const { return MassVector(masses_); }

  friend bool operator==(const ComponentVector& a, const ComponentVector& b) { return a.masses_ == b.masses_; }

 private:
  explicit ComponentVector(std::vector<double> sorted) : masses_(std::move(sorted)), norm_sq_(sum_of_squares(masses_)) {}

  std::vector<double> masses_;
  double norm_sq_ = 0.0;
};

// Nonincreasing rearrangement; ties keep their original relative order.
inline ComponentVector ord(const MassVector& x) { return ComponentVector::from_unsorted(x.data()); }

// x (+) y: the nonzero prefix of x followed by y. Not commutative.
inline MassVector uplus(const ComponentVector& x, const ComponentVector& y) {
  const std::size_t m = x.len();
  std::vector<double> out(x.data().begin(), x.data().begin() + static_cast<std::ptrdiff_t>(m));
  out.insert(out.end(), y.data().begin(), y.data().end());
  return MassVector(std::move(out));
}

// rho_1^m: output[(k-1)m + l] = xs[l][k], shorter inputs padded with zeros.
inline MassVector round_robin_join(std::span<const ComponentVector> xs) {
  if (xs.empty()) throw UsageError("round_robin_join: need at least one vector");
  const std::size_t m = xs.size();
  std::size_t longest = 0;
  for (const auto& v : xs) longest = std::max(longest, v.size());
  std::vector<double> out(m * longest, 0.0);
  for (std::size_t l = 0; l < m; ++l)
    for (std::size_t k = 0; k < xs[l].size(); ++k) out[k * m + l] = xs[l][k];
  return MassVector(std::move(out));
}

// x^{[m up]} = (x_{k+m})_{k >= 1}.
inline MassVector tail_shift(const MassVector& x, std::size_t m) {
  if (m >= x.size()) return {};
  return MassVector(std::vector<double>(x.data().begin() + static_cast<std::ptrdiff_t>(m), x.data().end()));
}

// x^{[down m]}: coordinates beyond m set to zero, support size unchanged.
inline MassVector head_truncate(const MassVector& x, std::size_t m) {
  std::vector<double> out = x.data();
  for (std::size_t k = m; k < out.size(); ++k) out[k] = 0.0;
  return MassVector(std::move(out));
}

// Splits each of the first m masses into M equal shares; the rest is appended
// unchanged. Group l (0-based) occupies positions l*M .. l*M+M-1.
inline MassVector grind(const MassVector& x, std::size_t m, std::size_t pieces) {
  if (m > x.size()) throw UsageError("grind: m exceeds the support");
  if (pieces == 0) throw UsageError("grind: need at least one piece");
  std::vector<double> out;
  out.reserve(m * pieces + (x.size() - m));
  for (std::size_t k = 0; k < m; ++k)
    for (std::size_t r = 0; r < pieces; ++r) out.push_back(x[k] / static_cast<double>(pieces));
  for (std::size_t k = m; k < x.size(); ++k) out.push_back(x[k]);
  return MassVector(std::move(out));
}

inline std::string to_string(std::span<const double> v) {
  std::string s = "(";
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) s += ",";
    s += std::to_string(v[k]);
  }
  return s + ")";
}

}  // namespace coalesce
