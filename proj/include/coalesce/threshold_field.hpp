#pragma once

// Counter-based randomness. Every variate is a pure function of
// (seed, stream_id, counter), so an "infinite" i.i.d. matrix can be read at
// any index in O(1) and trials never depend on thread scheduling.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>

#include "coalesce/error.hpp"

namespace coalesce {

namespace detail {

inline constexpr std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Philox2x64-10 block function (Salmon et al., SC'11).
inline constexpr std::array<std::uint64_t, 2> philox2x64_10(std::uint64_t key, std::uint64_t c0, std::uint64_t c1) {
  constexpr std::uint64_t kMul = 0xD2B74407B1CE6E93ULL;
  constexpr std::uint64_t kWeyl = 0x9E3779B97F4A7C15ULL;
  for (int round = 0; round < 10; ++round) {
    const unsigned __int128 prod = static_cast<unsigned __int128>(kMul) * c0;
    const auto hi = static_cast<std::uint64_t>(prod >> 64);
    const auto lo = static_cast<std::uint64_t>(prod);
    c0 = hi ^ key ^ c1;
    c1 = lo;
    key += kWeyl;
  }
  return {c0, c1};
}

// One 64-bit word per counter: both output lanes folded together.
inline constexpr std::uint64_t philox2x64(std::uint64_t key, std::uint64_t c0, std::uint64_t c1) {
  const auto out = philox2x64_10(key, c0, c1);
  return out[0] ^ splitmix64(out[1]);
}

enum class Domain : std::uint64_t { kThreshold = 0x7468726573686f6cULL, kStream = 0x73747265616d5f5fULL };

inline constexpr std::uint64_t derive_key(std::uint64_t seed, std::uint64_t stream_id, Domain domain) {
  return splitmix64(seed ^ splitmix64(stream_id ^ splitmix64(static_cast<std::uint64_t>(domain))));
}

}  // namespace detail

// Maps a 64-bit word to the open interval (0,1). Only the top 52 bits are
// used so that the result is exactly representable and never rounds to 1.
inline constexpr double to_open_unit(std::uint64_t word) {
  return (static_cast<double>(word >> 12) + 0.5) * 0x1.0p-52;
}

// Exp(1) by inversion; strictly positive and finite for every word.
inline double to_exponential(std::uint64_t word) { return -std::log(to_open_unit(word)); }

// The symmetric i.i.d. Exp(1) threshold matrix indexed by pairs of positive
// integers. `offset` realizes the shifted table a^{[m up]}(i,j) = a(i+m, j+m)
// as a view on the same stream.
class ThresholdField {
 public:
  constexpr ThresholdField() = default;
  constexpr ThresholdField(std::uint64_t seed, std::uint64_t stream_id, std::uint64_t offset = 0)
      : seed_(seed),
        stream_id_(stream_id),
        offset_(offset),
        key_(detail::derive_key(seed, stream_id, detail::Domain::kThreshold)) {}

  [[nodiscard]] double operator()(std::uint64_t i, std::uint64_t j) const {
    if (i == j) throw UsageError("ThresholdField: loops {i,i} carry no threshold");
    if (i == 0 || j == 0) throw UsageError("ThresholdField: vertices are positive integers");
    return unchecked(i, j);
  }

  // Caller guarantees 1 <= i, j and i != j.
  [[nodiscard]] double unchecked(std::uint64_t i, std::uint64_t j) const {
    if (i > j) std::swap(i, j);
    return to_exponential(detail::philox2x64(key_, i + offset_, j + offset_));
  }

  [[nodiscard]] ThresholdField shifted(std::uint64_t m) const {
    ThresholdField out = *this;
    out.offset_ += m;
    return out;
  }

  // The next independent copy (A', A~, ...) lives on the next stream.
  [[nodiscard]] ThresholdField independent_copy(std::uint64_t k = 1) const {
    return ThresholdField(seed_, stream_id_ + k, 0);
  }

  [[nodiscard]] constexpr std::uint64_t seed() const { return seed_; }
  [[nodiscard]] constexpr std::uint64_t stream_id() const { return stream_id_; }
  [[nodiscard]] constexpr std::uint64_t offset() const { return offset_; }

 private:
  std::uint64_t seed_ = 0;
  std::uint64_t stream_id_ = 0;
  std::uint64_t offset_ = 0;
  std::uint64_t key_ = detail::derive_key(0, 0, detail::Domain::kThreshold);
};

inline double evaluate(const ThresholdField& field, std::uint64_t i, std::uint64_t j) { return field(i, j); }

// Sequential counter-based generator for the parts that need fresh (not
// index-addressed) randomness: jump holding times, geometric skips.
// Satisfies UniformRandomBitGenerator.
class StreamRng {
 public:
  using result_type = std::uint64_t;

  StreamRng(std::uint64_t seed, std::uint64_t stream_id)
      : key_(detail::derive_key(seed, stream_id, detail::Domain::kStream)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return detail::philox2x64(key_, counter_++, 0); }

  double uniform() { return to_open_unit((*this)()); }
  double exponential(double rate) { return to_exponential((*this)()) / rate; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Each Monte Carlo trial owns a block of stream ids so that its independent
// copies (A, A', A~, fresh rng) never collide with another trial's.
inline constexpr std::uint64_t kStreamsPerTrial = 16;

inline constexpr std::uint64_t trial_stream(std::uint64_t base, std::uint64_t trial) {
  return base + trial * kStreamsPerTrial;
}

}  // namespace coalesce
