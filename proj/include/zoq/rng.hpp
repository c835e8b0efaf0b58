#ifndef ZOQ_RNG_HPP
#define ZOQ_RNG_HPP

#include <cstdint>
#include <limits>
#include <random>

#include "zoq/core.hpp"

namespace zoq {

/// Counter-based random stream keyed by (seed, stream_id).
///
/// Draw n of a stream is a pure function of its key and n, so a replicate
/// reproduces the same numbers no matter which worker runs it or in which
/// order. Satisfies UniformRandomBitGenerator.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  double normal() { return normal_(*this); }

  /// Independent child stream, e.g. one for the data oracle and one for the learner.
  RngStream substream(std::uint64_t tag) const;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  RngStream(std::uint64_t seed, std::uint64_t stream_id, std::uint64_t key);

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  std::normal_distribution<double> normal_;
};

inline RngStream rng_stream(std::uint64_t seed, std::uint64_t stream_id) {
  return RngStream(seed, stream_id);
}

/// i.i.d. components uniform on [-half_width, half_width].
VectorXd sample_uniform_box(RngStream& rng, Index d, double half_width);

VectorXd sample_standard_normal(RngStream& rng, Index d);

}  // namespace zoq

#endif  // ZOQ_RNG_HPP
