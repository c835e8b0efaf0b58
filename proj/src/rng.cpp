#include "zoq/rng.hpp"

namespace zoq {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t derive_key(std::uint64_t parent, std::uint64_t tag) noexcept {
  return mix64(parent ^ mix64(tag + kGolden));
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : RngStream(seed, stream_id, derive_key(mix64(seed), stream_id)) {}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id, std::uint64_t key)
    : seed_(seed), stream_id_(stream_id), key_(key) {}

RngStream::result_type RngStream::operator()() noexcept {
  ++counter_;
  return mix64(key_ + counter_ * kGolden);
}

RngStream RngStream::substream(std::uint64_t tag) const {
  return RngStream(seed_, stream_id_, derive_key(key_, tag ^ 0xA5A5A5A5A5A5A5A5ULL));
}

VectorXd sample_uniform_box(RngStream& rng, Index d, double half_width) {
  if (!(half_width > 0.0)) fail(Errc::invalid_hyperparameter, "box half-width must be positive");
  if (d < 1) fail(Errc::invalid_argument, "dimension must be at least 1");
  VectorXd u(d);
  for (Index i = 0; i < d; ++i) u[i] = rng.uniform(-half_width, half_width);
  return u;
}

VectorXd sample_standard_normal(RngStream& rng, Index d) {
  VectorXd x(d);
  for (Index i = 0; i < d; ++i) x[i] = rng.normal();
  return x;
}

}  // namespace zoq
