#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace hbml {

/// What a stream is used for. Part of the stream key, so two purposes never
/// share a sequence even at the same iteration and unit.
enum class StreamTag : std::uint64_t {
  IndividualCoefs = 1,
  PopulationMean = 2,
  PopulationCov = 3,
  FixedCoefs = 4,
  Jumble = 5,
  Simulate = 6,
  Test = 99,
};

struct StreamKey {
  StreamTag tag = StreamTag::Test;
  std::uint64_t iteration = 0;
  std::uint64_t unit = 0;
};

/// Keyed random stream. The generator state is a pure function of
/// (seed, key): the key is hashed through splitmix64 into the 256-bit state
/// of a xoshiro256** generator. Identical (seed, key) pairs reproduce the
/// same sequence on any thread, in any order.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, StreamKey key);
  explicit RngStream(std::uint64_t seed) : RngStream(seed, StreamKey{}) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Uniform on the open interval (0, 1).
  double uniform();
  double normal();
  /// Gamma(shape, scale = 1), Marsaglia-Tsang.
  double gamma(double shape);
  double chi_squared(double dof) { return 2.0 * gamma(0.5 * dof); }
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  std::uint64_t seed() const { return seed_; }
  const StreamKey& key() const { return key_; }

 private:
  std::uint64_t seed_;
  StreamKey key_;
  std::array<std::uint64_t, 4> s_{};
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace hbml
