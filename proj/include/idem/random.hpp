#pragma once

#include <boost/random/mersenne_twister.hpp>

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace idem {

/// Seeded generator shared by every stochastic operation.
///
/// Engine and distributions come from Boost.Random rather than <random>: the
/// standard library leaves distribution algorithms implementation-defined,
/// Boost pins them, so a seed reproduces the same draws on every platform.
class RandomSource {
 public:
  static constexpr std::string_view kAlgorithm = "mt19937_64+boost.random";

  explicit RandomSource(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::string_view algorithm() const noexcept { return kAlgorithm; }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi);
  /// Standard normal draw.
  double normal();
  /// Uniform integer in [0, n).
  std::size_t index(std::size_t n);
  /// `count` distinct indices from [0, n), returned in ascending order.
  std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t count);

 private:
  std::uint64_t seed_;
  boost::random::mt19937_64 engine_;
};

/// SplitMix64 mix of (seed, stream); used to give independent sub-streams
/// (per scenario, per degradation step) a well-spread seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace idem
