#include "idem/random.hpp"

#include "idem/errors.hpp"

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include <algorithm>
#include <numeric>

namespace idem {

double RandomSource::uniform(double lo, double hi) {
  if (!(lo < hi)) {
    if (lo == hi) return lo;
    throw ValidationError("uniform: lower bound exceeds upper bound");
  }
  return boost::random::uniform_real_distribution<double>(lo, hi)(engine_);
}

double RandomSource::normal() {
  return boost::random::normal_distribution<double>(0.0, 1.0)(engine_);
}

std::size_t RandomSource::index(std::size_t n) {
  if (n == 0) throw ValidationError("index: empty range");
  return boost::random::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
}

std::vector<std::size_t> RandomSource::sample_without_replacement(std::size_t n, std::size_t count) {
  if (count > n) throw ValidationError("cannot sample more items than available");
  // Partial Fisher-Yates over an index table.
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + index(n - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(count);
  std::sort(pool.begin(), pool.end());
  return pool;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace idem
