#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace roadgraph {

// Seeded generator whose derived draws are bit-identical across platforms.
// The 64-bit Mersenne Twister output is fixed by the standard; the
// distributions below are implemented here because the std:: ones are not.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform integer in [0, n). n must be > 0.
  std::uint64_t uniform_index(std::uint64_t n);
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(uniform_index(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// splitmix64 mixing of (seed, stream) so independent consumers of one
// user-facing seed do not share a random sequence.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace roadgraph
