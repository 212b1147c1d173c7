#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace ged {

// Seeded random stream. All draws are built from raw 64-bit engine output
// so results do not depend on the standard library's distribution classes.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  // Independent stream for (seed, stream): used for per-sentence and
  // per-epoch randomness so results do not depend on processing order.
  static Rng derive(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, n). n must be positive.
  std::size_t uniform_index(std::size_t n);

  // Uniform in [0, 1) with 53 bits of resolution.
  double uniform01();

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  template <class T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[uniform_index(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace ged
