#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "hash.hpp"

namespace zeroday {

// Derives an independent stream seed from a root seed and a stream name.
// Every shuffle, initializer, and sampler in the project draws from a
// stream named this way, so one root seed pins the whole run.
inline std::uint64_t derive_seed(std::uint64_t root, std::string_view stream) {
  return splitmix64(root ^ fnv1a64(stream));
}

inline std::uint64_t derive_seed(std::uint64_t root, std::string_view stream,
                                 std::uint64_t index) {
  return splitmix64(derive_seed(root, stream) ^ splitmix64(index));
}

// mt19937_64 with fixed uniform/normal/shuffle routines on top. The
// standard pins the engine's output sequence; the routines here avoid
// std::*_distribution so the stream depends only on the seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // [0, 1) with 53 random bits
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // unbiased integer in [0, n); n must be positive
  std::size_t below(std::size_t n) {
    const std::uint64_t span = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t v;
    do {
      v = next_u64();
    } while (v >= limit);
    return static_cast<std::size_t>(v % span);
  }

  // standard normal via Box-Muller; consumes two uniforms per pair
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1;
    do {
      u1 = uniform01();
    } while (u1 <= 0.0);
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  // Fisher-Yates
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace zeroday
