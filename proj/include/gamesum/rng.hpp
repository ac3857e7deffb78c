#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace gamesum {

std::uint64_t fnv1a64(std::string_view s);

// Deterministic RNG front-end. std::mt19937_64 output is pinned by the
// standard; all scaling is done by hand because the std distributions are
// implementation-defined and would break cross-platform reproducibility.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next() { return gen_(); }

  // [0,1)
  double uniform() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Box-Muller, consumes two uniforms per pair.
  double gaussian();

  // [0,n), n > 0
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(next() % n); }

  // Fisher-Yates
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[index(i)]);
    }
  }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace gamesum
