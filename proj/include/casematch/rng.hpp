#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

namespace casematch {

// Seeded RNG whose derived draws (unit reals, bounded ints, shuffles) are
// implemented here rather than through std distributions, so that outputs
// are identical across standard libraries and platforms.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  uint64_t next_u64() { return gen_(); }

  // Uniform in [0, 1).
  double next_unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n). n must be positive.
  size_t below(size_t n) { return static_cast<size_t>(gen_() % n); }

  // Uniform integer in [lo, hi].
  int range(int lo, int hi) {
    return lo + static_cast<int>(below(static_cast<size_t>(hi - lo) + 1));
  }

  // Fisher-Yates.
  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[below(i)]);
    }
  }

  // k distinct indices from [0, n), sorted ascending.
  std::vector<int> sample_indices(int n, int k) {
    std::vector<int> all(static_cast<size_t>(n));
    std::iota(all.begin(), all.end(), 0);
    shuffle(all);
    all.resize(static_cast<size_t>(k));
    std::sort(all.begin(), all.end());
    return all;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace casematch
