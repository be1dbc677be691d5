#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <utility>
#include <vector>

namespace marginfuse {

// Mixes a 64-bit value through the splitmix64 finalizer. Used to derive
// independent sub-stream seeds from one user-facing seed, e.g. one stream
// per tree in a forest or per phase of the trainer.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return mix64(seed ^ mix64(stream + 1));
}

// Seeded generator wrapping std::mt19937_64 with hand-rolled draw functions.
// The standard <random> distributions are implementation-defined, so using
// them would tie results to one standard library; every draw below is fully
// specified, which keeps models and datasets bit-reproducible everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Unbiased integer in [0, n), n >= 1, by rejection.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  // Standard normal pair via Box-Muller.
  std::pair<double, double> gaussian_pair() {
    const double u1 = 1.0 - uniform();  // (0, 1], keeps the log finite
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    return {r * std::cos(a), r * std::sin(a)};
  }

  // In-place Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

  // First `count` elements of a Fisher-Yates pass over 0..n-1, sorted
  // ascending. Used for per-split feature subsampling.
  std::vector<int> sample_distinct(int n, int count) {
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    if (count > n) count = n;
    for (int i = 0; i < count; ++i) {
      std::swap(idx[i], idx[i + static_cast<int>(below(n - i))]);
    }
    idx.resize(count);
    std::sort(idx.begin(), idx.end());
    return idx;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace marginfuse
