#pragma once

#include <cstdint>
#include <random>

namespace ro {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Stream seed for item `index` under a root seed; used for per-shot / per-trial reproducibility.
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) {
  return splitmix64(splitmix64(root) ^ splitmix64(index + 0x632BE59BD9B4E019ull));
}

// mt19937_64 is fully specified by the standard; the helpers below avoid the
// implementation-defined std distributions so streams are portable.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(splitmix64(seed)) {}
  std::uint64_t next() { return eng_(); }
  // Uniform on {0, ..., n-1}; n >= 1.
  std::uint64_t below(std::uint64_t n) {
    if ((n & (n - 1)) == 0) return next() & (n - 1);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do v = next();
    while (v >= limit);
    return v % n;
  }
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  bool bernoulli(double p) { return unit() < p; }

 private:
  std::mt19937_64 eng_;
};

}  // namespace ro
