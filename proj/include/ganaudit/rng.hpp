#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>
#include <vector>

namespace ganaudit {

// PCG32 with an explicit Box-Muller normal sampler. The standard library
// distributions are implementation-defined, which would break the
// bit-reproducibility contracts, so every random draw in the project goes
// through this class.
class Rng {
 public:
  explicit Rng(uint64_t seed) {
    state_ = 0u;
    inc_ = (seed << 1u) | 1u;
    next_u32();
    state_ += 0x853c49e6748fea9bULL + seed;
    next_u32();
  }

  uint32_t next_u32() {
    uint64_t old = state_;
    state_ = old * 6364136223846793005ULL + inc_;
    uint32_t xorshifted = static_cast<uint32_t>(((old >> 18u) ^ old) >> 27u);
    uint32_t rot = static_cast<uint32_t>(old >> 59u);
    return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
  }

  uint64_t next_u64() {
    uint64_t hi = next_u32();
    return (hi << 32) | next_u32();
  }

  // Uniform in [0, 1).
  double uniform() { return next_u32() * (1.0 / 4294967296.0); }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [lo, hi] inclusive.
  int uniform_int(int lo, int hi) {
    uint32_t span = static_cast<uint32_t>(hi - lo) + 1u;
    return lo + static_cast<int>(next_u32() % span);
  }

  // Standard normal via Box-Muller, caching the second value of each pair.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 1.0 - uniform();  // (0, 1]
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  float normal_float() { return static_cast<float>(normal()); }

  // Fisher-Yates; std::shuffle is not pinned to an algorithm by the standard.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = next_u32() % i;
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  uint64_t state_ = 0;
  uint64_t inc_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Stable sub-seed derivation: one master seed fans out to independent
// streams keyed by a short tag (and optional integer coordinates).
inline uint64_t derive_seed(uint64_t base, std::string_view tag) {
  uint64_t h = 1469598103934665603ULL ^ base;
  for (char ch : tag) {
    h ^= static_cast<unsigned char>(ch);
    h *= 1099511628211ULL;
  }
  return splitmix64(h);
}

inline uint64_t derive_seed(uint64_t base, std::string_view tag, uint64_t a) {
  return splitmix64(derive_seed(base, tag) ^ splitmix64(a + 0x51ed2701ULL));
}

inline uint64_t derive_seed(uint64_t base, std::string_view tag, uint64_t a,
                            uint64_t b) {
  return splitmix64(derive_seed(base, tag, a) ^ splitmix64(b + 0xabcd1234ULL));
}

}  // namespace ganaudit
