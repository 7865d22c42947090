#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string_view>
#include <vector>

namespace gridfill {

// 64-bit FNV-1a. Used to derive independent per-job random streams from a
// base seed plus a label (e.g. a transformer id).
inline std::uint64_t fnv1a64(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view label) {
  std::uint64_t h = fnv1a64(label);
  // splitmix64 finalizer mixes seed and label hash
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL + h;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Seeded random stream. The variate transforms are written out by hand:
// std::*_distribution output is implementation-defined, which would break
// cross-platform reproducibility of seeded runs.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t seed, std::string_view label) : engine_(derive_seed(seed, label)) {}

  // uniform in [0, 1)
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // uniform in (0, 1), never returns an exact 0 or 1
  double uniform_open() {
    double u;
    do {
      u = uniform();
    } while (u <= 0.0);
    return u;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double exponential(double mean) { return -mean * std::log(uniform_open()); }

  double normal(double mu = 0.0, double sigma = 1.0) {
    if (!have_spare_) {
      double u1 = uniform_open();
      double u2 = uniform();
      double r = std::sqrt(-2.0 * std::log(u1));
      spare_ = r * std::sin(6.283185307179586477 * u2);
      have_spare_ = true;
      return mu + sigma * r * std::cos(6.283185307179586477 * u2);
    }
    have_spare_ = false;
    return mu + sigma * spare_;
  }

  // uniform integer in [0, n)
  std::uint64_t below(std::uint64_t n) {
    // rejection sampling keeps the draw exactly uniform
    std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace gridfill
