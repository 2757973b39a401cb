#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "lftc/error.hpp"

namespace lftc {

// mt19937_64 with hand-rolled distributions. The std:: distribution adaptors
// are implementation-defined, so sampling through them would break
// bit-reproducibility across toolchains; the raw engine output is specified.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform in [0, n), exact (rejection sampling, no modulo bias).
  std::uint64_t uniform_below(std::uint64_t n) {
    if (n == 0) fail(ErrorKind::Contract, "uniform_below: n must be positive");
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t mod = (max % n + 1) % n;  // 2^64 mod n
    if (mod == 0) return engine_() % n;
    const std::uint64_t cutoff = max - mod + 1;  // largest multiple of n
    std::uint64_t x = engine_();
    while (x >= cutoff) x = engine_();
    return x % n;
  }

  // Uniform integer in [lo, hi], inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    if (lo > hi) fail(ErrorKind::Contract, "uniform_int: empty range");
    return lo + static_cast<std::int64_t>(uniform_below(
                    static_cast<std::uint64_t>(hi - lo) + 1));
  }

  // Standard normal via Box-Muller. One value per call; the companion draw is
  // discarded so there is no carry state to reason about.
  double normal() {
    double u1;
    do {
      u1 = uniform01();
    } while (u1 == 0.0);
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  void normal_fill(std::vector<double>& out, double mean, double stddev) {
    for (double& v : out) v = normal(mean, stddev);
  }

  // Fisher-Yates, unbiased and engine-deterministic.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(uniform_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

// splitmix64 of (base, salt); derives independent stream seeds from one seed.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt) {
  std::uint64_t z = base + salt * 0x9e3779b97f4a7c15ULL + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace lftc
