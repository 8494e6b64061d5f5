#pragma once

#include <cstdint>
#include <random>

namespace rvcop {

// SplitMix64 finalizer. Used to derive independent seed values from a master
// seed plus logical coordinates (model id, day index, replication index, ...)
// so that results never depend on which thread picked up a work item.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed) { return mix64(seed); }

template <typename... Rest>
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t head, Rest... rest) {
  return derive_seed(mix64(seed ^ mix64(head)), rest...);
}

/// Deterministic RNG stream. Distribution objects are constructed per call so
/// a stream's output is a pure function of its seed and the call sequence.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : gen_(seed) {}

  template <typename... Tags>
  static RngStream from(std::uint64_t seed, Tags... tags) {
    return RngStream(derive_seed(seed, static_cast<std::uint64_t>(tags)...));
  }

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(gen_); }
  /// Uniform on the open interval (lo, hi); resamples the measure-zero edges.
  double uniform_open(double lo = 0.0, double hi = 1.0) {
    double u;
    do {
      u = std::uniform_real_distribution<double>(lo, hi)(gen_);
    } while (u <= lo || u >= hi);
    return u;
  }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(gen_); }
  double exponential() { return std::exponential_distribution<double>(1.0)(gen_); }
  double gamma(double shape, double scale = 1.0) {
    return std::gamma_distribution<double>(shape, scale)(gen_);
  }
  double chi_squared(double df) { return gamma(df / 2.0, 2.0); }
  std::uint64_t uniform_index(std::uint64_t n) {
    return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(gen_);
  }

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace rvcop
