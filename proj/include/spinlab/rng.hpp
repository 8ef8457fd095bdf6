#pragma once

#include <cmath>
#include <cstdint>

// Counter-based Gaussian streams. Every coefficient is keyed by
// (seed, degree, multi-index rank), so tensors are reproducible no matter
// which order the sampling loop visits them in.

namespace spinlab::rng {

inline std::uint64_t mix64(std::uint64_t z) {
  // splitmix64 finalizer
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_key(std::uint64_t seed, std::uint64_t a,
                                std::uint64_t b = 0) {
  return mix64(seed ^ mix64(a + 0x632be59bd9b4e019ull) ^
               mix64(mix64(b) + 0x9e6c63d0876a9a47ull));
}

inline double u01(std::uint64_t h) {
  // (0,1), never exactly 0
  return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
}

// One standard normal per (key, counter) pair.
inline double gaussian(std::uint64_t key, std::uint64_t counter) {
  std::uint64_t h1 = mix64(key ^ mix64(counter));
  std::uint64_t h2 = mix64(h1 + 0xda942042e4dd58b5ull);
  double u = u01(h1), v = u01(h2);
  return std::sqrt(-2.0 * std::log(u)) * std::cos(6.283185307179586476925287 * v);
}

// Sequential stream for Monte Carlo work (sampling points, restarts, ...).
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    return mix64(state_);
  }
  double uniform() { return u01(next_u64()); }
  double normal() {
    double u = uniform(), v = uniform();
    return std::sqrt(-2.0 * std::log(u)) *
           std::cos(6.283185307179586476925287 * v);
  }
  // uniform integer in [0, n)
  std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

 private:
  std::uint64_t state_;
};

}  // namespace spinlab::rng
