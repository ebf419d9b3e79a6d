#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace containment {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Deterministic random stream. Normals use Box-Muller on top of a seeded
/// mt19937_64 so outputs are identical across platforms and reruns.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t raw() { return gen_(); }

  // [0, 1)
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    // Box-Muller, cosine branch; u1 shifted away from 0 so log stays finite.
    const double u1 = (static_cast<double>(gen_() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

 private:
  std::mt19937_64 gen_;
};

/// Counter-based stream derivation: replicate i of a run seeded with `master`
/// gets an independent stream. Matches the ensemble reproducibility contract
/// (the first k replicates are identical for any replicate count).
inline RngStream derive_stream(std::uint64_t master, std::uint64_t index) {
  return RngStream(splitmix64(master ^ splitmix64(index + 1)));
}

}  // namespace containment
