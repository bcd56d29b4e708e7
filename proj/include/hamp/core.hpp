#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cstdint>
#include <initializer_list>
#include <random>

namespace hamp {

using Vec3 = Eigen::Vector3d;
using VecX = Eigen::VectorXd;

/// splitmix64 finalizer, used to derive independent seed streams.
inline std::uint64_t split_mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Order-sensitive combination of seed components (master seed, query index,
/// repetition, planner id, ...) into one reproducible engine seed.
inline std::uint64_t mix_seed(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = 0x51'7c'c1'b7'27'22'0a'95ULL;
  for (std::uint64_t p : parts) h = split_mix64(h ^ p);
  return h;
}

/// Deterministic RNG wrapper. std::uniform_real_distribution is
/// implementation-defined, so doubles are built from raw engine bits to keep
/// the same seed reproducible across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1).
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer in [0, n).
  int uniform_int(int n) {
    int v = static_cast<int>(uniform01() * static_cast<double>(n));
    return v < n ? v : n - 1;
  }

  VecX uniform_vector(const VecX& lo, const VecX& hi) {
    VecX x(lo.size());
    for (Eigen::Index k = 0; k < lo.size(); ++k) x[k] = uniform(lo[k], hi[k]);
    return x;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace hamp
