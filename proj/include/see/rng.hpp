#pragma once

#include <cmath>
#include <cstdint>

namespace see {

// Counter-based generator (splitmix64 output function over an
// incrementing counter). Bit-identical across platforms, cheap to
// split into independent streams by hashing (seed, stream id).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : counter_(seed) {}

  static Rng derive(std::uint64_t seed, std::uint64_t stream) {
    Rng base(seed);
    // mix the stream id through one round so nearby (seed, stream)
    // pairs land far apart
    return Rng(base.next_u64() ^ mix(stream + 0x9e3779b97f4a7c15ULL));
  }

  std::uint64_t next_u64() {
    counter_ += 0x9e3779b97f4a7c15ULL;
    return mix(counter_);
  }

  // uniform on (0,1), never exactly 0 or 1
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Box-Muller; no state beyond the counter so streams stay reproducible
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  // Student t with integer degrees of freedom
  double student_t(int df) {
    double z = normal();
    double chi2 = 0.0;
    for (int i = 0; i < df; ++i) {
      double g = normal();
      chi2 += g * g;
    }
    return z / std::sqrt(chi2 / df);
  }

  // inversion by sequential search; fine for the moderate rates used here
  long poisson(double lambda) {
    double p = std::exp(-lambda);
    double cdf = p;
    double u = uniform();
    long k = 0;
    while (u > cdf && k < 10000) {
      ++k;
      p *= lambda / k;
      cdf += p;
    }
    return k;
  }

  // index in [0, n)
  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
  }

 private:
  explicit Rng(std::uint64_t c, int) : counter_(c) {}

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t counter_;
};

}  // namespace see
