#pragma once

#include <cmath>
#include <cstdint>

namespace ctrec {

// splitmix64: 64-bit counter-based generator. Output i of a stream seeded
// with s is mix(s + (i+1)*GAMMA), so arbitrary positions can be addressed
// directly; corpus generation relies on that for per-image substreams.
class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0,1). 53-bit mantissa.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform in [lo,hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller (one value per call, spare cached).
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    while (u1 <= 0.0) u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // Uniform integer in [0,n).
  std::uint64_t below(std::uint64_t n) { return next() % n; }

  // Derive an independent substream; used for per-image noise streams.
  static std::uint64_t substream(std::uint64_t seed, std::uint64_t index) {
    SplitMix64 g(seed ^ (0x632be59bd9b4e019ull * (index + 1)));
    return g.next();
  }

private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace ctrec
