#pragma once

#include <cmath>
#include <cstdint>

namespace sbdp {

/// Counter-based deterministic random stream. Each value is a pure function
/// of (seed, stream, counter), so data generation is reproducible across
/// platforms and independent of draw order between streams.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : seed_(seed), stream_(stream) {}

  /// Uniform draw in (0, 1).
  double uniform() {
    const std::uint64_t v = value(counter_++);
    return (static_cast<double>(v >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal draw via Box-Muller (consumes two uniforms).
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t value(std::uint64_t counter) const {
    return mix(mix(mix(seed_) ^ mix(stream_ * 0xd1342543de82ef95ULL)) ^
               mix(counter * 0xaf251af3b0f025b5ULL));
  }

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace sbdp
