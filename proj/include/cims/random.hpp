#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace cims {

// Deterministic random stream: every draw is a pure function of the seed and
// the draw count. Uniform/gaussian are derived from raw 64-bit words here
// rather than through std distributions, whose output is
// implementation-defined.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed) : engine_(seed) {}
  virtual ~RandomSource() = default;

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on (0, 1); a raw zero is remapped to the smallest positive
  // draw so ln(u) stays finite.
  virtual double uniform() {
    double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    if (u == 0.0) u = 0x1.0p-53;
    return u;
  }

  // Standard normal via Box-Muller; the second draw of each pair is cached.
  virtual double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * kPi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  virtual bool bernoulli(double p) { return uniform() < p; }

 private:
  static constexpr double kPi = 3.14159265358979323846;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace cims
