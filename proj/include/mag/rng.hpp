// Deterministic random primitives. The engine is std::mt19937_64, whose bit
// stream is fully specified by the C++ standard, and every distribution
// transform is implemented here rather than with <random>'s distribution
// classes, whose algorithms are unspecified and differ across standard
// libraries. Given the same seed, the same sequence of calls reproduces the
// same draws on every conforming platform (transcendental draws such as
// gamma/beta are additionally subject to libm rounding, see gamma()).
//
// Transforms used:
//   uniform01      (x >> 11) * 2^-53, uniform on [0, 1)
//   uniform_below  Lemire multiply-shift bounded integers
//   normal         Marsaglia polar method, first component only
//   gamma          Marsaglia-Tsang squeeze (shape >= 1),
//                  Johnk-style boost gamma(a+1) * u^(1/a) for shape < 1
//   beta           gamma ratio x / (x + y)
//   shuffle        Fisher-Yates driven by uniform_below

#ifndef MAG_RNG_HPP
#define MAG_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "mag/domain.hpp"

namespace mag {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1): top 53 bits of one engine draw.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, n). Multiply-shift on one 64-bit draw; the
  // residual bias is below n / 2^64.
  std::uint64_t uniform_below(std::uint64_t n) {
    detail::require(n > 0, ErrorKind::invalid_argument,
                    "Rng::uniform_below: n must be positive");
    const auto wide = static_cast<unsigned __int128>(engine_()) * n;
    return static_cast<std::uint64_t>(wide >> 64);
  }

  // Standard normal via the Marsaglia polar method. The second component of
  // each accepted pair is discarded to keep the call sequence stateless.
  double normal() {
    for (;;) {
      const double u = 2.0 * uniform01() - 1.0;
      const double v = 2.0 * uniform01() - 1.0;
      const double s = u * u + v * v;
      if (s > 0.0 && s < 1.0) {
        return u * std::sqrt(-2.0 * std::log(s) / s);
      }
    }
  }

  // Gamma(shape, 1). Marsaglia-Tsang for shape >= 1; for shape < 1 draws
  // Gamma(shape + 1) and multiplies by u^(1/shape), which supports the
  // bimodal Beta(0.5, 0.5) construction.
  double gamma(double shape) {
    detail::require(shape > 0.0, ErrorKind::invalid_argument,
                    "Rng::gamma: shape must be positive");
    if (shape < 1.0) {
      const double boost = gamma(shape + 1.0);
      double u = uniform01();
      while (u == 0.0) u = uniform01();
      return boost * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x = normal();
      double v = 1.0 + c * x;
      if (v <= 0.0) continue;
      v = v * v * v;
      const double u = uniform01();
      const double x2 = x * x;
      if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
      if (u > 0.0 && std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) {
        return d * v;
      }
    }
  }

  // Beta(a, b) via the gamma ratio. Retries the measure-zero case where both
  // gamma draws underflow to zero.
  double beta(double a, double b) {
    for (;;) {
      const double x = gamma(a);
      const double y = gamma(b);
      if (x + y > 0.0) return x / (x + y);
    }
  }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(uniform_below(i));
      using std::swap;
      swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace mag

#endif  // MAG_RNG_HPP
