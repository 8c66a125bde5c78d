#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>

#include "twinbeam/errors.hpp"
#include "twinbeam/log_arith.hpp"

namespace twinbeam {

// Counter-based splittable generator: every (seed, trial, stream) triple is
// mixed into an independent splitmix64 state, so per-trial sampling is
// reproducible no matter how trials are distributed over workers.
class TrialRng {
 public:
  TrialRng(std::uint64_t seed, std::uint64_t trial, std::uint64_t stream)
      : state_(derive_state(seed, trial, stream)) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform on the open interval (0, 1); never returns an exact 0 or 1, so
  // logs and inverse CDFs are always finite.
  double uniform01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Box-Muller with the usual cached spare.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  double exponential(double mean) { return -mean * std::log(uniform01()); }

  // Bose-Einstein / geometric photon number with the given mean:
  // P(n) = (1-q) q^n, q = mean / (1 + mean).
  long long bose_einstein(double mean) {
    if (mean <= 0.0) return 0;
    const double q = mean / (1.0 + mean);
    const double n = std::floor(std::log(uniform01()) / std::log(q));
    return static_cast<long long>(n);
  }

  long long poisson(double lambda) {
    if (lambda <= 0.0) return 0;
    if (lambda < 30.0) return poisson_knuth(lambda);
    return poisson_ptrd(lambda);
  }

  long long binomial(long long n, double p) {
    if (n < 0) throw std::domain_error("binomial: n must be >= 0");
    if (p <= 0.0) return 0;
    if (p >= 1.0) return n;
    if (n > (1LL << 16)) {
      throw ResourceError("binomial: n too large for the Bernoulli-sum sampler");
    }
    long long k = 0;
    for (long long i = 0; i < n; ++i) {
      if (uniform01() < p) ++k;
    }
    return k;
  }

  // Marsaglia-Tsang; requires shape >= 1, which covers the effective mode
  // counts used for multimode thermal intensities.
  double gamma(double shape, double scale) {
    if (shape < 1.0) throw std::domain_error("gamma: shape must be >= 1");
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x = normal();
      double v = 1.0 + c * x;
      if (v <= 0.0) continue;
      v = v * v * v;
      const double u = uniform01();
      if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) {
        return d * v * scale;
      }
    }
  }

 private:
  static std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  static std::uint64_t derive_state(std::uint64_t seed, std::uint64_t trial,
                                    std::uint64_t stream) {
    std::uint64_t z = seed;
    z = mix64(z + 0x9E3779B97F4A7C15ULL * (trial + 1));
    z = mix64(z + 0xC2B2AE3D27D4EB4FULL * (stream + 1));
    return z;
  }

  long long poisson_knuth(double lambda) {
    const double limit = std::exp(-lambda);
    long long k = 0;
    double prod = uniform01();
    while (prod > limit) {
      ++k;
      prod *= uniform01();
    }
    return k;
  }

  // Hormann's PTRD transformed-rejection sampler; exact for any lambda that
  // fits count arithmetic, including the ~1e9 detected means of the bright
  // regime.
  long long poisson_ptrd(double lambda) {
    const double slam = std::sqrt(lambda);
    const double loglam = std::log(lambda);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
      double u = uniform01() - 0.5;
      double v = uniform01();
      const double us = 0.5 - std::abs(u);
      const double kf = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
      if (us >= 0.07 && v <= v_r) return static_cast<long long>(kf);
      if (kf < 0.0 || (us < 0.013 && v > us)) continue;
      const long long k = static_cast<long long>(kf);
      const double lhs = std::log(v * inv_alpha / (a / (us * us) + b));
      const double rhs = kf * loglam - lambda - log_factorial(k);
      if (lhs <= rhs) return k;
    }
  }

  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace twinbeam
