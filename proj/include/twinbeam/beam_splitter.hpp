#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "twinbeam/distribution.hpp"
#include "twinbeam/log_arith.hpp"

namespace twinbeam {

// Transmissivity and phases of the splitter. Reflectivity is implicit,
// rho = 1 - tau. Phases are stored reduced to (-pi, pi].
struct BeamSplitterSpec {
  double tau = 0.5;
  double phi_tau = 0.0;
  double phi_rho = 0.0;

  BeamSplitterSpec() = default;

  explicit BeamSplitterSpec(double t, double pt = 0.0, double pr = 0.0)
      : tau(t), phi_tau(reduce_phase(pt)), phi_rho(reduce_phase(pr)) {
    if (!(tau >= 0.0 && tau <= 1.0)) {
      throw std::domain_error("BeamSplitterSpec: tau must lie in [0, 1]");
    }
    if (!std::isfinite(pt) || !std::isfinite(pr)) {
      throw std::domain_error("BeamSplitterSpec: phases must be finite");
    }
  }

  double rho() const { return 1.0 - tau; }

  static double reduce_phase(double phi) {
    const double r = std::remainder(phi, 2.0 * std::numbers::pi);
    return r;
  }
};

// Gegenbauer polynomial C_order^(alpha)(x) in (sign, log-magnitude) form.
// Ascending three-term recurrence; both running values are rescaled by an
// exact power of two whenever they pass 1e150, with the scale tracked in
// log_offset, so the result stays finite for orders far past the point where
// the plain value overflows.
inline SignedLog gegenbauer_log(long long order, double alpha, double x) {
  if (order < 0) throw std::domain_error("gegenbauer: order must be >= 0");
  if (order == 0) return SignedLog::from_value(1.0);
  double prev = 1.0;             // C_0
  double cur = 2.0 * alpha * x;  // C_1
  double log_offset = 0.0;
  for (long long k = 2; k <= order; ++k) {
    const double next =
        (2.0 * x * (static_cast<double>(k) + alpha - 1.0) * cur -
         (static_cast<double>(k) + 2.0 * alpha - 2.0) * prev) /
        static_cast<double>(k);
    prev = cur;
    cur = next;
    if (std::abs(cur) > 1e150 || std::abs(prev) > 1e150) {
      prev = std::ldexp(prev, -512);
      cur = std::ldexp(cur, -512);
      log_offset += 512.0 * std::numbers::ln2;
    }
  }
  if (cur == 0.0) return SignedLog::zero();
  return SignedLog::from_log(std::log(std::abs(cur)) + log_offset, cur > 0 ? 1 : -1);
}

inline double gegenbauer(long long order, double alpha, double x) {
  return gegenbauer_log(order, alpha, x).value();
}

// R_N^(n,n) in (sign, log-magnitude) form: amplitude for N photons at port 1
// (and 2n - N at port 2) when n photons enter each input of a splitter with
// transmissivity tau. N < n is obtained from the reflection rule
// R_N = (-1)^(N-n) R_{2n-N}.
inline SignedLog bs_coefficient_log(long long n, long long N, double tau) {
  if (n < 0) throw std::domain_error("bs_coefficient: n must be >= 0");
  if (N < 0 || N > 2 * n) {
    throw std::domain_error("bs_coefficient: N must lie in [0, 2n]");
  }
  if (!(tau > 0.0 && tau < 1.0)) {
    throw std::domain_error("bs_coefficient: tau must lie in (0, 1)");
  }
  if (N < n) {
    SignedLog r = bs_coefficient_log(n, 2 * n - N, tau);
    if ((N - n) % 2 != 0) r.sign = -r.sign;
    return r;
  }
  const double log_prefactor =
      0.5 * (log_factorial(2 * n - N) - log_factorial(N) +
             static_cast<double>(N - n) * std::log(tau * (1.0 - tau))) +
      log_factorial(2 * (N - n)) - log_factorial(N - n);
  const SignedLog geg =
      gegenbauer_log(2 * n - N, static_cast<double>(N - n) + 0.5, 2.0 * tau - 1.0);
  if (geg.sign == 0) return SignedLog::zero();
  return SignedLog::from_log(log_prefactor + geg.log_mag, geg.sign);
}

inline double bs_coefficient(long long n, long long N, double tau) {
  return bs_coefficient_log(n, N, tau).value();
}

// Output photon-number distribution [R_N]^2 over N in [0, 2n] for identical
// n-photon inputs. tau in {0, 1} is the degenerate pass-through case: all
// probability at N = n. The N < n half is mirrored from N >= n, so the
// distribution is symmetric about n by construction.
inline PhotonDistribution bs_output_distribution(long long n, double tau) {
  if (n < 0) throw std::domain_error("bs_output_distribution: n must be >= 0");
  if (!(tau >= 0.0 && tau <= 1.0)) {
    throw std::domain_error("bs_output_distribution: tau must lie in [0, 1]");
  }
  if (n == 0) return PhotonDistribution::point(0);
  if (tau == 0.0 || tau == 1.0) {
    PhotonDistribution d;
    d.support_offset = 0;
    d.weights.assign(static_cast<std::size_t>(2 * n + 1), 0.0);
    d.weights[static_cast<std::size_t>(n)] = 1.0;
    d.total_weight = 1.0;
    return d;
  }
  PhotonDistribution d;
  d.support_offset = 0;
  d.weights.assign(static_cast<std::size_t>(2 * n + 1), 0.0);
  for (long long N = n; N <= 2 * n; ++N) {
    const SignedLog r = bs_coefficient_log(n, N, tau);
    const double p = r.sign == 0 ? 0.0 : std::exp(2.0 * r.log_mag);
    d.weights[static_cast<std::size_t>(N)] = p;
    d.weights[static_cast<std::size_t>(2 * n - N)] = p;
  }
  d.recompute_total();
  return d;
}

// Amplitude <N, n1+n2-N| U_bs |n1, n2> for the general two-mode splitter,
// evaluated as the finite sum over the exchange number k with log-magnitude
// terms and explicit phase accumulation. The phase convention matches the
// creation-operator transform b_j^+ = sum_k M_jk a_k^+ with
//   M = [ sqrt(tau) e^{i phi_tau}   sqrt(rho) e^{i phi_rho} ]
//       [ -sqrt(rho) e^{-i phi_rho} sqrt(tau) e^{-i phi_tau} ].
// The alternating sum cancels catastrophically once both inputs are large
// (total photons beyond ~80); callers needing bigger blocks use the equal-
// input Gegenbauer form or the dense unitary blocks instead.
inline std::complex<double> general_bs_amplitude(long long n1, long long n2, long long N,
                                                 const BeamSplitterSpec& bs) {
  if (n1 < 0 || n2 < 0) {
    throw std::domain_error("general_bs_amplitude: photon numbers must be >= 0");
  }
  const long long total = n1 + n2;
  if (N < 0 || N > total) {
    throw std::domain_error("general_bs_amplitude: N must lie in [0, n1 + n2]");
  }
  const double tau = bs.tau;
  const double rho = bs.rho();
  if (tau == 1.0) {
    if (N != n1) return 0.0;
    return std::polar(1.0, -bs.phi_tau * static_cast<double>(n1) +
                               bs.phi_tau * static_cast<double>(n2));
  }
  if (tau == 0.0) {
    if (N != n2) return 0.0;
    const double angle = (bs.phi_rho + std::numbers::pi) * static_cast<double>(n1) -
                         bs.phi_rho * static_cast<double>(n2);
    return std::polar(1.0, angle);
  }

  const double log_tau = std::log(tau);
  const double log_rho = std::log(rho);
  const long long k_lo = std::max<long long>(0, N - n2);
  const long long k_hi = std::min(n1, N);
  if (k_lo > k_hi) return 0.0;

  // First pass: peak log magnitude for stable summation.
  double peak = -std::numeric_limits<double>::infinity();
  std::vector<double> log_mag(static_cast<std::size_t>(k_hi - k_lo + 1));
  for (long long k = k_lo; k <= k_hi; ++k) {
    const double lm = log_binomial(n1, k) + log_binomial(n2, N - k) +
                      0.5 * (static_cast<double>(k + n2 - N + k) * log_tau +
                             static_cast<double>(n1 - k + N - k) * log_rho);
    log_mag[static_cast<std::size_t>(k - k_lo)] = lm;
    peak = std::max(peak, lm);
  }
  std::complex<long double> acc = 0.0L;
  for (long long k = k_lo; k <= k_hi; ++k) {
    const double angle = -static_cast<double>(k) * bs.phi_tau +
                         static_cast<double>(n1 - k) * (bs.phi_rho + std::numbers::pi) -
                         static_cast<double>(N - k) * bs.phi_rho +
                         static_cast<double>(n2 - N + k) * bs.phi_tau;
    const long double mag =
        std::exp(static_cast<long double>(log_mag[static_cast<std::size_t>(k - k_lo)] - peak));
    acc += std::complex<long double>(mag * std::cos(static_cast<long double>(angle)),
                                     mag * std::sin(static_cast<long double>(angle)));
  }
  const double acc_norm = static_cast<double>(std::norm(acc));
  if (acc_norm == 0.0) return 0.0;
  const double log_pref = 0.5 * (log_factorial(N) + log_factorial(total - N) -
                                 log_factorial(n1) - log_factorial(n2));
  const double log_scale = log_pref + peak + 0.5 * std::log(acc_norm);
  return std::polar(std::exp(log_scale),
                    static_cast<double>(std::atan2(acc.imag(), acc.real())));
}

// |amplitude|^2 over all N for a fixed (n1, n2) input pair.
inline PhotonDistribution general_bs_probability_row(long long n1, long long n2,
                                                     const BeamSplitterSpec& bs) {
  const long long total = n1 + n2;
  PhotonDistribution d;
  d.support_offset = 0;
  d.weights.assign(static_cast<std::size_t>(total + 1), 0.0);
  for (long long N = 0; N <= total; ++N) {
    d.weights[static_cast<std::size_t>(N)] = std::norm(general_bs_amplitude(n1, n2, N, bs));
  }
  d.recompute_total();
  return d;
}

// Discrete arcsine law P(N|sigma) = w / 2^sigma C(N, N/2) C(sigma-N,
// (sigma-N)/2) for even sigma; the all-zero distribution for odd sigma. The
// optional prefactor w = |c_{sigma/2}|^2 = tanh^sigma(G) / cosh^2(G) attaches
// the twin-beam weight of the contributing component.
inline PhotonDistribution arcsine_distribution(long long sigma, bool include_prefactor = false,
                                               double gain = 0.0) {
  if (sigma < 0) throw std::domain_error("arcsine_distribution: sigma must be >= 0");
  PhotonDistribution d;
  d.support_offset = 0;
  d.weights.assign(static_cast<std::size_t>(sigma + 1), 0.0);
  if (sigma % 2 != 0) {
    d.total_weight = 0.0;
    return d;
  }
  double log_w = 0.0;
  if (include_prefactor) {
    if (!(gain > 0.0)) {
      throw std::domain_error("arcsine_distribution: prefactor requires G > 0");
    }
    log_w = static_cast<double>(sigma) * std::log(std::tanh(gain)) -
            2.0 * std::log(std::cosh(gain));
  }
  const double log_two = std::numbers::ln2;
  for (long long N = 0; N <= sigma; N += 2) {
    const double lp = log_w - static_cast<double>(sigma) * log_two +
                      log_binomial(N, N / 2) + log_binomial(sigma - N, (sigma - N) / 2);
    d.weights[static_cast<std::size_t>(N)] = std::exp(lp);
  }
  d.recompute_total();
  return d;
}

// Binomial(sigma, tau): the photon-number distribution for independent
// (distinguishable) inputs, used as the no-interference reference.
inline PhotonDistribution binomial_reference_distribution(long long sigma, double tau) {
  if (sigma < 0) throw std::domain_error("binomial_reference_distribution: sigma must be >= 0");
  if (!(tau >= 0.0 && tau <= 1.0)) {
    throw std::domain_error("binomial_reference_distribution: tau must lie in [0, 1]");
  }
  PhotonDistribution d;
  d.support_offset = 0;
  d.weights.assign(static_cast<std::size_t>(sigma + 1), 0.0);
  if (tau == 0.0 || tau == 1.0) {
    d.weights[static_cast<std::size_t>(tau == 0.0 ? 0 : sigma)] = 1.0;
    d.total_weight = 1.0;
    return d;
  }
  const double lt = std::log(tau);
  const double lr = std::log(1.0 - tau);
  for (long long N = 0; N <= sigma; ++N) {
    d.weights[static_cast<std::size_t>(N)] =
        std::exp(log_binomial(sigma, N) + static_cast<double>(N) * lt +
                 static_cast<double>(sigma - N) * lr);
  }
  d.recompute_total();
  return d;
}

}  // namespace twinbeam
