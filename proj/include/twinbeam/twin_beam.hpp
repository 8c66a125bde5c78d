#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "twinbeam/distribution.hpp"
#include "twinbeam/errors.hpp"

namespace twinbeam {

// Bright-squeezed-vacuum source: parametric gain, relative mode intensities
// and pre-splitter transmissions of the two arms. mode_weights are normalized
// on construction; per-mode brightness is lambda_k * sinh^2(G).
struct TwinBeamSpec {
  double gain = 1.0;
  std::vector<double> mode_weights = {1.0};
  double eta_signal_pre = 1.0;
  double eta_idler_pre = 1.0;

  TwinBeamSpec() = default;

  TwinBeamSpec(double g, std::vector<double> weights, double eta_s = 1.0, double eta_i = 1.0)
      : gain(g), mode_weights(std::move(weights)), eta_signal_pre(eta_s), eta_idler_pre(eta_i) {
    if (!(gain > 0.0)) throw std::domain_error("TwinBeamSpec: gain must be > 0");
    if (mode_weights.empty()) throw std::domain_error("TwinBeamSpec: no mode weights");
    double sum = 0.0;
    for (double w : mode_weights) {
      if (w < 0.0) throw std::domain_error("TwinBeamSpec: negative mode weight");
      sum += w;
    }
    if (sum <= 0.0) throw std::domain_error("TwinBeamSpec: zero mode weights");
    for (double& w : mode_weights) w /= sum;
    if (!(eta_signal_pre >= 0.0 && eta_signal_pre <= 1.0) ||
        !(eta_idler_pre >= 0.0 && eta_idler_pre <= 1.0)) {
      throw std::domain_error("TwinBeamSpec: pre-splitter efficiencies must lie in [0, 1]");
    }
  }

  std::size_t mode_count() const { return mode_weights.size(); }

  // Per-mode gain solving sinh^2(G_k) = lambda_k sinh^2(G).
  double mode_gain(std::size_t k) const {
    const double s2 = mode_weights[k] * std::sinh(gain) * std::sinh(gain);
    return std::asinh(std::sqrt(s2));
  }

  double mean_photons_per_arm() const { return std::sinh(gain) * std::sinh(gain); }
};

// N_mode = sinh^2(G).
inline double mean_photons_per_mode(double gain) {
  if (gain < 0.0) throw std::domain_error("mean_photons_per_mode: G must be >= 0");
  const double s = std::sinh(gain);
  return s * s;
}

// Thermal Fock weights |c_n|^2 = tanh^(2n)(G) / cosh^2(G) = (1-q) q^n with
// q = tanh^2(G), truncated once the (exactly geometric) tail drops below
// tail_epsilon. total_weight stores 1 - tail.
inline PhotonDistribution fock_weights(double gain, double tail_epsilon,
                                       long long hard_cap = 1'000'000) {
  if (!(gain > 0.0)) throw std::domain_error("fock_weights: G must be > 0");
  if (!(tail_epsilon > 0.0 && tail_epsilon < 1.0)) {
    throw std::domain_error("fock_weights: tail_epsilon must lie in (0, 1)");
  }
  const double t = std::tanh(gain);
  const double q = t * t;
  // tail after n_max is q^(n_max + 1)
  const long long n_max =
      std::max<long long>(0, static_cast<long long>(std::ceil(std::log(tail_epsilon) / std::log(q))) - 1);
  if (n_max > hard_cap) {
    throw ResourceError("fock_weights: required cutoff exceeds the hard cap; use the Gaussian path");
  }
  PhotonDistribution d;
  d.support_offset = 0;
  d.weights.resize(static_cast<std::size_t>(n_max + 1));
  const double head = 1.0 - q;
  double w = head;
  for (long long n = 0; n <= n_max; ++n) {
    d.weights[static_cast<std::size_t>(n)] = w;
    w *= q;
  }
  // The deficit is exactly the geometric tail q^(n_max+1); store 1 - tail
  // analytically instead of the rounded float sum.
  d.total_weight = 1.0 - std::pow(q, static_cast<double>(n_max + 1));
  return d;
}

// m = 1 / (g2 - 1) for thermal single-mode statistics g2_0 = 2.
inline double g2_to_modes(double g2) {
  if (!(g2 > 1.0)) throw std::domain_error("g2_to_modes: g2 must exceed 1");
  return 1.0 / (g2 - 1.0);
}

// g2 = 1 + 1/m.
inline double modes_to_g2(double m) {
  if (!(m >= 1.0)) throw std::domain_error("modes_to_g2: m must be >= 1");
  return 1.0 + 1.0 / m;
}

// (sum lambda)^2 / sum lambda^2.
inline double effective_mode_count(const std::vector<double>& weights) {
  double sum = 0.0, sum_sq = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw std::domain_error("effective_mode_count: negative weight");
    sum += w;
    sum_sq += w * w;
  }
  if (sum_sq <= 0.0) throw std::domain_error("effective_mode_count: all-zero weights");
  return sum * sum / sum_sq;
}

// Weight profile realizing a target effective mode count: floor(m) equal
// dominant modes plus one weaker mode. Integer targets return equal weights.
inline std::vector<double> weights_for_effective_m(double m) {
  if (!(m >= 1.0)) throw std::domain_error("weights_for_effective_m: m must be >= 1");
  const long long k = static_cast<long long>(std::floor(m + 1e-12));
  std::vector<double> w(static_cast<std::size_t>(k), 1.0);
  const double frac = m - static_cast<double>(k);
  if (frac > 1e-12) {
    // Solve (k + x)^2 / (k + x^2) = m for the weak-mode weight x in (0, 1).
    const double kk = static_cast<double>(k);
    const double disc = kk * kk - (m - 1.0) * (m - kk) * kk;
    const double x = (kk - std::sqrt(disc)) / (m - 1.0);
    w.push_back(x);
  }
  double sum = 0.0;
  for (double v : w) sum += v;
  for (double& v : w) v /= sum;
  return w;
}

// Quadrature covariance of the two-mode squeezed vacuum in the order
// (x_s, p_s, x_i, p_i), hbar = 1 and vacuum variance 1/2: diagonal
// cosh(2G)/2, x-x cross +sinh(2G)/2, p-p cross -sinh(2G)/2.
using QuadCovariance = std::array<std::array<double, 4>, 4>;

inline QuadCovariance wigner_covariance(double gain) {
  if (gain < 0.0) throw std::domain_error("wigner_covariance: G must be >= 0");
  const double c = 0.5 * std::cosh(2.0 * gain);
  const double s = 0.5 * std::sinh(2.0 * gain);
  QuadCovariance cov{};
  cov[0][0] = cov[1][1] = cov[2][2] = cov[3][3] = c;
  cov[0][2] = cov[2][0] = s;
  cov[1][3] = cov[3][1] = -s;
  return cov;
}

// Result of fitting N = N0 sinh^2(kappa sqrt(P)).
struct GainFit {
  double n0 = 0.0;
  double kappa = 0.0;
  double residual = 0.0;

  double gain_at(double power_mw) const { return kappa * std::sqrt(power_mw); }
};

// Least-squares fit of the gain curve in log space (ln N vs sqrt(P)),
// Gauss-Newton with a coarse grid initialization for kappa.
inline GainFit fit_gain(const std::vector<std::pair<double, double>>& points,
                        int max_iterations = 200) {
  if (points.size() < 3) throw std::domain_error("fit_gain: need at least 3 points");
  std::vector<double> sqrt_p, log_n;
  sqrt_p.reserve(points.size());
  log_n.reserve(points.size());
  for (const auto& [power, photons] : points) {
    if (!(power > 0.0)) throw std::domain_error("fit_gain: powers must be > 0");
    if (!(photons > 0.0)) {
      throw std::domain_error("fit_gain: photons must be > 0 for the log-space fit");
    }
    sqrt_p.push_back(std::sqrt(power));
    log_n.push_back(std::log(photons));
  }
  {
    const double first = sqrt_p.front();
    bool degenerate = true;
    for (double s : sqrt_p) {
      if (std::abs(s - first) > 1e-12 * (1.0 + first)) {
        degenerate = false;
        break;
      }
    }
    if (degenerate) throw std::domain_error("fit_gain: all powers equal, fit under-determined");
  }

  // ln sinh(x), stable for large x.
  auto log_sinh = [](double x) {
    if (x > 20.0) return x - std::numbers::ln2 + std::log1p(-std::exp(-2.0 * x));
    return std::log(std::sinh(x));
  };
  auto coth = [](double x) {
    if (x > 20.0) return 1.0;
    return std::cosh(x) / std::sinh(x);
  };

  auto sse_for_kappa = [&](double kappa, double& best_a) {
    double mean_r = 0.0;
    for (std::size_t i = 0; i < sqrt_p.size(); ++i) {
      mean_r += log_n[i] - 2.0 * log_sinh(kappa * sqrt_p[i]);
    }
    best_a = mean_r / static_cast<double>(sqrt_p.size());
    double sse = 0.0;
    for (std::size_t i = 0; i < sqrt_p.size(); ++i) {
      const double r = log_n[i] - best_a - 2.0 * log_sinh(kappa * sqrt_p[i]);
      sse += r * r;
    }
    return sse;
  };

  // Coarse log-spaced grid over kappa; the model is monotone in kappa so a
  // broad scan is enough to land in the right basin.
  double kappa = 0.0, log_n0 = 0.0, best_sse = std::numeric_limits<double>::infinity();
  const double s_max = *std::max_element(sqrt_p.begin(), sqrt_p.end());
  for (int i = 0; i <= 200; ++i) {
    const double k = std::exp(std::log(1e-3 / s_max) +
                              (std::log(100.0 / s_max) - std::log(1e-3 / s_max)) * i / 200.0);
    double a = 0.0;
    const double sse = sse_for_kappa(k, a);
    if (sse < best_sse) {
      best_sse = sse;
      kappa = k;
      log_n0 = a;
    }
  }

  // Gauss-Newton on (log N0, kappa).
  bool converged = false;
  for (int iter = 0; iter < max_iterations; ++iter) {
    double jtj00 = 0.0, jtj01 = 0.0, jtj11 = 0.0, jtr0 = 0.0, jtr1 = 0.0;
    for (std::size_t i = 0; i < sqrt_p.size(); ++i) {
      const double x = kappa * sqrt_p[i];
      const double r = log_n[i] - log_n0 - 2.0 * log_sinh(x);
      const double ja = 1.0;
      const double jk = 2.0 * sqrt_p[i] * coth(x);
      jtj00 += ja * ja;
      jtj01 += ja * jk;
      jtj11 += jk * jk;
      jtr0 += ja * r;
      jtr1 += jk * r;
    }
    const double det = jtj00 * jtj11 - jtj01 * jtj01;
    if (std::abs(det) < 1e-30) {
      throw ConvergenceError("fit_gain: singular normal equations");
    }
    const double da = (jtj11 * jtr0 - jtj01 * jtr1) / det;
    double dk = (jtj00 * jtr1 - jtj01 * jtr0) / det;
    // Keep kappa positive; halve steps that would overshoot.
    while (kappa + dk <= 0.0) dk *= 0.5;
    log_n0 += da;
    kappa += dk;
    if (std::abs(da) < 1e-13 && std::abs(dk) < 1e-13 * (1.0 + kappa)) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw ConvergenceError("fit_gain: Gauss-Newton did not converge");
  }

  GainFit fit;
  fit.n0 = std::exp(log_n0);
  fit.kappa = kappa;
  double sse = 0.0;
  for (std::size_t i = 0; i < sqrt_p.size(); ++i) {
    const double r = log_n[i] - log_n0 - 2.0 * log_sinh(kappa * sqrt_p[i]);
    sse += r * r;
  }
  fit.residual = std::sqrt(sse / static_cast<double>(sqrt_p.size()));
  return fit;
}

}  // namespace twinbeam
