#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "twinbeam/beam_splitter.hpp"
#include "twinbeam/detection.hpp"
#include "twinbeam/distribution.hpp"
#include "twinbeam/errors.hpp"
#include "twinbeam/fock_oracle.hpp"
#include "twinbeam/parallel.hpp"
#include "twinbeam/rng.hpp"
#include "twinbeam/twin_beam.hpp"

namespace twinbeam {

// 2-D discrete convolution of sparse joint tables, optionally truncated to
// m1 + m2 <= max_total (truncated cells are exact; removed mass goes to the
// tail). Truncation tails combine as for independent sources.
inline JointCountDistribution convolve2d(const JointCountDistribution& a,
                                         const JointCountDistribution& b,
                                         long long max_total = -1) {
  JointCountDistribution out;
  const double ta = a.total();
  const double tb = b.total();
  out.truncation_tail = a.truncation_tail * (tb + b.truncation_tail) + b.truncation_tail * ta;
  for (const auto& [ka, pa] : a.entries) {
    for (const auto& [kb, pb] : b.entries) {
      const long long m1 = ka.m1 + kb.m1;
      const long long m2 = ka.m2 + kb.m2;
      const double p = pa * pb;
      if (max_total >= 0 && m1 + m2 > max_total) {
        out.truncation_tail += p;
      } else {
        out.add(m1, m2, p);
      }
    }
  }
  return out;
}

// Scenario record carried with every sample batch so a run can be replayed
// bit-exactly from its sidecar.
struct ScenarioDescriptor {
  std::string source;  // "bsv", "thermal", "coherent"
  double gain = 0.0;
  double mean_photons = 0.0;
  std::vector<double> mode_weights;
  double tau = 0.5;
  double phi_tau = 0.0;
  double phi_rho = 0.0;
  double eta = 1.0;
  double eta_signal_pre = 1.0;
  double eta_idler_pre = 1.0;
  std::string phase_mode;  // classical sources: "uniform" or "fixed:<radians>"
  double visibility = 1.0;
  double effective_modes = 1.0;
  std::string path;  // "exact", "wigner", "poisson"
  double electronic_noise_std = 0.0;
};

// Per-pulse record of detected count pairs. Identical (seed, scenario)
// reproduce identical pairs bit-exactly, independent of worker count.
struct SampleBatch {
  std::vector<std::pair<long long, long long>> pairs;
  std::uint64_t seed = 0;
  long long trials = 0;
  ScenarioDescriptor scenario;

  double mean_m1() const {
    long double acc = 0.0L;
    for (const auto& [a, b] : pairs) acc += a;
    return static_cast<double>(acc / static_cast<long double>(pairs.size()));
  }
  double mean_m2() const {
    long double acc = 0.0L;
    for (const auto& [a, b] : pairs) acc += b;
    return static_cast<double>(acc / static_cast<long double>(pairs.size()));
  }
  double mean_sum() const { return mean_m1() + mean_m2(); }
};

inline DeltaHistogram delta_histogram(const SampleBatch& batch, long long bins = 64,
                                      long long min_total = 1) {
  if (batch.pairs.empty()) throw std::domain_error("delta_histogram: empty sample batch");
  DeltaHistogram h = detail::make_delta_histogram(bins, min_total);
  const double w = 1.0 / static_cast<double>(batch.pairs.size());
  for (const auto& [m1, m2] : batch.pairs) detail::deposit_delta(h, m1, m2, w);
  return h;
}

inline double noise_reduction_factor(const SampleBatch& batch) {
  if (batch.pairs.empty()) throw std::domain_error("noise_reduction_factor: empty batch");
  long double sum_d = 0.0L, sum_d2 = 0.0L, sum_t = 0.0L;
  for (const auto& [m1, m2] : batch.pairs) {
    const long double d = static_cast<long double>(m1 - m2);
    sum_d += d;
    sum_d2 += d * d;
    sum_t += static_cast<long double>(m1 + m2);
  }
  const long double n = static_cast<long double>(batch.pairs.size());
  const long double mean_d = sum_d / n;
  const long double var_d = sum_d2 / n - mean_d * mean_d;
  const long double mean_t = sum_t / n;
  if (mean_t <= 0.0L) throw std::domain_error("noise_reduction_factor: zero mean total");
  return static_cast<double>(var_d / mean_t);
}

// Normally-ordered g2 of one detector arm: <m(m-1)> / <m>^2. Invariant under
// binomial loss, so it estimates the photon-number g2 directly.
inline double g2_of_marginal(const SampleBatch& batch, int arm) {
  long double sum_m = 0.0L, sum_mm1 = 0.0L;
  for (const auto& [m1, m2] : batch.pairs) {
    const long double m = static_cast<long double>(arm == 0 ? m1 : m2);
    sum_m += m;
    sum_mm1 += m * (m - 1.0L);
  }
  const long double n = static_cast<long double>(batch.pairs.size());
  const long double mean = sum_m / n;
  if (mean <= 0.0L) throw std::domain_error("g2_of_marginal: zero mean");
  return static_cast<double>((sum_mm1 / n) / (mean * mean));
}

enum class SamplerPath { Auto, Exact, Wigner };

// Intensity-to-count conventions for the Wigner path. SubtractVacuum removes
// the symmetric-ordering offset per mode before the Poisson draw; Raw keeps
// it, which biases each arm by exactly eta * m/2 counts and is kept around so
// the bias of either convention can be measured against the other.
enum class CountConversion { SubtractVacuum, Raw };

struct SamplerOptions {
  SamplerPath path = SamplerPath::Auto;
  CountConversion conversion = CountConversion::SubtractVacuum;
  double electronic_noise_std = 0.0;
  int threads = 1;
  // Exact Fock sampling is used below this per-mode mean photon number.
  double exact_mean_cap = 50.0;
  double exact_tail_epsilon = 1e-12;
};

namespace detail {

// Output-splitting probability row for an (n_s, n_i) input pair, routed to
// whichever evaluation stays numerically sound: the Gegenbauer form for equal
// inputs, the combinatorial sum while the total is small (or one arm is
// nearly empty, where it has no cancellation), and the dense unitary block
// beyond that.
inline PhotonDistribution stable_bs_probability_row(long long n_s, long long n_i,
                                                    const BeamSplitterSpec& bs) {
  if (n_s == n_i) return bs_output_distribution(n_s, bs.tau);
  if (bs.tau == 0.0 || bs.tau == 1.0) return general_bs_probability_row(n_s, n_i, bs);
  const long long total = n_s + n_i;
  if (total <= 80 || std::min(n_s, n_i) <= 2) {
    return general_bs_probability_row(n_s, n_i, bs);
  }
  FockOracleState st = FockOracleState::from_fock(n_s, n_i);
  st.apply_beam_splitter(bs);
  PhotonDistribution row;
  row.support_offset = 0;
  row.weights.resize(static_cast<std::size_t>(total + 1));
  for (long long N = 0; N <= total; ++N) {
    row.weights[static_cast<std::size_t>(N)] = std::norm(st.amplitude(N, total - N));
  }
  row.recompute_total();
  return row;
}

// Cumulative output-splitting rows keyed by the input pair, built lazily per
// thread. Values depend only on (n_s, n_i, bs), so lazily recomputing them in
// different threads cannot change sampled results.
class RowCache {
 public:
  explicit RowCache(const BeamSplitterSpec& bs) : bs_(bs) {}

  const std::vector<double>& cumulative(long long n_s, long long n_i) {
    const std::uint64_t key =
        (static_cast<std::uint64_t>(n_s) << 32) | static_cast<std::uint64_t>(n_i);
    auto it = rows_.find(key);
    if (it != rows_.end()) return it->second;
    const PhotonDistribution row = stable_bs_probability_row(n_s, n_i, bs_);
    std::vector<double> cum(row.weights.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < row.weights.size(); ++i) {
      acc += row.weights[i];
      cum[i] = acc;
    }
    return rows_.emplace(key, std::move(cum)).first->second;
  }

  long long sample_output(long long n_s, long long n_i, double u) {
    if (n_s + n_i == 0) return 0;
    const auto& cum = cumulative(n_s, n_i);
    const double target = u * cum.back();
    const auto it = std::lower_bound(cum.begin(), cum.end(), target);
    return static_cast<long long>(it - cum.begin());
  }

 private:
  BeamSplitterSpec bs_;
  std::unordered_map<std::uint64_t, std::vector<double>> rows_;
};

inline long long add_electronic_noise(long long counts, double std_dev, TrialRng& rng) {
  if (std_dev <= 0.0) return counts;
  const double noisy = static_cast<double>(counts) + rng.normal(0.0, std_dev);
  return std::max<long long>(0, std::llround(noisy));
}

}  // namespace detail

// Monte Carlo sampler for twin-beam scenarios.
//
// Exact path (low gain): per mode, draw the twin photon number from the
// thermal weights, thin each arm by its pre-splitter transmission, split with
// the exact output rows, then apply binomial detection. This reproduces the
// full quantum joint count statistics, parity structure included.
//
// Wigner path (bright regime): per mode, draw quadratures from the two-mode
// squeezed-vacuum covariance, attenuate with vacuum noise, mix the complex
// amplitudes through the splitter matrix and convert intensities to counts
// with Poisson draws. Symmetric-ordering corrections are O(1) counts per
// mode, negligible against the ~1e9 detected photons it is used for.
inline SampleBatch gaussian_sample_bsv(const TwinBeamSpec& spec, const BeamSplitterSpec& bs,
                                       double eta, long long trials, std::uint64_t seed,
                                       const SamplerOptions& opt = {}) {
  if (trials < 1) throw std::domain_error("gaussian_sample_bsv: trials must be >= 1");
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw std::domain_error("gaussian_sample_bsv: eta must lie in [0, 1]");
  }

  const std::size_t modes = spec.mode_count();
  std::vector<double> mode_means(modes);
  double max_mean = 0.0;
  for (std::size_t k = 0; k < modes; ++k) {
    mode_means[k] = spec.mode_weights[k] * spec.mean_photons_per_arm();
    max_mean = std::max(max_mean, mode_means[k]);
  }

  bool use_exact = false;
  switch (opt.path) {
    case SamplerPath::Exact:
      use_exact = true;
      break;
    case SamplerPath::Wigner:
      use_exact = false;
      break;
    case SamplerPath::Auto:
      use_exact = max_mean <= opt.exact_mean_cap;
      break;
  }

  SampleBatch batch;
  batch.seed = seed;
  batch.trials = trials;
  batch.pairs.resize(static_cast<std::size_t>(trials));
  batch.scenario.source = "bsv";
  batch.scenario.gain = spec.gain;
  batch.scenario.mode_weights = spec.mode_weights;
  batch.scenario.tau = bs.tau;
  batch.scenario.phi_tau = bs.phi_tau;
  batch.scenario.phi_rho = bs.phi_rho;
  batch.scenario.eta = eta;
  batch.scenario.eta_signal_pre = spec.eta_signal_pre;
  batch.scenario.eta_idler_pre = spec.eta_idler_pre;
  batch.scenario.effective_modes = effective_mode_count(spec.mode_weights);
  batch.scenario.path = use_exact ? "exact" : "wigner";
  batch.scenario.electronic_noise_std = opt.electronic_noise_std;

  const std::uint64_t detection_stream = modes;

  if (use_exact) {
    parallel_for_chunks(trials, opt.threads, [&](long long begin, long long end) {
      detail::RowCache rows(bs);
      for (long long t = begin; t < end; ++t) {
        long long photons_1 = 0, photons_2 = 0;
        for (std::size_t k = 0; k < modes; ++k) {
          TrialRng rng(seed, static_cast<std::uint64_t>(t), k);
          const long long n = rng.bose_einstein(mode_means[k]);
          const long long n_s =
              spec.eta_signal_pre >= 1.0 ? n : rng.binomial(n, spec.eta_signal_pre);
          const long long n_i =
              spec.eta_idler_pre >= 1.0 ? n : rng.binomial(n, spec.eta_idler_pre);
          const long long out1 = rows.sample_output(n_s, n_i, rng.uniform01());
          photons_1 += out1;
          photons_2 += n_s + n_i - out1;
        }
        TrialRng det(seed, static_cast<std::uint64_t>(t), detection_stream);
        long long m1 = eta >= 1.0 ? photons_1 : det.binomial(photons_1, eta);
        long long m2 = eta >= 1.0 ? photons_2 : det.binomial(photons_2, eta);
        m1 = detail::add_electronic_noise(m1, opt.electronic_noise_std, det);
        m2 = detail::add_electronic_noise(m2, opt.electronic_noise_std, det);
        batch.pairs[static_cast<std::size_t>(t)] = {m1, m2};
      }
    });
    return batch;
  }

  // Wigner path.
  std::vector<double> sig_plus(modes), sig_minus(modes);
  for (std::size_t k = 0; k < modes; ++k) {
    const double g = spec.mode_gain(k);
    sig_plus[k] = std::sqrt(0.5) * std::exp(g);   // std of (x_s + x_i)/sqrt(2)
    sig_minus[k] = std::sqrt(0.5) * std::exp(-g);
  }
  const std::complex<double> m11 = std::polar(std::sqrt(bs.tau), -bs.phi_tau);
  const std::complex<double> m12 = std::polar(std::sqrt(bs.rho()), -bs.phi_rho);
  const std::complex<double> m21 = -std::polar(std::sqrt(bs.rho()), bs.phi_rho);
  const std::complex<double> m22 = std::polar(std::sqrt(bs.tau), bs.phi_tau);

  parallel_for_chunks(trials, opt.threads, [&](long long begin, long long end) {
    for (long long t = begin; t < end; ++t) {
      double intensity_1 = 0.0, intensity_2 = 0.0;
      for (std::size_t k = 0; k < modes; ++k) {
        TrialRng rng(seed, static_cast<std::uint64_t>(t), k);
        const double up = rng.normal(0.0, sig_plus[k]);
        const double um = rng.normal(0.0, sig_minus[k]);
        const double vp = rng.normal(0.0, sig_plus[k]);
        const double vm = rng.normal(0.0, sig_minus[k]);
        const double inv_sqrt2 = std::numbers::sqrt2 / 2.0;
        double xs = (up + um) * inv_sqrt2;
        double xi = (up - um) * inv_sqrt2;
        double ps = (vm - vp) * inv_sqrt2;
        double pi = (vm + vp) * inv_sqrt2;
        std::complex<double> alpha_s(xs * inv_sqrt2, ps * inv_sqrt2);
        std::complex<double> alpha_i(xi * inv_sqrt2, pi * inv_sqrt2);
        if (spec.eta_signal_pre < 1.0) {
          const double keep = std::sqrt(spec.eta_signal_pre);
          const double vac = std::sqrt((1.0 - spec.eta_signal_pre) * 0.5);
          alpha_s = keep * alpha_s +
                    std::complex<double>(rng.normal(0.0, vac), rng.normal(0.0, vac));
        }
        if (spec.eta_idler_pre < 1.0) {
          const double keep = std::sqrt(spec.eta_idler_pre);
          const double vac = std::sqrt((1.0 - spec.eta_idler_pre) * 0.5);
          alpha_i = keep * alpha_i +
                    std::complex<double>(rng.normal(0.0, vac), rng.normal(0.0, vac));
        }
        const std::complex<double> beta_1 = m11 * alpha_s + m12 * alpha_i;
        const std::complex<double> beta_2 = m21 * alpha_s + m22 * alpha_i;
        if (opt.conversion == CountConversion::SubtractVacuum) {
          intensity_1 += std::max(0.0, std::norm(beta_1) - 0.5);
          intensity_2 += std::max(0.0, std::norm(beta_2) - 0.5);
        } else {
          intensity_1 += std::norm(beta_1);
          intensity_2 += std::norm(beta_2);
        }
      }
      TrialRng det(seed, static_cast<std::uint64_t>(t), detection_stream);
      long long m1 = det.poisson(eta * intensity_1);
      long long m2 = det.poisson(eta * intensity_2);
      m1 = detail::add_electronic_noise(m1, opt.electronic_noise_std, det);
      m2 = detail::add_electronic_noise(m2, opt.electronic_noise_std, det);
      batch.pairs[static_cast<std::size_t>(t)] = {m1, m2};
    }
  });
  return batch;
}

// Exact joint table for one mode pair with independent pre-splitter losses on
// the arms: thin the twin Fock component to (n_s, n_i), mix with the general
// splitting rows, then apply detection loss. Combinations below prune_epsilon
// of the component weight are dropped into the tail.
inline JointCountDistribution unequal_beam_joint(const TwinBeamSpec& spec,
                                                 const BeamSplitterSpec& bs, double eta,
                                                 double epsilon = 1e-9,
                                                 long long max_total = -1) {
  if (spec.mode_count() != 1) {
    throw std::domain_error("unequal_beam_joint: expects a single-mode spec");
  }
  PhotonDistribution weights = fock_weights(spec.gain, epsilon, 100'000);
  if (max_total >= 0 && eta > 0.0 && eta < 1.0) {
    // Detected totals inside the cap draw on components up to n ~ total/(2
    // eta); keep the weight list long enough to cover that window even when
    // the raw tail is already below epsilon.
    const long long n_window =
        static_cast<long long>(1.5 * static_cast<double>(max_total) / eta) + 32;
    if (weights.max_count() < n_window) {
      const double q = std::tanh(spec.gain) * std::tanh(spec.gain);
      const long long old = weights.max_count();
      weights.weights.resize(static_cast<std::size_t>(n_window + 1), 0.0);
      double w = weights.weights[static_cast<std::size_t>(old)];
      for (long long n = old + 1; n <= n_window; ++n) {
        w *= q;
        weights.weights[static_cast<std::size_t>(n)] = w;
      }
      weights.recompute_total();
    }
  }
  const long long n_max = weights.max_count();
  const bool has_pre_loss = spec.eta_signal_pre < 1.0 || spec.eta_idler_pre < 1.0;
  double budget;
  if (has_pre_loss) {
    budget = std::pow(static_cast<double>(n_max), 4.0) / 4.0;
  } else if (max_total >= 0) {
    budget = std::pow(static_cast<double>(n_max), 2.0) * (1.0 + static_cast<double>(max_total));
  } else {
    budget = std::pow(static_cast<double>(n_max), 3.0);
  }
  detail::check_exact_budget(budget, "unequal_beam_joint");

  const double prune_epsilon = epsilon * 1e-3;
  detail::LosslessJoint lossless;
  lossless.ensure(2 * n_max, 2 * n_max);
  double covered = 0.0;

  // Per-arm thinning kernels, cached per n.
  auto thin_kernel = [](long long n, double keep) {
    std::vector<double> k(static_cast<std::size_t>(n + 1));
    if (keep >= 1.0) {
      k.assign(static_cast<std::size_t>(n + 1), 0.0);
      k[static_cast<std::size_t>(n)] = 1.0;
      return k;
    }
    if (keep <= 0.0) {
      k.assign(static_cast<std::size_t>(n + 1), 0.0);
      k[0] = 1.0;
      return k;
    }
    const double le = std::log(keep);
    const double l1e = std::log(1.0 - keep);
    for (long long j = 0; j <= n; ++j) {
      k[static_cast<std::size_t>(j)] = std::exp(
          log_binomial(n, j) + static_cast<double>(j) * le + static_cast<double>(n - j) * l1e);
    }
    return k;
  };

  detail::RowCache rows(bs);
  for (long long n = 0; n <= n_max; ++n) {
    const double w = weights.prob_at(n);
    if (w == 0.0) continue;
    covered += w;
    const std::vector<double> ks = thin_kernel(n, spec.eta_signal_pre);
    const std::vector<double> ki = thin_kernel(n, spec.eta_idler_pre);
    for (long long n_s = 0; n_s <= n; ++n_s) {
      const double ws = ks[static_cast<std::size_t>(n_s)];
      if (ws == 0.0) continue;
      for (long long n_i = 0; n_i <= n; ++n_i) {
        const double combo = w * ws * ki[static_cast<std::size_t>(n_i)];
        if (combo < prune_epsilon * w) {
          lossless.tail += combo;
          continue;
        }
        const auto& cum = rows.cumulative(n_s, n_i);
        double prev = 0.0;
        for (long long N = 0; N <= n_s + n_i; ++N) {
          const double p = cum[static_cast<std::size_t>(N)] - prev;
          prev = cum[static_cast<std::size_t>(N)];
          if (p <= 0.0) continue;
          lossless.p[static_cast<std::size_t>(N)][static_cast<std::size_t>(n_s + n_i - N)] +=
              combo * p;
        }
      }
    }
  }
  lossless.tail += std::max(0.0, weights.total_weight - covered) +
                   std::max(0.0, 1.0 - weights.total_weight);
  return detail::detect_lossless(lossless, eta, max_total);
}

// m-fold composition of identical mode pairs: the joint table of one mode at
// gain G_k (equal weights) convolved m times. Losses are applied per mode
// first; binomial detection commutes with summing independent modes.
inline JointCountDistribution multimode_joint_distribution(const TwinBeamSpec& spec,
                                                           const BeamSplitterSpec& bs,
                                                           double eta, double epsilon = 1e-9,
                                                           long long max_total = -1) {
  const std::size_t m = spec.mode_count();
  for (double w : spec.mode_weights) {
    if (std::abs(w - spec.mode_weights.front()) > 1e-9) {
      throw std::domain_error("multimode_joint_distribution: requires equal mode weights");
    }
  }
  TwinBeamSpec single(spec.mode_gain(0), {1.0}, spec.eta_signal_pre, spec.eta_idler_pre);
  const double per_mode_epsilon = epsilon / static_cast<double>(m);
  JointCountDistribution mode_table =
      unequal_beam_joint(single, bs, eta, per_mode_epsilon, max_total);
  JointCountDistribution out = mode_table;
  for (std::size_t k = 1; k < m; ++k) {
    out = convolve2d(out, mode_table, max_total);
  }
  return out;
}

}  // namespace twinbeam
