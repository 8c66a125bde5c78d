#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "twinbeam/beam_splitter.hpp"
#include "twinbeam/distribution.hpp"
#include "twinbeam/errors.hpp"
#include "twinbeam/log_arith.hpp"
#include "twinbeam/parallel.hpp"

namespace twinbeam {

struct CountPair {
  long long m1 = 0;
  long long m2 = 0;
  auto operator<=>(const CountPair&) const = default;
};

// Sparse joint probability table over detected count pairs. Entries plus
// truncation_tail account for all probability mass.
struct JointCountDistribution {
  std::map<CountPair, double> entries;
  double truncation_tail = 0.0;

  void add(long long m1, long long m2, double p) {
    if (p != 0.0) entries[{m1, m2}] += p;
  }

  double prob_at(long long m1, long long m2) const {
    auto it = entries.find({m1, m2});
    return it == entries.end() ? 0.0 : it->second;
  }

  double total() const {
    double acc = 0.0;
    for (const auto& [k, p] : entries) acc += p;
    return acc;
  }

  PhotonDistribution marginal(int axis) const {
    long long max_m = 0;
    for (const auto& [k, p] : entries) max_m = std::max(max_m, axis == 0 ? k.m1 : k.m2);
    PhotonDistribution d;
    d.support_offset = 0;
    d.weights.assign(static_cast<std::size_t>(max_m + 1), 0.0);
    for (const auto& [k, p] : entries) {
      d.weights[static_cast<std::size_t>(axis == 0 ? k.m1 : k.m2)] += p;
    }
    d.recompute_total();
    return d;
  }

  JointCountDistribution normalized() const {
    const double t = total();
    if (t <= 0.0) {
      throw std::domain_error("JointCountDistribution: cannot normalize zero mass");
    }
    JointCountDistribution out;
    for (const auto& [k, p] : entries) out.entries[k] = p / t;
    out.truncation_tail = 0.0;
    return out;
  }
};

// Conditional distribution of m1 given m1 + m2 = sigma, normalized within the
// slice. Returns zero-mass distribution if the slice is empty.
inline PhotonDistribution sigma_slice(const JointCountDistribution& jcd, long long sigma) {
  PhotonDistribution d;
  d.support_offset = 0;
  d.weights.assign(static_cast<std::size_t>(sigma + 1), 0.0);
  for (const auto& [k, p] : jcd.entries) {
    if (k.m1 + k.m2 == sigma) d.weights[static_cast<std::size_t>(k.m1)] += p;
  }
  d.recompute_total();
  if (d.total_weight > 0.0) d = d.normalized();
  return d;
}

// Binomial loss channel: P'(k) = sum_n P(n) C(n,k) eta^k (1-eta)^(n-k).
inline PhotonDistribution apply_binomial_loss(const PhotonDistribution& dist, double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw std::domain_error("apply_binomial_loss: eta must lie in [0, 1]");
  }
  if (dist.empty()) return dist;
  if (eta == 1.0) return dist;
  if (eta == 0.0) return PhotonDistribution::point(0, dist.total_weight);
  const long long n_max = dist.max_count();
  PhotonDistribution out;
  out.support_offset = 0;
  out.weights.assign(static_cast<std::size_t>(n_max + 1), 0.0);
  const double le = std::log(eta);
  const double l1e = std::log(1.0 - eta);
  for (long long n = dist.min_count(); n <= n_max; ++n) {
    const double w = dist.prob_at(n);
    if (w == 0.0) continue;
    for (long long k = 0; k <= n; ++k) {
      out.weights[static_cast<std::size_t>(k)] +=
          w * std::exp(log_binomial(n, k) + static_cast<double>(k) * le +
                       static_cast<double>(n - k) * l1e);
    }
  }
  out.recompute_total();
  return out;
}

namespace detail {

// Streaming per-port binomial detection. Callers feed exact photon pairs
// (n1, n2, p); port-1 loss is folded immediately into a (m1 x n2) stage with
// lazily cached kernel rows, port-2 loss at finish(). Mass cut by the
// optional m1 + m2 <= max_total cap, plus anything fed to add_tail, ends up
// in the result's truncation_tail. Keeping only the stage in memory lets the
// capped path handle photon numbers in the thousands.
class DetectionFolder {
 public:
  DetectionFolder(double eta, long long n1_max, long long n2_max, long long max_total)
      : eta_(eta), max_total_(max_total), n1_max_(n1_max), n2_max_(n2_max) {
    if (!(eta >= 0.0 && eta <= 1.0)) {
      throw std::domain_error("DetectionFolder: eta must lie in [0, 1]");
    }
    if (eta_ > 0.0 && eta_ < 1.0) {
      log_eta_ = std::log(eta_);
      log_one_minus_eta_ = std::log(1.0 - eta_);
      m1_cap_ = max_total_ >= 0 ? std::min(n1_max_, max_total_) : n1_max_;
      stage_.assign(static_cast<std::size_t>(m1_cap_ + 1),
                    std::vector<double>(static_cast<std::size_t>(n2_max_ + 1), 0.0));
      const long long kernel_keys = std::max(n1_max_, n2_max_) + 1;
      kernels_.resize(static_cast<std::size_t>(kernel_keys));
      kept_.assign(static_cast<std::size_t>(kernel_keys), -1.0);
    }
  }

  void add(long long n1, long long n2, double p) {
    if (p == 0.0) return;
    if (eta_ == 0.0) {
      vacuum_ += p;
      return;
    }
    if (eta_ == 1.0) {
      if (max_total_ >= 0 && n1 + n2 > max_total_) {
        tail_ += p;
      } else {
        out_.add(n1, n2, p);
      }
      return;
    }
    const std::vector<double>& kernel = kernel_row(n1);
    for (long long k = 0; k < static_cast<long long>(kernel.size()); ++k) {
      stage_[static_cast<std::size_t>(k)][static_cast<std::size_t>(n2)] +=
          p * kernel[static_cast<std::size_t>(k)];
    }
    tail_ += p * (1.0 - kept_[static_cast<std::size_t>(n1)]);
  }

  void add_tail(double p) { tail_ += p; }

  JointCountDistribution finish() {
    if (eta_ == 0.0) {
      out_.add(0, 0, vacuum_ + tail_);
      out_.truncation_tail = 0.0;
      return std::move(out_);
    }
    if (eta_ > 0.0 && eta_ < 1.0) {
      for (long long k = 0; k <= m1_cap_; ++k) {
        const auto& row = stage_[static_cast<std::size_t>(k)];
        const long long m2_cap = max_total_ >= 0 ? max_total_ - k : n2_max_;
        for (long long b = 0; b <= n2_max_; ++b) {
          const double v = row[static_cast<std::size_t>(b)];
          if (v == 0.0) continue;
          const std::vector<double>& kernel = kernel_row(b);
          const long long l_hi = std::min<long long>(
              m2_cap, static_cast<long long>(kernel.size()) - 1);
          double kept = 0.0;
          for (long long l = 0; l <= l_hi; ++l) {
            const double w = v * kernel[static_cast<std::size_t>(l)];
            out_.add(k, l, w);
            kept += kernel[static_cast<std::size_t>(l)];
          }
          tail_ += v * std::max(0.0, 1.0 - kept);
        }
      }
    }
    out_.truncation_tail = tail_;
    return std::move(out_);
  }

 private:
  // Binomial thinning kernel for an exact count a, truncated at the count
  // cap; kept_[a] records the retained fraction.
  const std::vector<double>& kernel_row(long long a) {
    auto& row = kernels_[static_cast<std::size_t>(a)];
    if (kept_[static_cast<std::size_t>(a)] >= 0.0) return row;
    const long long k_hi = max_total_ >= 0 ? std::min(a, max_total_) : a;
    row.resize(static_cast<std::size_t>(k_hi + 1));
    double kept = 0.0;
    for (long long k = 0; k <= k_hi; ++k) {
      row[static_cast<std::size_t>(k)] =
          std::exp(log_binomial(a, k) + static_cast<double>(k) * log_eta_ +
                   static_cast<double>(a - k) * log_one_minus_eta_);
      kept += row[static_cast<std::size_t>(k)];
    }
    kept_[static_cast<std::size_t>(a)] = std::min(kept, 1.0);
    return row;
  }

  double eta_;
  long long max_total_;
  long long n1_max_;
  long long n2_max_;
  long long m1_cap_ = 0;
  double log_eta_ = 0.0;
  double log_one_minus_eta_ = 0.0;
  double tail_ = 0.0;
  double vacuum_ = 0.0;
  std::vector<std::vector<double>> stage_;
  std::vector<std::vector<double>> kernels_;
  std::vector<double> kept_;
  JointCountDistribution out_;
};

}  // namespace detail

// Single joint-event probability P(m1, m2) for twin-beam weights |c_n|^2 on a
// lossy splitter: sum over n >= ceil((m1+m2)/2) of
//   |c_n|^2 sum_N [R_N]^2 eta^(m1+m2) (1-eta)^(2n-m1-m2) C(N, m1) C(2n-N, m2).
// The n sum stops once the remaining weight tail cannot contribute more than
// tail_epsilon in absolute probability.
inline double povm_joint_probability(const PhotonDistribution& weights,
                                     const BeamSplitterSpec& bs, double eta, long long m1,
                                     long long m2, double tail_epsilon = 1e-12) {
  if (m1 < 0 || m2 < 0) throw std::domain_error("povm_joint_probability: counts must be >= 0");
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw std::domain_error("povm_joint_probability: eta must lie in [0, 1]");
  }
  if (eta == 0.0) return (m1 == 0 && m2 == 0) ? 1.0 : 0.0;

  const long long sigma = m1 + m2;
  const long long n_lo = (sigma + 1) / 2;
  double acc = 0.0;
  double remaining = weights.total_weight;
  for (long long n = weights.min_count(); n <= weights.max_count(); ++n) {
    const double w = weights.prob_at(n);
    if (n >= n_lo && w != 0.0) {
      const PhotonDistribution row = bs_output_distribution(n, bs.tau);
      double term = 0.0;
      if (eta == 1.0) {
        if (2 * n == sigma) term = row.prob_at(m1);
      } else {
        const double le = std::log(eta);
        const double l1e = std::log(1.0 - eta);
        const double det = static_cast<double>(sigma) * le +
                           static_cast<double>(2 * n - sigma) * l1e;
        for (long long N = m1; N <= 2 * n - m2; ++N) {
          const double r2 = row.prob_at(N);
          if (r2 == 0.0) continue;
          term += r2 * std::exp(det + log_binomial(N, m1) + log_binomial(2 * n - N, m2));
        }
      }
      acc += w * term;
    }
    remaining -= w;
    if (n >= n_lo && remaining < tail_epsilon) break;
  }
  return acc;
}

namespace detail {

// Work estimate guard for exact table assembly.
inline void check_exact_budget(double estimated_ops, const char* where) {
  if (estimated_ops > 4e9) {
    throw ResourceError(std::string(where) +
                        ": exact path too large; use the Gaussian sampler instead");
  }
}

}  // namespace detail

// Full sparse joint table for twin-beam weights on a lossy splitter. Total
// mass is >= 1 - epsilon of the weight mass; anything cut by the n-sum or by
// max_total lands in truncation_tail. max_total < 0 means no count cap.
// Splitting rows for the n terms are computed in parallel and merged in
// ascending n, so the result is identical for any worker count.
inline JointCountDistribution joint_distribution(const PhotonDistribution& weights,
                                                 const BeamSplitterSpec& bs, double eta,
                                                 double epsilon = 1e-9, long long max_total = -1,
                                                 int threads = 1) {
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw std::domain_error("joint_distribution: eta must lie in [0, 1]");
  }
  if (eta == 0.0) {
    JointCountDistribution out;
    out.add(0, 0, weights.total_weight);
    return out;
  }

  // Truncate the n sum where the remaining weight mass (an exact bound on the
  // remaining table mass) falls below epsilon, counting the deficit the
  // weight list itself carries. When a count cap is active the sum continues
  // until contributions inside the cap have decayed as well.
  const double deficit = std::max(0.0, 1.0 - weights.total_weight);
  long long n_hi = weights.min_count();
  {
    double remaining = weights.total_weight;
    for (long long n = weights.min_count(); n <= weights.max_count(); ++n) {
      remaining -= weights.prob_at(n);
      n_hi = n;
      if (remaining + deficit < epsilon) {
        if (max_total < 0) break;
        // Inside a cap, detected totals concentrate near 2 n eta; keep
        // summing until n is safely past the cap's contributing window.
        const double window = static_cast<double>(max_total) / (2.0 * eta);
        if (static_cast<double>(n) > 3.0 * window + 16.0 && remaining < epsilon * 1e-3) break;
      }
    }
  }

  detail::check_exact_budget(static_cast<double>(n_hi) * static_cast<double>(n_hi) *
                                 static_cast<double>(n_hi),
                             "joint_distribution");

  const long long n_lo = weights.min_count();
  std::vector<PhotonDistribution> rows(static_cast<std::size_t>(n_hi - n_lo + 1));
  parallel_for_chunks(n_hi - n_lo + 1, threads, [&](long long begin, long long end) {
    for (long long i = begin; i < end; ++i) {
      const long long n = n_lo + i;
      if (weights.prob_at(n) != 0.0) {
        rows[static_cast<std::size_t>(i)] = bs_output_distribution(n, bs.tau);
      }
    }
  });

  detail::LosslessJoint lossless;
  lossless.ensure(2 * n_hi, 2 * n_hi);
  double covered = 0.0;
  for (long long n = n_lo; n <= n_hi; ++n) {
    const double w = weights.prob_at(n);
    if (w == 0.0) continue;
    covered += w;
    const PhotonDistribution& row = rows[static_cast<std::size_t>(n - n_lo)];
    for (long long N = 0; N <= 2 * n; ++N) {
      const double r2 = row.prob_at(N);
      if (r2 == 0.0) continue;
      lossless.p[static_cast<std::size_t>(N)][static_cast<std::size_t>(2 * n - N)] += w * r2;
    }
  }
  lossless.tail = std::max(0.0, weights.total_weight - covered) +
                  std::max(0.0, 1.0 - weights.total_weight);

  return detail::detect_lossless(lossless, eta, max_total);
}

// Histogram of Delta = (m1 - m2) / (m1 + m2) over [-1, 1]. Events with
// m1 + m2 < min_total (always including (0,0)) are reported as excluded_mass
// together with any truncation tail of the source.
struct DeltaHistogram {
  std::vector<double> bin_edges;
  std::vector<double> masses;
  long long min_total = 1;
  double excluded_mass = 0.0;

  double bin_center(std::size_t i) const { return 0.5 * (bin_edges[i] + bin_edges[i + 1]); }
  std::size_t bin_count() const { return masses.size(); }

  double total_mass() const {
    double acc = excluded_mass;
    for (double m : masses) acc += m;
    return acc;
  }
};

namespace detail {

inline DeltaHistogram make_delta_histogram(long long bins, long long min_total) {
  if (bins < 2) throw std::domain_error("delta_histogram: bins must be >= 2");
  if (min_total < 1) throw std::domain_error("delta_histogram: min_total must be >= 1");
  DeltaHistogram h;
  h.min_total = min_total;
  h.bin_edges.resize(static_cast<std::size_t>(bins + 1));
  for (long long i = 0; i <= bins; ++i) {
    h.bin_edges[static_cast<std::size_t>(i)] =
        -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(bins);
  }
  h.masses.assign(static_cast<std::size_t>(bins), 0.0);
  return h;
}

inline void deposit_delta(DeltaHistogram& h, long long m1, long long m2, double mass) {
  const long long total = m1 + m2;
  if (total < h.min_total) {
    h.excluded_mass += mass;
    return;
  }
  const double delta = static_cast<double>(m1 - m2) / static_cast<double>(total);
  const auto bins = static_cast<long long>(h.masses.size());
  long long idx = static_cast<long long>(std::floor((delta + 1.0) * 0.5 * static_cast<double>(bins)));
  idx = std::clamp<long long>(idx, 0, bins - 1);
  h.masses[static_cast<std::size_t>(idx)] += mass;
}

}  // namespace detail

inline DeltaHistogram delta_histogram(const JointCountDistribution& jcd, long long bins = 64,
                                      long long min_total = 1) {
  if (jcd.entries.empty()) throw std::domain_error("delta_histogram: empty source");
  DeltaHistogram h = detail::make_delta_histogram(bins, min_total);
  h.excluded_mass += jcd.truncation_tail;
  for (const auto& [k, p] : jcd.entries) detail::deposit_delta(h, k.m1, k.m2, p);
  return h;
}

// Var(m1 - m2) / <m1 + m2>.
inline double noise_reduction_factor(const JointCountDistribution& jcd) {
  const double t = jcd.total();
  if (t <= 0.0) throw std::domain_error("noise_reduction_factor: empty distribution");
  double mean_diff = 0.0, mean_sq_diff = 0.0, mean_sum = 0.0;
  for (const auto& [k, p] : jcd.entries) {
    const double d = static_cast<double>(k.m1 - k.m2);
    mean_diff += p * d;
    mean_sq_diff += p * d * d;
    mean_sum += p * static_cast<double>(k.m1 + k.m2);
  }
  mean_diff /= t;
  mean_sq_diff /= t;
  mean_sum /= t;
  if (mean_sum <= 0.0) throw std::domain_error("noise_reduction_factor: zero mean total");
  return (mean_sq_diff - mean_diff * mean_diff) / mean_sum;
}

}  // namespace twinbeam
