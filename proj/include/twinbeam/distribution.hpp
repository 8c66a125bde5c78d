#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace twinbeam {

// Weighted distribution over photon counts n = support_offset, ...,
// support_offset + weights.size() - 1. total_weight is 1 for normalized
// distributions and may be below 1 when a prefactor or truncation tail is
// carried explicitly.
struct PhotonDistribution {
  long long support_offset = 0;
  std::vector<double> weights;
  double total_weight = 0.0;

  static PhotonDistribution point(long long n, double weight = 1.0) {
    PhotonDistribution d;
    d.support_offset = n;
    d.weights = {weight};
    d.total_weight = weight;
    return d;
  }

  static PhotonDistribution from_weights(long long offset, std::vector<double> w) {
    PhotonDistribution d;
    d.support_offset = offset;
    d.weights = std::move(w);
    d.recompute_total();
    return d;
  }

  void recompute_total() {
    double acc = 0.0;
    for (double w : weights) acc += w;
    total_weight = acc;
  }

  bool empty() const { return weights.empty(); }
  long long min_count() const { return support_offset; }
  long long max_count() const {
    return support_offset + static_cast<long long>(weights.size()) - 1;
  }

  double prob_at(long long n) const {
    const long long idx = n - support_offset;
    if (idx < 0 || idx >= static_cast<long long>(weights.size())) return 0.0;
    return weights[static_cast<std::size_t>(idx)];
  }

  double mean() const {
    if (total_weight <= 0.0) return 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      acc += weights[i] * static_cast<double>(support_offset + static_cast<long long>(i));
    }
    return acc / total_weight;
  }

  double variance() const {
    if (total_weight <= 0.0) return 0.0;
    const double m = mean();
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      const double x = static_cast<double>(support_offset + static_cast<long long>(i)) - m;
      acc += weights[i] * x * x;
    }
    return acc / total_weight;
  }

  PhotonDistribution normalized() const {
    if (total_weight <= 0.0) {
      throw std::domain_error("PhotonDistribution: cannot normalize zero-mass distribution");
    }
    PhotonDistribution d = *this;
    for (double& w : d.weights) w /= total_weight;
    d.total_weight = 1.0;
    return d;
  }
};

// Exact discrete convolution. Means add, total weights multiply.
inline PhotonDistribution convolve(const PhotonDistribution& a, const PhotonDistribution& b) {
  if (a.empty() || b.empty()) return {};
  PhotonDistribution out;
  out.support_offset = a.support_offset + b.support_offset;
  out.weights.assign(a.weights.size() + b.weights.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.weights.size(); ++i) {
    if (a.weights[i] == 0.0) continue;
    for (std::size_t j = 0; j < b.weights.size(); ++j) {
      out.weights[i + j] += a.weights[i] * b.weights[j];
    }
  }
  out.recompute_total();
  return out;
}

}  // namespace twinbeam
