#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "twinbeam/beam_splitter.hpp"
#include "twinbeam/detection.hpp"
#include "twinbeam/errors.hpp"
#include "twinbeam/fock_oracle.hpp"

namespace twinbeam {

enum class MacroOrientation { Phi, PhiPerp };

// Amplitude table gamma_ij of a macroscopic superposition component.
// Phi maps (i, j) to the Fock pair |2i+1, 2j>, PhiPerp to |2j, 2i+1>.
struct MacroAmplitudes {
  std::map<std::pair<long long, long long>, std::complex<double>> gamma;
  MacroOrientation orientation = MacroOrientation::Phi;

  double norm_squared() const {
    double acc = 0.0;
    for (const auto& [ij, amp] : gamma) acc += std::norm(amp);
    return acc;
  }

  void normalize() {
    const double n2 = norm_squared();
    if (n2 <= 0.0) throw std::domain_error("MacroAmplitudes: zero amplitude table");
    const double inv = 1.0 / std::sqrt(n2);
    for (auto& [ij, amp] : gamma) amp *= inv;
  }

  MacroAmplitudes with_orientation(MacroOrientation o) const {
    MacroAmplitudes copy = *this;
    copy.orientation = o;
    return copy;
  }

  // Fock components (k, l, amplitude) under the current orientation.
  std::vector<std::tuple<long long, long long, std::complex<double>>> fock_components() const {
    std::vector<std::tuple<long long, long long, std::complex<double>>> out;
    out.reserve(gamma.size());
    for (const auto& [ij, amp] : gamma) {
      const auto [i, j] = ij;
      if (i < 0 || j < 0) throw std::domain_error("MacroAmplitudes: negative index");
      if (orientation == MacroOrientation::Phi) {
        out.emplace_back(2 * i + 1, 2 * j, amp);
      } else {
        out.emplace_back(2 * j, 2 * i + 1, amp);
      }
    }
    return out;
  }
};

// Joint detected-count distribution of a macroscopic component through the
// splitter. Components with equal total photon number interfere coherently at
// the outputs (photon-number detection is diagonal, so cross terms between
// different totals vanish exactly); detection loss is applied afterwards.
inline JointCountDistribution macro_joint_distribution(const MacroAmplitudes& amps,
                                                       const BeamSplitterSpec& bs, double eta) {
  const auto components = amps.fock_components();
  if (components.empty()) throw std::domain_error("macro_joint_distribution: empty table");
  long long max_total = 0;
  for (const auto& [k, l, amp] : components) max_total = std::max(max_total, k + l);
  if (max_total > 200) {
    throw ResourceError("macro_joint_distribution: total photon number exceeds exact cutoff");
  }

  // Coherent output amplitudes per total-photon sector. Small sectors go
  // through the combinatorial amplitudes; sectors past the cancellation
  // limit of that sum are evolved as dense unitary blocks instead.
  std::map<long long, std::vector<std::tuple<long long, long long, std::complex<double>>>>
      by_sector;
  for (const auto& comp : components) by_sector[std::get<0>(comp) + std::get<1>(comp)].push_back(comp);

  std::map<long long, std::vector<std::complex<double>>> sectors;
  for (const auto& [s, comps] : by_sector) {
    auto& sector = sectors[s];
    sector.assign(static_cast<std::size_t>(s + 1), 0.0);
    if (s <= 80) {
      for (const auto& [k, l, amp] : comps) {
        for (long long N = 0; N <= s; ++N) {
          sector[static_cast<std::size_t>(N)] += amp * general_bs_amplitude(k, l, N, bs);
        }
      }
    } else {
      FockOracleState st = FockOracleState::from_components(comps);
      st.apply_beam_splitter(bs);
      for (long long N = 0; N <= s; ++N) {
        sector[static_cast<std::size_t>(N)] = st.amplitude(N, s - N);
      }
    }
  }

  detail::LosslessJoint lossless;
  lossless.ensure(max_total, max_total);
  for (const auto& [s, sector] : sectors) {
    for (long long N = 0; N <= s; ++N) {
      const double p = std::norm(sector[static_cast<std::size_t>(N)]);
      if (p > 0.0) {
        lossless.p[static_cast<std::size_t>(N)][static_cast<std::size_t>(s - N)] += p;
      }
    }
  }
  return detail::detect_lossless(lossless, eta, -1);
}

struct FilterResult {
  JointCountDistribution conditioned;
  double pass_probability = 0.0;
  bool empty = false;  // flagged when nothing passes; not an error
};

// Keeps events with |m1 - m2| >= delta_threshold and renormalizes.
inline FilterResult filter_condition(const JointCountDistribution& dist,
                                     long long delta_threshold) {
  if (delta_threshold < 0) {
    throw std::domain_error("filter_condition: threshold must be >= 0");
  }
  FilterResult result;
  double pass = 0.0;
  for (const auto& [k, p] : dist.entries) {
    if (std::abs(k.m1 - k.m2) >= delta_threshold) {
      result.conditioned.entries[k] = p;
      pass += p;
    }
  }
  const double total = dist.total() + dist.truncation_tail;
  result.pass_probability = total > 0.0 ? pass / total : 0.0;
  if (pass <= 0.0) {
    result.empty = true;
    result.conditioned.entries.clear();
    return result;
  }
  for (auto& [k, p] : result.conditioned.entries) p /= pass;
  return result;
}

// Bhattacharyya coefficient sum sqrt(p_a p_b): 1 for identical distributions,
// 0 for disjoint supports.
inline double effective_overlap(const JointCountDistribution& a,
                                const JointCountDistribution& b) {
  double acc = 0.0;
  for (const auto& [k, pa] : a.entries) {
    const double pb = b.prob_at(k.m1, k.m2);
    if (pa > 0.0 && pb > 0.0) acc += std::sqrt(pa * pb);
  }
  return acc;
}

// Total variation distance, emitted alongside the overlap for comparison.
inline double total_variation_distance(const JointCountDistribution& a,
                                       const JointCountDistribution& b) {
  double acc = 0.0;
  for (const auto& [k, pa] : a.entries) acc += std::abs(pa - b.prob_at(k.m1, k.m2));
  for (const auto& [k, pb] : b.entries) {
    if (a.entries.find(k) == a.entries.end()) acc += pb;
  }
  return 0.5 * acc;
}

}  // namespace twinbeam
