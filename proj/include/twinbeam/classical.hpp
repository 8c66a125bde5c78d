#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "twinbeam/multimode.hpp"
#include "twinbeam/parallel.hpp"
#include "twinbeam/rng.hpp"

namespace twinbeam {

enum class ClassicalKind { Thermal, Coherent };

// Per-pulse relative phase. Uniform is the default randomization; Fixed holds
// the phase constant; Custom accepts any sampler drawing from the per-trial
// stream, for phase statistics beyond the built-in two.
struct PhaseMode {
  enum class Kind { Fixed, Uniform, Custom } kind = Kind::Uniform;
  double value = 0.0;  // radians, used by Fixed
  std::function<double(TrialRng&)> sampler;

  static PhaseMode uniform() { return {Kind::Uniform, 0.0, {}}; }
  static PhaseMode fixed(double phi) { return {Kind::Fixed, phi, {}}; }
  static PhaseMode custom(std::function<double(TrialRng&)> fn) {
    PhaseMode pm;
    pm.kind = Kind::Custom;
    pm.sampler = std::move(fn);
    return pm;
  }
};

// Classical beam split in two, one arm phase-shifted, recombined on a 50%
// splitter. mean_photons is the total pulse brightness; visibility models
// imperfect interference contrast; effective_modes > 1 switches the thermal
// intensity to a Gamma law with that shape.
struct ClassicalSourceSpec {
  ClassicalKind kind = ClassicalKind::Thermal;
  double mean_photons = 0.0;
  PhaseMode phase_mode = PhaseMode::uniform();
  double visibility = 1.0;
  double effective_modes = 1.0;

  ClassicalSourceSpec() = default;
  ClassicalSourceSpec(ClassicalKind k, double mean, PhaseMode pm, double v = 1.0,
                      double modes = 1.0)
      : kind(k), mean_photons(mean), phase_mode(pm), visibility(v), effective_modes(modes) {
    if (mean_photons < 0.0) throw std::domain_error("ClassicalSourceSpec: mean_photons < 0");
    if (!(visibility >= 0.0 && visibility <= 1.0)) {
      throw std::domain_error("ClassicalSourceSpec: visibility must lie in [0, 1]");
    }
    if (!(effective_modes >= 1.0)) {
      throw std::domain_error("ClassicalSourceSpec: effective_modes must be >= 1");
    }
  }
};

// Per trial: draw the pulse intensity, draw the relative phase, put
// I (1 +/- v cos phi)/2 on the two output ports and detect with Poisson
// counts at efficiency eta.
inline SampleBatch classical_interference_samples(const ClassicalSourceSpec& src, double eta,
                                                  long long trials, std::uint64_t seed,
                                                  int threads = 1) {
  if (trials < 1) throw std::domain_error("classical_interference_samples: trials must be >= 1");
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw std::domain_error("classical_interference_samples: eta must lie in [0, 1]");
  }

  SampleBatch batch;
  batch.seed = seed;
  batch.trials = trials;
  batch.pairs.resize(static_cast<std::size_t>(trials));
  batch.scenario.source = src.kind == ClassicalKind::Thermal ? "thermal" : "coherent";
  batch.scenario.mean_photons = src.mean_photons;
  batch.scenario.eta = eta;
  batch.scenario.visibility = src.visibility;
  batch.scenario.effective_modes = src.effective_modes;
  batch.scenario.path = "poisson";
  switch (src.phase_mode.kind) {
    case PhaseMode::Kind::Uniform:
      batch.scenario.phase_mode = "uniform";
      break;
    case PhaseMode::Kind::Fixed:
      batch.scenario.phase_mode = "fixed:" + std::to_string(src.phase_mode.value);
      break;
    case PhaseMode::Kind::Custom:
      batch.scenario.phase_mode = "custom";
      break;
  }

  parallel_for_chunks(trials, threads, [&](long long begin, long long end) {
    for (long long t = begin; t < end; ++t) {
      TrialRng rng(seed, static_cast<std::uint64_t>(t), 0);
      double intensity = src.mean_photons;
      if (src.kind == ClassicalKind::Thermal) {
        if (src.effective_modes <= 1.0 + 1e-12) {
          intensity = rng.exponential(src.mean_photons);
        } else {
          intensity =
              rng.gamma(src.effective_modes, src.mean_photons / src.effective_modes);
        }
      }
      double phi = src.phase_mode.value;
      if (src.phase_mode.kind == PhaseMode::Kind::Uniform) {
        phi = 2.0 * std::numbers::pi * rng.uniform01();
      } else if (src.phase_mode.kind == PhaseMode::Kind::Custom) {
        phi = src.phase_mode.sampler(rng);
      }
      const double contrast = src.visibility * std::cos(phi);
      const double mean_1 = eta * intensity * 0.5 * (1.0 + contrast);
      const double mean_2 = eta * intensity * 0.5 * (1.0 - contrast);
      TrialRng det(seed, static_cast<std::uint64_t>(t), 1);
      batch.pairs[static_cast<std::size_t>(t)] = {det.poisson(mean_1), det.poisson(mean_2)};
    }
  });
  return batch;
}

// Arcsine density on (-1, 1): the law of cos(phi) for uniform phi.
inline double arcsine_density_reference(double delta) {
  if (!(std::abs(delta) < 1.0)) {
    throw std::domain_error("arcsine_density_reference: |delta| must be < 1");
  }
  return 1.0 / (std::numbers::pi * std::sqrt(1.0 - delta * delta));
}

// CDF of the same law; equals (2/pi) asin(sqrt((1+delta)/2)).
inline double arcsine_cdf_reference(double delta) {
  if (delta <= -1.0) return 0.0;
  if (delta >= 1.0) return 1.0;
  return 0.5 + std::asin(delta) / std::numbers::pi;
}

// Kolmogorov-Smirnov distance between sampled Delta values and the arcsine
// law. Values are copied and sorted internally.
inline double ks_distance_to_arcsine(std::vector<double> deltas) {
  if (deltas.empty()) throw std::domain_error("ks_distance_to_arcsine: no samples");
  std::sort(deltas.begin(), deltas.end());
  const double n = static_cast<double>(deltas.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    const double f = arcsine_cdf_reference(deltas[i]);
    const double lo = static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n;
    worst = std::max({worst, std::abs(f - lo), std::abs(f - hi)});
  }
  return worst;
}

inline std::vector<double> deltas_of(const SampleBatch& batch, long long min_total = 1) {
  std::vector<double> out;
  out.reserve(batch.pairs.size());
  for (const auto& [m1, m2] : batch.pairs) {
    const long long total = m1 + m2;
    if (total < min_total) continue;
    out.push_back(static_cast<double>(m1 - m2) / static_cast<double>(total));
  }
  return out;
}

}  // namespace twinbeam
