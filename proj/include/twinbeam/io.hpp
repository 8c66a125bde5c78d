#pragma once

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "twinbeam/classical.hpp"
#include "twinbeam/detection.hpp"
#include "twinbeam/distribution.hpp"
#include "twinbeam/filter.hpp"
#include "twinbeam/multimode.hpp"
#include "twinbeam/twin_beam.hpp"

namespace twinbeam::io {

using json = nlohmann::ordered_json;

// Shortest-exact decimal formatting so reruns are byte-identical.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline json scenario_to_json(const ScenarioDescriptor& s) {
  json j;
  j["source"] = s.source;
  j["gain"] = s.gain;
  j["mean_photons"] = s.mean_photons;
  j["mode_weights"] = s.mode_weights;
  j["tau"] = s.tau;
  j["phi_tau"] = s.phi_tau;
  j["phi_rho"] = s.phi_rho;
  j["eta"] = s.eta;
  j["eta_signal_pre"] = s.eta_signal_pre;
  j["eta_idler_pre"] = s.eta_idler_pre;
  j["phase_mode"] = s.phase_mode;
  j["visibility"] = s.visibility;
  j["effective_modes"] = s.effective_modes;
  j["path"] = s.path;
  j["electronic_noise_std"] = s.electronic_noise_std;
  return j;
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline std::string config_comment(const json& config) {
  return "# config: " + config.dump() + "\n";
}

// Photon-number table. When sigma >= 0 a delta column (2N - sigma)/sigma is
// included for the rescaled P(Delta) view.
inline std::string photon_distribution_csv(const PhotonDistribution& dist, long long sigma,
                                           const json& config) {
  std::ostringstream out;
  out << config_comment(config);
  out << (sigma >= 0 ? "N,probability,delta\n" : "N,probability\n");
  for (std::size_t i = 0; i < dist.weights.size(); ++i) {
    const long long n = dist.support_offset + static_cast<long long>(i);
    out << n << ',' << format_double(dist.weights[i]);
    if (sigma >= 0) {
      const double delta =
          sigma > 0 ? static_cast<double>(2 * n - sigma) / static_cast<double>(sigma) : 0.0;
      out << ',' << format_double(delta);
    }
    out << '\n';
  }
  return out.str();
}

inline std::string joint_distribution_csv(const JointCountDistribution& jcd, const json& config) {
  std::ostringstream out;
  out << config_comment(config);
  out << "m1,m2,probability\n";
  for (const auto& [k, p] : jcd.entries) {
    out << k.m1 << ',' << k.m2 << ',' << format_double(p) << '\n';
  }
  return out.str();
}

inline std::string delta_histogram_csv(const DeltaHistogram& hist, const json& config) {
  std::ostringstream out;
  out << config_comment(config);
  out << "bin_center,mass\n";
  for (std::size_t i = 0; i < hist.bin_count(); ++i) {
    out << format_double(hist.bin_center(i)) << ',' << format_double(hist.masses[i]) << '\n';
  }
  return out.str();
}

inline json delta_histogram_meta(const DeltaHistogram& hist) {
  json j;
  j["bins"] = hist.bin_count();
  j["min_total"] = hist.min_total;
  j["excluded_mass"] = hist.excluded_mass;
  return j;
}

inline std::string sample_batch_csv(const SampleBatch& batch, const json& config) {
  std::ostringstream out;
  out << config_comment(config);
  out << "trial,m1,m2\n";
  for (std::size_t t = 0; t < batch.pairs.size(); ++t) {
    out << t << ',' << batch.pairs[t].first << ',' << batch.pairs[t].second << '\n';
  }
  return out.str();
}

inline json sample_batch_sidecar(const SampleBatch& batch) {
  json j;
  j["seed"] = batch.seed;
  j["trials"] = batch.trials;
  j["scenario"] = scenario_to_json(batch.scenario);
  return j;
}

// gamma tables arrive as CSV rows i,j,re,im (header line optional,
// '#' comments skipped).
inline MacroAmplitudes read_gamma_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open gamma table: " + path);
  MacroAmplitudes amps;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(row, field, ',')) fields.push_back(field);
    if (fields.size() != 4) continue;
    try {
      const long long i = std::stoll(fields[0]);
      const long long j = std::stoll(fields[1]);
      const double re = std::stod(fields[2]);
      const double im = std::stod(fields[3]);
      amps.gamma[{i, j}] += std::complex<double>(re, im);
    } catch (const std::exception&) {
      continue;  // header or malformed row
    }
  }
  if (amps.gamma.empty()) throw std::runtime_error("gamma table empty: " + path);
  return amps;
}

// Gain-fit input: CSV rows power_mW,photons.
inline std::vector<std::pair<double, double>> read_power_photon_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open fit input: " + path);
  std::vector<std::pair<double, double>> points;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    std::string a, b;
    if (!std::getline(row, a, ',') || !std::getline(row, b, ',')) continue;
    try {
      points.emplace_back(std::stod(a), std::stod(b));
    } catch (const std::exception&) {
      continue;
    }
  }
  if (points.empty()) throw std::runtime_error("fit input empty: " + path);
  return points;
}

inline json gain_fit_to_json(const GainFit& fit) {
  json j;
  j["N0"] = fit.n0;
  j["kappa"] = fit.kappa;
  j["residual"] = fit.residual;
  return j;
}

}  // namespace twinbeam::io
