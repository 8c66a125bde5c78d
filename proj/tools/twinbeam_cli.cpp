// Command-line front end: each subcommand reproduces one simulated scenario
// and writes CSV tables plus JSON metadata. Reruns with identical flags
// produce byte-identical files, independent of --threads.

#include <cstdlib>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "twinbeam/io.hpp"
#include "twinbeam/twinbeam.hpp"

namespace {

using twinbeam::io::json;

constexpr int kExitUsage = 2;
constexpr int kExitResource = 3;
constexpr int kExitConvergence = 4;

std::string output_dir_default() {
  if (const char* env = std::getenv("TWINBEAM_OUTPUT_DIR")) return env;
  return ".";
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

void ensure_dir(const std::string& dir) {
  std::filesystem::create_directories(dir);
}

// Long-format series CSV for plotting front ends.
void write_plot_data(const std::string& path, const json& config,
                     const std::vector<std::tuple<std::string, double, double>>& rows) {
  std::string out = twinbeam::io::config_comment(config);
  out += "series,x,y\n";
  for (const auto& [series, x, y] : rows) {
    out += series + ',' + twinbeam::io::format_double(x) + ',' +
           twinbeam::io::format_double(y) + '\n';
  }
  twinbeam::io::write_text_file(path, out);
}

struct FockArgs {
  long long sigma = 100;
  double tau = 0.5;
  double eta = 1.0;
  long long modes = 1;
  double gain = 2.0;
  std::string out_dir = output_dir_default();
  bool plot_data = false;
  int threads = 1;
};

json fock_config(const FockArgs& a) {
  json c;
  c["subcommand"] = "fock";
  c["sigma"] = a.sigma;
  c["tau"] = a.tau;
  c["eta"] = a.eta;
  c["modes"] = a.modes;
  c["gain"] = a.gain;
  return c;
}

// Conditional P(N|sigma) for the requested (tau, eta, modes) plus the ideal
// tau = 0.5, eta = 1 reference of the same sigma/modes.
twinbeam::PhotonDistribution conditional_sigma_distribution(long long sigma, double tau,
                                                            double eta, long long modes,
                                                            double gain) {
  using namespace twinbeam;
  std::vector<double> weights(static_cast<std::size_t>(modes), 1.0);
  const TwinBeamSpec spec(gain, weights);
  const BeamSplitterSpec bs(tau);
  const JointCountDistribution jcd =
      multimode_joint_distribution(spec, bs, eta, 1e-10, sigma);
  return sigma_slice(jcd, sigma);
}

int run_fock(const FockArgs& a) {
  using namespace twinbeam;
  if (a.sigma < 0) throw std::domain_error("fock: sigma must be >= 0");
  ensure_dir(a.out_dir);
  const json config = fock_config(a);

  const PhotonDistribution realistic =
      conditional_sigma_distribution(a.sigma, a.tau, a.eta, a.modes, a.gain);
  const PhotonDistribution ideal =
      conditional_sigma_distribution(a.sigma, 0.5, 1.0, a.modes, a.gain);

  io::write_text_file(join_path(a.out_dir, "pn_realistic.csv"),
                      io::photon_distribution_csv(realistic, a.sigma, config));
  io::write_text_file(join_path(a.out_dir, "pn_ideal.csv"),
                      io::photon_distribution_csv(ideal, a.sigma, config));

  json meta = config;
  meta["realistic_mean"] = realistic.mean();
  meta["ideal_mean"] = ideal.mean();
  io::write_text_file(join_path(a.out_dir, "fock_meta.json"), meta.dump(2) + "\n");

  if (a.plot_data) {
    std::vector<std::tuple<std::string, double, double>> rows;
    for (std::size_t i = 0; i < ideal.weights.size(); ++i) {
      rows.emplace_back("ideal", static_cast<double>(i), ideal.weights[i]);
    }
    for (std::size_t i = 0; i < realistic.weights.size(); ++i) {
      rows.emplace_back("realistic", static_cast<double>(i), realistic.weights[i]);
    }
    write_plot_data(join_path(a.out_dir, "fock_plot.csv"), config, rows);
  }
  return 0;
}

struct TwinArgs {
  double gain = 1.0;
  double modes = 1.0;
  std::vector<double> weights;
  double tau = 0.5;
  double phi_tau = 0.0;
  double phi_rho = 0.0;
  double eta = 1.0;
  double eta_signal_pre = 1.0;
  double eta_idler_pre = 1.0;
  long long trials = 100000;
  std::uint64_t seed = 0;
  long long bins = 64;
  long long min_total = 1;
  double electronic_noise_std = 0.0;
  std::string path = "auto";
  std::string out_dir = output_dir_default();
  bool plot_data = false;
  int threads = 1;
};

json twin_config(const TwinArgs& a, const std::string& chosen_path) {
  json c;
  c["subcommand"] = "twinbeam";
  c["gain"] = a.gain;
  c["modes"] = a.modes;
  c["mode_weights"] = a.weights;
  c["tau"] = a.tau;
  c["phi_tau"] = a.phi_tau;
  c["phi_rho"] = a.phi_rho;
  c["eta"] = a.eta;
  c["eta_signal_pre"] = a.eta_signal_pre;
  c["eta_idler_pre"] = a.eta_idler_pre;
  c["trials"] = a.trials;
  c["seed"] = a.seed;
  c["bins"] = a.bins;
  c["min_total"] = a.min_total;
  c["electronic_noise_std"] = a.electronic_noise_std;
  c["path"] = chosen_path;
  return c;
}

int run_twinbeam(const TwinArgs& a) {
  using namespace twinbeam;
  ensure_dir(a.out_dir);
  std::vector<double> weights =
      a.weights.empty() ? weights_for_effective_m(a.modes) : a.weights;
  const TwinBeamSpec spec(a.gain, weights, a.eta_signal_pre, a.eta_idler_pre);
  const BeamSplitterSpec bs(a.tau, a.phi_tau, a.phi_rho);

  SamplerOptions opt;
  opt.threads = a.threads;
  opt.electronic_noise_std = a.electronic_noise_std;
  if (a.path == "exact") {
    opt.path = SamplerPath::Exact;
  } else if (a.path == "wigner") {
    opt.path = SamplerPath::Wigner;
  } else if (a.path == "auto") {
    opt.path = SamplerPath::Auto;
  } else {
    throw std::domain_error("twinbeam: --path must be auto, exact or wigner");
  }

  const SampleBatch batch = gaussian_sample_bsv(spec, bs, a.eta, a.trials, a.seed, opt);
  const json config = twin_config(a, batch.scenario.path);

  io::write_text_file(join_path(a.out_dir, "samples.csv"),
                      io::sample_batch_csv(batch, config));
  json sidecar = io::sample_batch_sidecar(batch);
  sidecar["config"] = config;
  io::write_text_file(join_path(a.out_dir, "samples.json"), sidecar.dump(2) + "\n");

  const DeltaHistogram hist = delta_histogram(batch, a.bins, a.min_total);
  io::write_text_file(join_path(a.out_dir, "delta_histogram.csv"),
                      io::delta_histogram_csv(hist, config));

  json metrics = config;
  metrics["histogram"] = io::delta_histogram_meta(hist);
  metrics["mean_m1"] = batch.mean_m1();
  metrics["mean_m2"] = batch.mean_m2();
  metrics["noise_reduction_factor"] = noise_reduction_factor(batch);
  metrics["g2_port1"] = g2_of_marginal(batch, 0);
  io::write_text_file(join_path(a.out_dir, "twinbeam_metrics.json"), metrics.dump(2) + "\n");

  if (a.plot_data) {
    std::vector<std::tuple<std::string, double, double>> rows;
    for (std::size_t i = 0; i < hist.bin_count(); ++i) {
      rows.emplace_back("delta", hist.bin_center(i), hist.masses[i]);
    }
    write_plot_data(join_path(a.out_dir, "twinbeam_plot.csv"), config, rows);
  }
  return 0;
}

struct ClassicalArgs {
  std::string kind = "thermal";
  double mean_photons = 1e5;
  std::string phase_mode = "uniform";
  double phase = 0.0;
  double visibility = 1.0;
  double effective_modes = 1.0;
  double eta = 1.0;
  long long trials = 100000;
  std::uint64_t seed = 0;
  long long bins = 64;
  long long min_total = 1;
  std::string out_dir = output_dir_default();
  bool plot_data = false;
  int threads = 1;
};

int run_classical(const ClassicalArgs& a) {
  using namespace twinbeam;
  ensure_dir(a.out_dir);
  ClassicalKind kind;
  if (a.kind == "thermal") {
    kind = ClassicalKind::Thermal;
  } else if (a.kind == "coherent") {
    kind = ClassicalKind::Coherent;
  } else {
    throw std::domain_error("classical: --kind must be thermal or coherent");
  }
  PhaseMode pm;
  if (a.phase_mode == "uniform") {
    pm = PhaseMode::uniform();
  } else if (a.phase_mode == "fixed") {
    pm = PhaseMode::fixed(a.phase);
  } else {
    throw std::domain_error("classical: --phase-mode must be uniform or fixed");
  }
  const ClassicalSourceSpec src(kind, a.mean_photons, pm, a.visibility, a.effective_modes);
  const SampleBatch batch =
      classical_interference_samples(src, a.eta, a.trials, a.seed, a.threads);

  json config;
  config["subcommand"] = "classical";
  config["kind"] = a.kind;
  config["mean_photons"] = a.mean_photons;
  config["phase_mode"] = a.phase_mode;
  config["phase"] = a.phase;
  config["visibility"] = a.visibility;
  config["effective_modes"] = a.effective_modes;
  config["eta"] = a.eta;
  config["trials"] = a.trials;
  config["seed"] = a.seed;
  config["bins"] = a.bins;
  config["min_total"] = a.min_total;

  io::write_text_file(join_path(a.out_dir, "samples.csv"),
                      io::sample_batch_csv(batch, config));
  json sidecar = io::sample_batch_sidecar(batch);
  sidecar["config"] = config;
  io::write_text_file(join_path(a.out_dir, "samples.json"), sidecar.dump(2) + "\n");

  const DeltaHistogram hist = delta_histogram(batch, a.bins, a.min_total);
  io::write_text_file(join_path(a.out_dir, "delta_histogram.csv"),
                      io::delta_histogram_csv(hist, config));

  json metrics = config;
  metrics["histogram"] = io::delta_histogram_meta(hist);
  metrics["mean_sum"] = batch.mean_sum();
  if (a.phase_mode == "uniform" && kind == ClassicalKind::Coherent) {
    metrics["ks_to_arcsine"] = ks_distance_to_arcsine(deltas_of(batch, a.min_total));
  }
  io::write_text_file(join_path(a.out_dir, "classical_metrics.json"), metrics.dump(2) + "\n");

  if (a.plot_data) {
    std::vector<std::tuple<std::string, double, double>> rows;
    for (std::size_t i = 0; i < hist.bin_count(); ++i) {
      rows.emplace_back("delta", hist.bin_center(i), hist.masses[i]);
    }
    write_plot_data(join_path(a.out_dir, "classical_plot.csv"), config, rows);
  }
  return 0;
}

struct FilterArgs {
  std::string gamma_file;
  double tau = 0.5;
  double eta = 1.0;
  std::vector<long long> thresholds = {0, 1, 2, 4, 8};
  std::string out_dir = output_dir_default();
  bool emit_distributions = false;
  int threads = 1;
};

int run_filter(const FilterArgs& a) {
  using namespace twinbeam;
  ensure_dir(a.out_dir);
  MacroAmplitudes amps = io::read_gamma_csv(a.gamma_file);
  amps.normalize();
  const BeamSplitterSpec bs(a.tau);

  json config;
  config["subcommand"] = "filter";
  config["gamma_file"] = a.gamma_file;
  config["tau"] = a.tau;
  config["eta"] = a.eta;
  config["thresholds"] = a.thresholds;

  const JointCountDistribution phi =
      macro_joint_distribution(amps.with_orientation(MacroOrientation::Phi), bs, a.eta);
  const JointCountDistribution perp =
      macro_joint_distribution(amps.with_orientation(MacroOrientation::PhiPerp), bs, a.eta);

  json metrics = config;
  metrics["unfiltered_overlap"] = effective_overlap(phi, perp);
  metrics["unfiltered_total_variation"] = total_variation_distance(phi, perp);
  json per_threshold = json::array();
  for (long long threshold : a.thresholds) {
    const FilterResult fp = filter_condition(phi, threshold);
    const FilterResult fq = filter_condition(perp, threshold);
    json row;
    row["threshold"] = threshold;
    row["pass_probability_phi"] = fp.pass_probability;
    row["pass_probability_phi_perp"] = fq.pass_probability;
    row["empty"] = fp.empty || fq.empty;
    if (!fp.empty && !fq.empty) {
      row["bhattacharyya_overlap"] = effective_overlap(fp.conditioned, fq.conditioned);
      row["total_variation"] = total_variation_distance(fp.conditioned, fq.conditioned);
    }
    per_threshold.push_back(row);
  }
  metrics["per_threshold"] = per_threshold;
  io::write_text_file(join_path(a.out_dir, "filter_metrics.json"), metrics.dump(2) + "\n");

  if (a.emit_distributions) {
    io::write_text_file(join_path(a.out_dir, "joint_phi.csv"),
                        io::joint_distribution_csv(phi, config));
    io::write_text_file(join_path(a.out_dir, "joint_phi_perp.csv"),
                        io::joint_distribution_csv(perp, config));
  }
  return 0;
}

struct FitArgs {
  std::string input;
  std::string out_dir = output_dir_default();
};

int run_fit_gain(const FitArgs& a) {
  using namespace twinbeam;
  ensure_dir(a.out_dir);
  const auto points = io::read_power_photon_csv(a.input);
  const GainFit fit = fit_gain(points);
  json config;
  config["subcommand"] = "fit-gain";
  config["input"] = a.input;
  json out = config;
  out["fit"] = io::gain_fit_to_json(fit);
  json gains = json::array();
  for (const auto& [power, photons] : points) {
    json row;
    row["power_mW"] = power;
    row["gain"] = fit.gain_at(power);
    gains.push_back(row);
  }
  out["gain_at_points"] = gains;
  twinbeam::io::write_text_file(join_path(a.out_dir, "gain_fit.json"), out.dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-photon twin-beam interference simulator"};
  app.require_subcommand(1);

  FockArgs fock;
  auto* fock_cmd = app.add_subcommand(
      "fock", "Conditional photon-number distribution P(N|sigma) at the splitter output");
  fock_cmd->add_option("--sigma", fock.sigma, "Total detected photons in the slice");
  fock_cmd->add_option("--tau", fock.tau, "Splitter transmissivity");
  fock_cmd->add_option("--eta", fock.eta, "Detection efficiency");
  fock_cmd->add_option("--modes", fock.modes, "Number of equal twin-beam mode pairs");
  fock_cmd->add_option("--gain", fock.gain, "Parametric gain of the source");
  fock_cmd->add_option("--out-dir", fock.out_dir, "Output directory");
  fock_cmd->add_flag("--plot-data", fock.plot_data, "Also emit long-format plot CSV");
  fock_cmd->add_option("--threads", fock.threads, "Worker cap");

  TwinArgs twin;
  auto* twin_cmd =
      app.add_subcommand("twinbeam", "Sample twin-beam interference count pairs");
  twin_cmd->add_option("--gain", twin.gain, "Parametric gain G");
  twin_cmd->add_option("--modes", twin.modes, "Effective mode count m");
  twin_cmd->add_option("--mode-weights", twin.weights,
                       "Explicit mode weights (overrides --modes)")
      ->delimiter(',');
  twin_cmd->add_option("--tau", twin.tau, "Splitter transmissivity");
  twin_cmd->add_option("--phi-tau", twin.phi_tau, "Splitter phase phi_tau");
  twin_cmd->add_option("--phi-rho", twin.phi_rho, "Splitter phase phi_rho");
  twin_cmd->add_option("--eta", twin.eta, "Detection efficiency");
  twin_cmd->add_option("--eta-signal-pre", twin.eta_signal_pre,
                       "Pre-splitter transmission of the signal arm");
  twin_cmd->add_option("--eta-idler-pre", twin.eta_idler_pre,
                       "Pre-splitter transmission of the idler arm");
  twin_cmd->add_option("--trials", twin.trials, "Number of pulses");
  twin_cmd->add_option("--seed", twin.seed, "RNG seed")->required();
  twin_cmd->add_option("--bins", twin.bins, "Delta histogram bins");
  twin_cmd->add_option("--min-total", twin.min_total, "Minimum m1+m2 counted in Delta");
  twin_cmd->add_option("--electronic-noise-std", twin.electronic_noise_std,
                       "Gaussian electronic noise (counts)");
  twin_cmd->add_option("--path", twin.path, "auto | exact | wigner");
  twin_cmd->add_option("--out-dir", twin.out_dir, "Output directory");
  twin_cmd->add_flag("--plot-data", twin.plot_data, "Also emit long-format plot CSV");
  twin_cmd->add_option("--threads", twin.threads, "Worker cap");

  ClassicalArgs classical;
  auto* classical_cmd = app.add_subcommand(
      "classical", "Split a classical beam, shift its phase and recombine");
  classical_cmd->add_option("--kind", classical.kind, "thermal | coherent");
  classical_cmd->add_option("--mean-photons", classical.mean_photons, "Pulse brightness");
  classical_cmd->add_option("--phase-mode", classical.phase_mode, "uniform | fixed");
  classical_cmd->add_option("--phase", classical.phase, "Fixed phase (radians)");
  classical_cmd->add_option("--visibility", classical.visibility, "Interference contrast");
  classical_cmd->add_option("--effective-modes", classical.effective_modes,
                            "Thermal effective mode count");
  classical_cmd->add_option("--eta", classical.eta, "Detection efficiency");
  classical_cmd->add_option("--trials", classical.trials, "Number of pulses");
  classical_cmd->add_option("--seed", classical.seed, "RNG seed")->required();
  classical_cmd->add_option("--bins", classical.bins, "Delta histogram bins");
  classical_cmd->add_option("--min-total", classical.min_total,
                            "Minimum m1+m2 counted in Delta");
  classical_cmd->add_option("--out-dir", classical.out_dir, "Output directory");
  classical_cmd->add_flag("--plot-data", classical.plot_data,
                          "Also emit long-format plot CSV");
  classical_cmd->add_option("--threads", classical.threads, "Worker cap");

  FilterArgs filter;
  auto* filter_cmd = app.add_subcommand(
      "filter", "Photon-number-difference filtering of macroscopic superposition components");
  filter_cmd->add_option("--gamma-file", filter.gamma_file, "CSV of i,j,re,im amplitudes")
      ->required();
  filter_cmd->add_option("--tau", filter.tau, "Splitter transmissivity");
  filter_cmd->add_option("--eta", filter.eta, "Detection efficiency");
  filter_cmd->add_option("--thresholds", filter.thresholds, "|m1-m2| thresholds")
      ->delimiter(',');
  filter_cmd->add_option("--out-dir", filter.out_dir, "Output directory");
  filter_cmd->add_flag("--emit-distributions", filter.emit_distributions,
                       "Also write the joint tables");
  filter_cmd->add_option("--threads", filter.threads, "Worker cap");

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit-gain", "Fit N = N0 sinh^2(kappa sqrt(P))");
  fit_cmd->add_option("--input", fit.input, "CSV of power_mW,photons")->required();
  fit_cmd->add_option("--out-dir", fit.out_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (fock_cmd->parsed()) return run_fock(fock);
    if (twin_cmd->parsed()) return run_twinbeam(twin);
    if (classical_cmd->parsed()) return run_classical(classical);
    if (filter_cmd->parsed()) return run_filter(filter);
    if (fit_cmd->parsed()) return run_fit_gain(fit);
  } catch (const twinbeam::ResourceError& e) {
    std::cerr << "resource error: " << e.what() << '\n';
    return kExitResource;
  } catch (const twinbeam::ConvergenceError& e) {
    std::cerr << "convergence error: " << e.what() << '\n';
    return kExitConvergence;
  } catch (const std::domain_error& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
