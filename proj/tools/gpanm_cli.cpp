// SPDX-License-Identifier: Apache-2.0
//
// gpanm: simulate array data, estimate DOAs, and run Monte Carlo experiments.
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gpanm/array_model.hpp"
#include "gpanm/baselines.hpp"
#include "gpanm/crlb.hpp"
#include "gpanm/errors.hpp"
#include "gpanm/estimator.hpp"
#include "gpanm/harness.hpp"
#include "gpanm/regularization.hpp"

namespace {

using namespace gpanm;

// Writes to the named file, or stdout for "" / "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      require(static_cast<bool>(*file_), ErrorCode::IoError, "cannot open " + path + " for writing");
    }
  }
  std::ostream& get() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

std::vector<double> parse_list(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      fail(ErrorCode::ConfigError, "'" + item + "' is not a number");
    }
  }
  return out;
}

struct ScenarioArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> overrides;
  std::string methods;

  void attach(CLI::App* app) {
    app->add_option("--config", config, "key=value scenario file");
    app->add_option("--seed", seed, "master seed (overrides the config)");
    app->add_option("--set", overrides, "extra key=value overrides")->take_all();
    app->add_option("--method", methods, "comma-separated methods (overrides the config)");
  }

  ScenarioConfig load() const {
    ScenarioConfig cfg = config.empty() ? ScenarioConfig{} : load_config(config);
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      require(eq != std::string::npos, ErrorCode::ConfigError, "--set expects key=value, got '" + kv + "'");
      set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (seed) cfg.master_seed = *seed;
    if (!methods.empty()) cfg.methods = parse_method_list(methods);
    cfg.validate();
    return cfg;
  }
};

template <class T>
void write_list(std::ostream& os, const char* key, const T& v) {
  os << key << '=';
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gridless DOA estimation with gain-phase errors"};
  app.require_subcommand(1);

  // simulate
  ScenarioArgs sim_args;
  int sim_trial = 0;
  std::string sim_out, sim_truth;
  auto* sim = app.add_subcommand("simulate", "synthesize one trial's received data as CSV");
  sim_args.attach(sim);
  sim->add_option("--trial", sim_trial, "trial id whose seeds are used")->check(CLI::NonNegativeNumber);
  sim->add_option("--out", sim_out, "Y CSV path (stdout by default)");
  sim->add_option("--truth", sim_truth, "write truth angles and noise level as key=value");

  // estimate
  std::string est_in, est_out, est_spectrum, est_method = "GPANM";
  std::optional<double> est_tau, est_noise, est_ce, est_sigma_a, est_sigma_p;
  std::optional<int> est_k;
  double est_step = 0.01, est_range = 90.0, est_eta = 1.0, est_t = 4.0, est_threshold = 0.5;
  double est_spacing = 0.5;
  auto* est = app.add_subcommand("estimate", "estimate DOAs from a Y CSV");
  est->add_option("--input", est_in, "Y CSV")->required();
  est->add_option("--out", est_out, "key=value report (stdout by default)");
  est->add_option("--spectrum", est_spectrum, "spectrum CSV (theta_deg,value)");
  est->add_option("--method", est_method, "GPANM, GPANM_L1, ANM, MUSIC or SOMP");
  est->add_option("--tau", est_tau, "regularization weight");
  est->add_option("--noise-std", est_noise, "noise standard deviation used to derive tau");
  est->add_option("--ce", est_ce, "error bound C_e");
  est->add_option("--sigma-a", est_sigma_a, "gain error spread used to derive C_e");
  est->add_option("--sigma-p-deg", est_sigma_p, "phase error spread (degrees) used to derive C_e");
  est->add_option("--k", est_k, "number of sources");
  est->add_option("--grid-step", est_step, "spectrum / dictionary step in degrees");
  est->add_option("--range", est_range, "half-width of the scanned range in degrees");
  est->add_option("--eta", est_eta, "tau multiplier");
  est->add_option("--t", est_t, "tail parameter of the spectral-norm bound");
  est->add_option("--threshold", est_threshold, "relative peak threshold when K is unknown");
  est->add_option("--spacing", est_spacing, "antenna spacing over wavelength");

  // tau
  int tau_n = 10, tau_p = 5;
  double tau_sigma = 1.0, tau_ce = 0.0, tau_eta = 1.0, tau_t = 4.0;
  std::optional<double> tau_sa, tau_sp;
  auto* tau_cmd = app.add_subcommand("tau", "print the regularization report");
  tau_cmd->add_option("--n", tau_n, "antennas");
  tau_cmd->add_option("--p", tau_p, "snapshots");
  tau_cmd->add_option("--sigma", tau_sigma, "noise standard deviation");
  tau_cmd->add_option("--ce", tau_ce, "error bound C_e");
  tau_cmd->add_option("--sigma-a", tau_sa, "gain error spread used to derive C_e");
  tau_cmd->add_option("--sigma-p-deg", tau_sp, "phase error spread used to derive C_e");
  tau_cmd->add_option("--eta", tau_eta, "multiplier (>= 1)");
  tau_cmd->add_option("--t", tau_t, "tail parameter");

  // crlb
  ScenarioArgs crlb_args;
  std::string crlb_out, crlb_thetas = "-56.8889,-7.6806,5.9595", crlb_snr = "0,5,10,15,20,25,30";
  double crlb_power = 1.0;
  bool crlb_errors = false;
  auto* crlb_cmd = app.add_subcommand("crlb", "CRLB curve as CSV (snr_db,crlb_deg)");
  crlb_args.attach(crlb_cmd);
  crlb_cmd->add_option("--thetas", crlb_thetas, "source angles in degrees");
  crlb_cmd->add_option("--snr", crlb_snr, "comma-separated SNR grid in dB");
  crlb_cmd->add_option("--source-power", crlb_power, "per-source power");
  crlb_cmd->add_flag("--with-errors", crlb_errors, "draw gain-phase errors from the config spreads");
  crlb_cmd->add_option("--out", crlb_out, "CSV path (stdout by default)");

  // run
  ScenarioArgs run_args;
  int run_workers = 1;
  std::string run_out, run_summary;
  auto* run = app.add_subcommand("run", "Monte Carlo trials for one scenario");
  run_args.attach(run);
  run->add_option("--workers", run_workers, "worker threads")->check(CLI::PositiveNumber);
  run->add_option("--out", run_out, "trial CSV path (stdout by default)");
  run->add_option("--summary", run_summary, "per-method summary CSV (stderr by default)");

  // sweep
  ScenarioArgs sw_args;
  int sw_workers = 1;
  std::string sw_out, sw_axis, sw_values;
  auto* sw = app.add_subcommand("sweep", "RMSE versus one scenario parameter");
  sw_args.attach(sw);
  sw->add_option("--axis", sw_axis, "SNR, SIGMA_A, SIGMA_P, P, N, K or SEPARATION")->required();
  sw->add_option("--values", sw_values, "comma-separated axis values")->required();
  sw->add_option("--workers", sw_workers, "worker threads")->check(CLI::PositiveNumber);
  sw->add_option("--out", sw_out, "CSV path (stdout by default)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) {
      const ScenarioConfig cfg = sim_args.load();
      const UlaConfig ula = cfg.ula();
      const TrialSeeds seeds = trial_seeds(cfg.master_seed, sim_trial);
      const SignalScene scene = draw_scene(cfg, seeds.scene);
      const GainPhaseError err = draw_errors(cfg.sigma_a, cfg.sigma_p_deg, cfg.n_antennas, seeds.errors);
      const double noise_std = snr_to_noise_std(cfg.snr_db, scene, ula, err);
      Output out(sim_out);
      write_snapshot_csv(out.get(), synthesize(scene, ula, err, noise_std, seeds.noise));
      if (!sim_truth.empty()) {
        Output t(sim_truth);
        std::vector<double> deg;
        for (Eigen::Index k = 0; k < scene.thetas().size(); ++k) deg.push_back(rad_to_deg(scene.thetas()[k]));
        t.get() << std::setprecision(12);
        write_list(t.get(), "truth_deg", deg);
        t.get() << "noise_std=" << noise_std << '\n'
                << "ce=" << compute_ce(cfg.sigma_a, cfg.sigma_p_deg, cfg.n_antennas) << '\n';
      }
    } else if (*est) {
      const SnapshotMatrix y = load_snapshot_csv(est_in);
      const UlaConfig ula(y.n_antennas(), est_spacing);
      const Method method = parse_method(est_method);
      Output out(est_out);
      out.get() << std::setprecision(12);
      if (method == Method::MUSIC || method == Method::SOMP) {
        require(est_k.has_value(), ErrorCode::InvalidArgument, "--k is required for MUSIC and SOMP");
        const GridDictionary grid(ula, est_step, est_range);
        if (method == Method::MUSIC) {
          const MusicResult r = music(y, *est_k, grid);
          write_list(out.get(), "thetas_deg", r.thetas_deg);
          out.get() << "too_few_peaks=" << (r.too_few_peaks ? "true" : "false") << '\n';
          if (!est_spectrum.empty()) save_spectrum_csv(est_spectrum, r.spectrum);
        } else {
          const SompResult r = somp(y, grid, *est_k);
          write_list(out.get(), "thetas_deg", r.thetas_deg);
          write_list(out.get(), "residual_history", r.residual_history);
        }
      } else {
        double ce = est_ce.value_or(0.0);
        if (!est_ce && (est_sigma_a || est_sigma_p))
          ce = compute_ce(est_sigma_a.value_or(0.0), est_sigma_p.value_or(0.0), y.n_antennas());
        if (method == Method::ANM) ce = 0.0;
        GpAnmParams p;
        if (est_tau) {
          p.tau = *est_tau;
        } else {
          require(est_noise.has_value(), ErrorCode::InvalidArgument, "give --tau or --noise-std");
          p.tau = method == Method::ANM
                      ? tau_simplified(y.n_antennas(), y.n_snapshots(), *est_noise, est_eta)
                      : tau(y.n_antennas(), y.n_snapshots(), *est_noise, ce, est_eta, est_t).tau;
        }
        p.ce = ce;
        if (method == Method::GPANM_L1) {
          p.variant = Variant::L1;
          p.ce = std::sqrt(static_cast<double>(y.n_antennas())) * ce;
        }
        p.k_signals = est_k;
        p.grid_step_deg = est_step;
        p.range_deg = est_range;
        p.peak_rel_threshold = est_threshold;
        const DoaEstimate e = estimate(y, p, ula);
        write_estimate(out.get(), e);
        if (!est_spectrum.empty()) save_spectrum_csv(est_spectrum, e.spectrum);
      }
    } else if (*tau_cmd) {
      double ce = tau_ce;
      if (tau_sa || tau_sp) ce = compute_ce(tau_sa.value_or(0.0), tau_sp.value_or(0.0), tau_n);
      const TauReport r = tau(tau_n, tau_p, tau_sigma, ce, tau_eta, tau_t);
      std::cout << std::setprecision(12) << "bd1=" << r.bd1 << '\n'
                << "bd2=" << r.bd2 << '\n'
                << "chosen_bound=" << to_string(r.chosen_bound) << '\n'
                << "ce=" << ce << '\n'
                << "eta=" << r.eta << '\n'
                << "t_param=" << r.t_param << '\n'
                << "tau=" << r.tau << '\n'
                << "tau_simplified=" << r.tau_simplified << '\n'
                << "reconstruction_probability=" << reconstruction_probability(tau_n, tau_p, tau_t) << '\n';
    } else if (*crlb_cmd) {
      const ScenarioConfig cfg = crlb_args.load();
      const UlaConfig ula = cfg.ula();
      const std::vector<double> deg = parse_list(crlb_thetas);
      require(!deg.empty(), ErrorCode::InvalidArgument, "--thetas is empty");
      RVector th(static_cast<Eigen::Index>(deg.size()));
      for (std::size_t i = 0; i < deg.size(); ++i) th[static_cast<Eigen::Index>(i)] = deg_to_rad(deg[i]);
      RVector g = RVector::Zero(cfg.n_antennas), phi = RVector::Zero(cfg.n_antennas);
      if (crlb_errors) {
        const GainPhaseError err =
            draw_errors(cfg.sigma_a, cfg.sigma_p_deg, cfg.n_antennas, trial_seeds(cfg.master_seed, 0).errors);
        g = err.g();
        phi = err.phi();
      }
      const CrlbScenario scn = make_crlb_scenario(ula, th, g, phi, cfg.p_snapshots, crlb_power, 1.0);
      Output out(crlb_out);
      out.get() << "snr_db,crlb_deg\n" << std::setprecision(12);
      for (const CrlbPoint& pt : crlb_curve(scn, parse_list(crlb_snr))) {
        if (pt.ok) out.get() << pt.snr_db << ',' << pt.crlb_deg << '\n';
        else std::cerr << "crlb: skipped SNR " << pt.snr_db << " dB (ill-conditioned)\n";
      }
    } else if (*run) {
      const ScenarioConfig cfg = run_args.load();
      const auto records = run_scenario(cfg, run_workers);
      Output out(run_out);
      write_trials_csv(out.get(), records);
      const auto summary = aggregate(records, cfg.methods);
      if (run_summary.empty()) {
        write_summary_csv(std::cerr, summary);
      } else {
        Output s(run_summary);
        write_summary_csv(s.get(), summary);
      }
    } else if (*sw) {
      const ScenarioConfig cfg = sw_args.load();
      const auto rows = sweep(cfg, parse_axis(sw_axis), parse_list(sw_values), sw_workers);
      Output out(sw_out);
      write_sweep_csv(out.get(), rows);
    }
  } catch (const Error& e) {
    std::cerr << "gpanm: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
