// SPDX-License-Identifier: Apache-2.0
//
// Monte Carlo runner: random scenes, one synthesized Y per trial shared by all
// methods, optimal matching of estimates to truths, RMSE aggregation and
// parameter sweeps.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gpanm/array_model.hpp"
#include "gpanm/sdp_kernel.hpp"

namespace gpanm {

enum class Method { GPANM, GPANM_L1, ANM, MUSIC, SOMP };

std::string_view to_string(Method m) noexcept;
// Case-insensitive; also accepts "gp-anm" style dashes. Raises ConfigError.
Method parse_method(std::string_view name);
std::vector<Method> parse_method_list(std::string_view csv);

enum class SweepAxis { SNR, SIGMA_A, SIGMA_P, P, N, K, SEPARATION };

std::string_view to_string(SweepAxis a) noexcept;
SweepAxis parse_axis(std::string_view name);

struct MethodParams {
  double eta = 1.0;
  double t_param = 4.0;
  double estimator_grid_step_deg = 0.1;  // GP-ANM / ANM spectrum scan
  double baseline_grid_step_deg = 0.01;  // MUSIC / SOMP dictionary
  int refine_iters = 20;
  double refine_tol = 1e-8;
  // l1 radius used by GPANM_L1 is l1_ce_scale * C_e; sqrt(N) when unset.
  std::optional<double> l1_ce_scale;
  sdp::SolverOptions solver;
};

struct ScenarioConfig {
  int n_antennas = 10;
  double spacing_ratio = 0.5;
  int k_signals = 3;
  int p_snapshots = 5;
  double snr_db = 20.0;
  double sigma_a = 0.15;
  double sigma_p_deg = 10.0;
  double theta_lo_deg = -70.0;
  double theta_hi_deg = 70.0;
  double min_separation_deg = 10.0;
  int n_trials = 100;
  std::uint64_t master_seed = 1;
  std::vector<Method> methods{Method::GPANM, Method::ANM, Method::MUSIC, Method::SOMP};
  MethodParams params;

  UlaConfig ula() const { return UlaConfig(n_antennas, spacing_ratio); }
  // Half-width of the detection range; also the missed-detection penalty.
  double range_half_width() const;
  // Raises ConfigError on infeasible or out-of-range settings.
  void validate() const;
};

// Flat key=value text, '#' comments, blank lines ignored. Unknown keys and
// unparsable values raise ConfigError.
ScenarioConfig parse_config(std::istream& is);
ScenarioConfig load_config(const std::string& path);
// Writes every key so the output parses back to the same configuration.
void write_config(std::ostream& os, const ScenarioConfig& cfg);
// Applies one key=value override.
void set_config_value(ScenarioConfig& cfg, const std::string& key, const std::string& value);

struct TrialSeeds {
  std::uint64_t trial;
  std::uint64_t scene;
  std::uint64_t errors;
  std::uint64_t noise;
};

TrialSeeds trial_seeds(std::uint64_t master_seed, int trial_id);

// K uniform angles with pairwise gaps >= min_separation_deg (rejection, at most
// 1e4 attempts, else SeparationInfeasible) and unit-power circular Gaussian
// amplitudes.
SignalScene draw_scene(const ScenarioConfig& cfg, std::uint64_t scene_seed);

struct MatchResult {
  double rmse_deg = 0.0;         // sqrt(squared_err_sum / K)
  double squared_err_sum = 0.0;  // deg^2, misses included
  std::vector<int> assignment;   // estimate index per truth, -1 for a miss
  int n_missed = 0;
};

// Minimum-cost one-to-one pairing, exhaustive. Truths left without an estimate
// cost penalty_deg^2 each.
MatchResult matched_rmse(const std::vector<double>& truth_deg, const std::vector<double>& est_deg,
                         double penalty_deg = 70.0);

struct TrialRecord {
  int trial_id = 0;
  Method method = Method::GPANM;
  std::vector<double> truth_deg;
  std::vector<double> estimate_deg;
  double squared_err_sum = 0.0;
  int n_missed = 0;
  double wall_time_s = 0.0;
  std::string status = "ok";  // "ok", or the error code name of a failed run
  std::uint64_t snapshot_hash = 0;

  bool failed() const noexcept { return status != "ok" || n_missed > 0; }
};

// Runs every configured method on the same data per trial. Trials run on up to
// `workers` threads; the result is sorted by (trial_id, method order).
std::vector<TrialRecord> run_scenario(const ScenarioConfig& cfg, int workers = 1);

struct MethodSummary {
  Method method = Method::GPANM;
  int n_trials = 0;
  double rmse_deg = 0.0;   // sqrt(sum of squared errors / (K N_mc))
  double mse_deg2 = 0.0;   // sum of squared errors / (K N_mc)
  double median_trial_rmse_deg = 0.0;
  double mean_wall_time_s = 0.0;
  double failure_rate = 0.0;
};

std::vector<MethodSummary> aggregate(const std::vector<TrialRecord>& records,
                                     const std::vector<Method>& methods);

struct SweepRow {
  double axis_value = 0.0;
  MethodSummary summary;
};

// One run_scenario per value with the axis field overridden.
std::vector<SweepRow> sweep(const ScenarioConfig& cfg, SweepAxis axis, const std::vector<double>& values,
                            int workers = 1);
ScenarioConfig with_axis(ScenarioConfig cfg, SweepAxis axis, double value);

// trial_id,method,truth_deg,estimate_deg,squared_err_sum,rmse_deg,n_missed,status,snapshot_hash,wall_time_s
void write_trials_csv(std::ostream& os, const std::vector<TrialRecord>& records);
// axis_value,method,rmse_deg,mse_deg2,mean_wall_time_s,failure_rate
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);
// method,n_trials,rmse_deg,mse_deg2,median_trial_rmse_deg,mean_wall_time_s,failure_rate
void write_summary_csv(std::ostream& os, const std::vector<MethodSummary>& rows);

}  // namespace gpanm
