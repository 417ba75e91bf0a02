// SPDX-License-Identifier: Apache-2.0
#include "gpanm/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include "gpanm/baselines.hpp"
#include "gpanm/errors.hpp"
#include "gpanm/estimator.hpp"
#include "gpanm/random.hpp"
#include "gpanm/regularization.hpp"

namespace gpanm {

namespace {

constexpr int kMaxSceneAttempts = 10'000;

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void dfs_match(const std::vector<double>& truth, const std::vector<double>& est, std::size_t ti,
               int matches_left, std::vector<bool>& used, std::vector<int>& cur, double cost,
               double penalty2, double& best_cost, std::vector<int>& best) {
  if (cost >= best_cost) return;
  if (ti == truth.size()) {
    if (matches_left == 0) {
      best_cost = cost;
      best = cur;
    }
    return;
  }
  const auto remaining = static_cast<int>(truth.size() - ti);
  if (matches_left > 0) {
    for (std::size_t j = 0; j < est.size(); ++j) {
      if (used[j]) continue;
      used[j] = true;
      cur[ti] = static_cast<int>(j);
      const double d = truth[ti] - est[j];
      dfs_match(truth, est, ti + 1, matches_left - 1, used, cur, cost + d * d, penalty2, best_cost, best);
      used[j] = false;
    }
  }
  if (remaining > matches_left) {
    cur[ti] = -1;
    dfs_match(truth, est, ti + 1, matches_left, used, cur, cost + penalty2, penalty2, best_cost, best);
  }
}

TrialRecord run_method(Method method, const ScenarioConfig& cfg, const UlaConfig& ula, const SignalScene& scene,
                       const SnapshotMatrix& y, double noise_std, const GridDictionary* grid) {
  TrialRecord rec;
  rec.method = method;
  rec.snapshot_hash = y.content_hash();
  for (Eigen::Index k = 0; k < scene.thetas().size(); ++k) rec.truth_deg.push_back(rad_to_deg(scene.thetas()[k]));

  const MethodParams& mp = cfg.params;
  const int n = cfg.n_antennas;
  const int p = cfg.p_snapshots;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    GpAnmParams gp;
    gp.k_signals = cfg.k_signals;
    gp.grid_step_deg = mp.estimator_grid_step_deg;
    // The dual polynomial is scanned over the whole field of view so that a
    // source near the edge of the detection range is still an interior maximum.
    gp.range_deg = 90.0;
    gp.refine_iters = mp.refine_iters;
    gp.refine_tol = mp.refine_tol;
    gp.solver = mp.solver;
    const double ce = compute_ce(cfg.sigma_a, cfg.sigma_p_deg, n);
    switch (method) {
      case Method::GPANM:
      case Method::GPANM_L1: {
        // Both variants use the l2 radius in tau.
        gp.tau = tau(n, p, noise_std, ce, mp.eta, mp.t_param).tau;
        if (method == Method::GPANM) {
          gp.ce = ce;
        } else {
          gp.variant = Variant::L1;
          gp.ce = mp.l1_ce_scale.value_or(std::sqrt(static_cast<double>(n))) * ce;
        }
        rec.estimate_deg = estimate(y, gp, ula).thetas_deg;
        break;
      }
      case Method::ANM:
        rec.estimate_deg = anm_estimate(y, tau_simplified(n, p, noise_std, mp.eta), ula, gp).thetas_deg;
        break;
      case Method::MUSIC:
        rec.estimate_deg = music(y, cfg.k_signals, *grid).thetas_deg;
        break;
      case Method::SOMP:
        rec.estimate_deg = somp(y, *grid, cfg.k_signals).thetas_deg;
        break;
    }
  } catch (const Error& e) {
    rec.status = std::string(to_string(e.code()));
    rec.estimate_deg.clear();
  }
  rec.wall_time_s = elapsed(t0);
  const MatchResult m = matched_rmse(rec.truth_deg, rec.estimate_deg, cfg.range_half_width());
  rec.squared_err_sum = m.squared_err_sum;
  rec.n_missed = m.n_missed;
  return rec;
}

int method_rank(Method m, const std::vector<Method>& order) {
  return static_cast<int>(std::find(order.begin(), order.end(), m) - order.begin());
}

std::string join(const std::vector<double>& v) {
  std::ostringstream ss;
  ss << std::setprecision(10);
  for (std::size_t i = 0; i < v.size(); ++i) ss << (i ? ";" : "") << v[i];
  return ss.str();
}

}  // namespace

TrialSeeds trial_seeds(std::uint64_t master_seed, int trial_id) {
  const std::uint64_t t = mix_seed(master_seed, static_cast<std::uint64_t>(trial_id));
  return {t, mix_seed(t, 1), mix_seed(t, 2), mix_seed(t, 3)};
}

SignalScene draw_scene(const ScenarioConfig& cfg, std::uint64_t scene_seed) {
  const int k = cfg.k_signals;
  require(k >= 1, ErrorCode::InvalidArgument, "scene needs at least one signal");
  Rng rng(scene_seed);
  std::uniform_real_distribution<double> uni(cfg.theta_lo_deg, cfg.theta_hi_deg);
  std::vector<double> ang(static_cast<std::size_t>(k));
  bool ok = false;
  for (int attempt = 0; attempt < kMaxSceneAttempts && !ok; ++attempt) {
    for (double& a : ang) a = uni(rng);
    std::sort(ang.begin(), ang.end());
    ok = true;
    for (std::size_t i = 1; i < ang.size(); ++i)
      if (ang[i] - ang[i - 1] < cfg.min_separation_deg) ok = false;
  }
  require(ok, ErrorCode::SeparationInfeasible,
          "no scene with the requested separation after 10000 attempts");
  RVector th(k);
  for (int i = 0; i < k; ++i) th[i] = deg_to_rad(ang[static_cast<std::size_t>(i)]);
  std::normal_distribution<double> unit(0.0, 1.0);
  CMatrix s(k, cfg.p_snapshots);
  for (Eigen::Index c = 0; c < s.cols(); ++c) {
    for (Eigen::Index r = 0; r < s.rows(); ++r) {
      const double re = unit(rng);
      const double im = unit(rng);
      s(r, c) = cdouble(re, im) / std::numbers::sqrt2;
    }
  }
  return SignalScene(std::move(th), std::move(s));
}

MatchResult matched_rmse(const std::vector<double>& truth_deg, const std::vector<double>& est_deg,
                         double penalty_deg) {
  require(!truth_deg.empty(), ErrorCode::InvalidArgument, "matched_rmse needs at least one truth");
  require(truth_deg.size() <= 10 && est_deg.size() <= 10, ErrorCode::InvalidArgument,
          "exhaustive matching supports at most 10 angles");
  MatchResult r;
  const int matches = static_cast<int>(std::min(truth_deg.size(), est_deg.size()));
  std::vector<bool> used(est_deg.size(), false);
  std::vector<int> cur(truth_deg.size(), -1);
  double best_cost = std::numeric_limits<double>::infinity();
  r.assignment.assign(truth_deg.size(), -1);
  dfs_match(truth_deg, est_deg, 0, matches, used, cur, 0.0, penalty_deg * penalty_deg, best_cost, r.assignment);
  r.squared_err_sum = best_cost;
  r.n_missed = static_cast<int>(std::count(r.assignment.begin(), r.assignment.end(), -1));
  r.rmse_deg = std::sqrt(best_cost / static_cast<double>(truth_deg.size()));
  return r;
}

std::vector<TrialRecord> run_scenario(const ScenarioConfig& cfg, int workers) {
  cfg.validate();
  require(workers >= 1, ErrorCode::InvalidArgument, "workers must be at least 1");
  const UlaConfig ula = cfg.ula();
  const bool needs_grid = std::any_of(cfg.methods.begin(), cfg.methods.end(),
                                      [](Method m) { return m == Method::MUSIC || m == Method::SOMP; });
  std::optional<GridDictionary> grid;
  // Baselines search the same full field of view as the dual polynomial.
  if (needs_grid) grid.emplace(ula, cfg.params.baseline_grid_step_deg, 90.0);
  const GridDictionary* gptr = grid ? &*grid : nullptr;

  std::vector<std::vector<TrialRecord>> per_trial(static_cast<std::size_t>(cfg.n_trials));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int t = next++; t < cfg.n_trials; t = next++) {
      const TrialSeeds seeds = trial_seeds(cfg.master_seed, t);
      auto& out = per_trial[static_cast<std::size_t>(t)];
      try {
        const SignalScene scene = draw_scene(cfg, seeds.scene);
        const GainPhaseError err = draw_errors(cfg.sigma_a, cfg.sigma_p_deg, cfg.n_antennas, seeds.errors);
        const double noise_std = snr_to_noise_std(cfg.snr_db, scene, ula, err);
        const SnapshotMatrix y = synthesize(scene, ula, err, noise_std, seeds.noise);
        for (Method m : cfg.methods) {
          TrialRecord rec = run_method(m, cfg, ula, scene, y, noise_std, gptr);
          rec.trial_id = t;
          out.push_back(std::move(rec));
        }
      } catch (const Error& e) {
        // Synthesis failed before any method ran.
        for (Method m : cfg.methods) {
          TrialRecord rec;
          rec.trial_id = t;
          rec.method = m;
          rec.status = std::string(to_string(e.code()));
          rec.n_missed = cfg.k_signals;
          const double pen = cfg.range_half_width();
          rec.squared_err_sum = cfg.k_signals * pen * pen;
          out.push_back(std::move(rec));
        }
      }
    }
  };
  const int n_threads = std::min(workers, cfg.n_trials);
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::vector<TrialRecord> all;
  for (auto& v : per_trial)
    for (auto& r : v) all.push_back(std::move(r));
  std::stable_sort(all.begin(), all.end(), [&](const TrialRecord& a, const TrialRecord& b) {
    if (a.trial_id != b.trial_id) return a.trial_id < b.trial_id;
    return method_rank(a.method, cfg.methods) < method_rank(b.method, cfg.methods);
  });
  return all;
}

std::vector<MethodSummary> aggregate(const std::vector<TrialRecord>& records, const std::vector<Method>& methods) {
  std::vector<MethodSummary> out;
  for (Method m : methods) {
    MethodSummary s;
    s.method = m;
    double sq = 0.0, time = 0.0, n_truth = 0.0;
    int failures = 0;
    std::vector<double> per_trial;
    for (const auto& r : records) {
      if (r.method != m) continue;
      ++s.n_trials;
      sq += r.squared_err_sum;
      n_truth += static_cast<double>(r.truth_deg.empty() ? 1 : r.truth_deg.size());
      time += r.wall_time_s;
      if (r.failed()) ++failures;
      per_trial.push_back(std::sqrt(r.squared_err_sum / static_cast<double>(r.truth_deg.empty() ? 1 : r.truth_deg.size())));
    }
    if (s.n_trials > 0) {
      s.mse_deg2 = sq / n_truth;
      s.rmse_deg = std::sqrt(s.mse_deg2);
      s.mean_wall_time_s = time / s.n_trials;
      s.failure_rate = static_cast<double>(failures) / s.n_trials;
      std::sort(per_trial.begin(), per_trial.end());
      const std::size_t h = per_trial.size() / 2;
      s.median_trial_rmse_deg = per_trial.size() % 2 ? per_trial[h] : 0.5 * (per_trial[h - 1] + per_trial[h]);
    }
    out.push_back(s);
  }
  return out;
}

ScenarioConfig with_axis(ScenarioConfig cfg, SweepAxis axis, double value) {
  auto as_int = [value](const char* name) {
    const double r = std::round(value);
    require(std::abs(r - value) < 1e-9, ErrorCode::ConfigError,
            std::string(name) + " sweep values must be integers");
    return static_cast<int>(r);
  };
  switch (axis) {
    case SweepAxis::SNR: cfg.snr_db = value; break;
    case SweepAxis::SIGMA_A: cfg.sigma_a = value; break;
    case SweepAxis::SIGMA_P: cfg.sigma_p_deg = value; break;
    case SweepAxis::P: cfg.p_snapshots = as_int("P"); break;
    case SweepAxis::N: cfg.n_antennas = as_int("N"); break;
    case SweepAxis::K: cfg.k_signals = as_int("K"); break;
    case SweepAxis::SEPARATION: cfg.min_separation_deg = value; break;
  }
  return cfg;
}

std::vector<SweepRow> sweep(const ScenarioConfig& cfg, SweepAxis axis, const std::vector<double>& values,
                            int workers) {
  require(!values.empty(), ErrorCode::InvalidArgument, "sweep needs at least one value");
  std::vector<SweepRow> rows;
  for (double v : values) {
    const ScenarioConfig c = with_axis(cfg, axis, v);
    const auto recs = run_scenario(c, workers);
    for (const auto& s : aggregate(recs, c.methods)) rows.push_back({v, s});
  }
  return rows;
}

void write_trials_csv(std::ostream& os, const std::vector<TrialRecord>& records) {
  os << "trial_id,method,truth_deg,estimate_deg,squared_err_sum,rmse_deg,n_missed,status,snapshot_hash,wall_time_s\n";
  os << std::setprecision(10);
  for (const auto& r : records) {
    const double k = static_cast<double>(r.truth_deg.empty() ? 1 : r.truth_deg.size());
    os << r.trial_id << ',' << to_string(r.method) << ',' << join(r.truth_deg) << ',' << join(r.estimate_deg)
       << ',' << r.squared_err_sum << ',' << std::sqrt(r.squared_err_sum / k) << ',' << r.n_missed << ','
       << r.status << ',' << std::hex << std::setw(16) << std::setfill('0') << r.snapshot_hash << std::dec
       << std::setfill(' ') << ',' << r.wall_time_s << '\n';
  }
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "axis_value,method,rmse_deg,mse_deg2,mean_wall_time_s,failure_rate\n";
  os << std::setprecision(10);
  for (const auto& r : rows) {
    os << r.axis_value << ',' << to_string(r.summary.method) << ',' << r.summary.rmse_deg << ','
       << r.summary.mse_deg2 << ',' << r.summary.mean_wall_time_s << ',' << r.summary.failure_rate << '\n';
  }
}

void write_summary_csv(std::ostream& os, const std::vector<MethodSummary>& rows) {
  os << "method,n_trials,rmse_deg,mse_deg2,median_trial_rmse_deg,mean_wall_time_s,failure_rate\n";
  os << std::setprecision(10);
  for (const auto& s : rows) {
    os << to_string(s.method) << ',' << s.n_trials << ',' << s.rmse_deg << ',' << s.mse_deg2 << ','
       << s.median_trial_rmse_deg << ',' << s.mean_wall_time_s << ',' << s.failure_rate << '\n';
  }
}

}  // namespace gpanm
