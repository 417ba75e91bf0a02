// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "gpanm/errors.hpp"
#include "gpanm/harness.hpp"

using namespace gpanm;

namespace {

const std::vector<double> kTruth{-56.8889, -7.6806, 5.9595};

ScenarioConfig small_config() {
  ScenarioConfig c;
  c.n_antennas = 6;
  c.p_snapshots = 3;
  c.k_signals = 2;
  c.n_trials = 4;
  c.master_seed = 17;
  c.methods = {Method::GPANM, Method::ANM, Method::MUSIC, Method::SOMP};
  c.params.estimator_grid_step_deg = 0.5;
  c.params.baseline_grid_step_deg = 0.1;
  return c;
}

// Drops the trailing wall-time column.
std::string without_wall_time(const std::string& csv) {
  std::istringstream is(csv);
  std::string line, out;
  while (std::getline(is, line)) out += line.substr(0, line.rfind(',')) + '\n';
  return out;
}

}  // namespace

TEST(TrialSeeds, DeterministicAndDistinct) {
  const TrialSeeds a = trial_seeds(1, 0), b = trial_seeds(1, 0), c = trial_seeds(1, 1), d = trial_seeds(2, 0);
  EXPECT_EQ(a.trial, b.trial);
  EXPECT_EQ(a.noise, b.noise);
  EXPECT_NE(a.trial, c.trial);
  EXPECT_NE(a.trial, d.trial);
  EXPECT_NE(a.scene, a.errors);
  EXPECT_NE(a.errors, a.noise);
}

TEST(DrawScene, SeparationHoldsOverManySeeds) {
  ScenarioConfig cfg;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    const SignalScene sc = draw_scene(cfg, s);
    ASSERT_EQ(sc.n_signals(), 3);
    for (int i = 0; i < 3; ++i) {
      const double deg = rad_to_deg(sc.thetas()[i]);
      EXPECT_GE(deg, -70.0);
      EXPECT_LE(deg, 70.0);
      if (i > 0) EXPECT_GE(deg - rad_to_deg(sc.thetas()[i - 1]), 10.0 - 1e-9);
    }
  }
  const SignalScene x = draw_scene(cfg, 5), y = draw_scene(cfg, 5);
  EXPECT_EQ(x.thetas(), y.thetas());
  EXPECT_EQ(x.amplitudes(), y.amplitudes());
}

TEST(DrawScene, UnitPowerAmplitudes) {
  ScenarioConfig cfg;
  cfg.p_snapshots = 200;
  double sum = 0.0;
  for (std::uint64_t s = 0; s < 50; ++s) sum += draw_scene(cfg, s).amplitudes().squaredNorm();
  EXPECT_NEAR(sum / (50.0 * 3 * 200), 1.0, 0.02);
}

TEST(DrawScene, ImpossibleSeparation) {
  ScenarioConfig cfg;
  cfg.k_signals = 6;
  cfg.min_separation_deg = 30.0;
  try {
    draw_scene(cfg, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SeparationInfeasible);
  }
}

TEST(MatchedRmse, Basics) {
  EXPECT_EQ(matched_rmse(kTruth, kTruth).rmse_deg, 0.0);
  const MatchResult p = matched_rmse(kTruth, {5.9595, -56.8889, -7.6806});
  EXPECT_EQ(p.rmse_deg, 0.0);
  EXPECT_EQ(p.assignment, (std::vector<int>{1, 2, 0}));
  const MatchResult miss = matched_rmse({0.0, 20.0}, {1.0});
  EXPECT_EQ(miss.n_missed, 1);
  EXPECT_NEAR(miss.squared_err_sum, 1.0 + 70.0 * 70.0, 1e-12);
  const MatchResult none = matched_rmse({0.0, 20.0}, {}, 50.0);
  EXPECT_EQ(none.n_missed, 2);
  EXPECT_NEAR(none.squared_err_sum, 2 * 2500.0, 1e-12);
  // Surplus estimates are ignored, the nearest ones are used.
  EXPECT_NEAR(matched_rmse({10.0}, {-30.0, 10.5, 60.0}).squared_err_sum, 0.25, 1e-12);
  EXPECT_THROW(matched_rmse({}, {1.0}), Error);
}

TEST(MatchedRmse, ReferenceAngleRowsUnderMseReading) {
  auto mse = [](std::vector<double> est) { return matched_rmse(kTruth, est).squared_err_sum / 3.0; };
  EXPECT_NEAR(mse({-56.4900, -7.6020, 6.0900}), 0.06076, 1e-4);
  EXPECT_NEAR(mse({-56.3640, -8.2460, 5.7400}), 0.2144, 1e-3);
  EXPECT_NEAR(mse({-56.6860, -7.6300, 5.9640}), 0.01458, 1e-4);
  EXPECT_NEAR(mse({-56.0000, -7.0000, 5.6000}), 0.4608, 1e-3);
}

TEST(MatchedRmse, JointPermutationSymmetry) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-70.0, 70.0);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> truth(4), est(3);
    for (double& x : truth) x = u(rng);
    for (double& x : est) x = u(rng);
    const double base = matched_rmse(truth, est).squared_err_sum;
    std::shuffle(truth.begin(), truth.end(), rng);
    std::shuffle(est.begin(), est.end(), rng);
    EXPECT_NEAR(matched_rmse(truth, est).squared_err_sum, base, 1e-9);
  }
}

TEST(MatchedRmse, AgreesWithBruteForce) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-70.0, 70.0);
  for (int t = 0; t < 30; ++t) {
    std::vector<double> truth(3), est(3);
    for (double& x : truth) x = u(rng);
    for (double& x : est) x = u(rng);
    std::vector<int> perm{0, 1, 2};
    double best = 1e300;
    do {
      double c = 0.0;
      for (int i = 0; i < 3; ++i) c += std::pow(truth[i] - est[perm[i]], 2);
      best = std::min(best, c);
    } while (std::next_permutation(perm.begin(), perm.end()));
    EXPECT_NEAR(matched_rmse(truth, est).squared_err_sum, best, 1e-9);
  }
}

TEST(RunScenario, DeterministicSharedDataAndOrdering) {
  const ScenarioConfig cfg = small_config();
  const auto a = run_scenario(cfg, 1);
  const auto b = run_scenario(cfg, 3);
  ASSERT_EQ(a.size(), 16u);
  std::ostringstream sa, sb;
  write_trials_csv(sa, a);
  write_trials_csv(sb, b);
  EXPECT_EQ(without_wall_time(sa.str()), without_wall_time(sb.str()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].trial_id, static_cast<int>(i / 4));
    EXPECT_EQ(a[i].method, cfg.methods[i % 4]);
    EXPECT_EQ(a[i].snapshot_hash, a[i - i % 4].snapshot_hash);
    EXPECT_EQ(a[i].truth_deg, a[i - i % 4].truth_deg);
  }
  EXPECT_NE(a[0].snapshot_hash, a[4].snapshot_hash);
}

TEST(RunScenario, FailuresAreRecorded) {
  ScenarioConfig cfg = small_config();
  cfg.n_trials = 2;
  cfg.methods = {Method::MUSIC};
  cfg.k_signals = 6;
  cfg.n_antennas = 7;
  cfg.min_separation_deg = 26.0;  // just infeasible most of the time
  const auto recs = run_scenario(cfg, 1);
  ASSERT_EQ(recs.size(), 2u);
  for (const auto& r : recs) {
    if (r.status != "ok") {
      EXPECT_TRUE(r.failed());
      EXPECT_EQ(r.n_missed, 6);
    }
  }
}

TEST(Aggregate, PooledIdentity) {
  const ScenarioConfig cfg = small_config();
  const auto recs = run_scenario(cfg, 1);
  const auto sum = aggregate(recs, cfg.methods);
  ASSERT_EQ(sum.size(), 4u);
  for (const auto& s : sum) {
    double sq = 0.0;
    for (const auto& r : recs)
      if (r.method == s.method) sq += r.squared_err_sum;
    EXPECT_NEAR(s.mse_deg2, sq / (cfg.k_signals * cfg.n_trials), 1e-12);
    EXPECT_NEAR(s.rmse_deg, std::sqrt(s.mse_deg2), 1e-12);
    EXPECT_EQ(s.n_trials, cfg.n_trials);
    EXPECT_GE(s.failure_rate, 0.0);
    EXPECT_LE(s.failure_rate, 1.0);
  }
}

TEST(Sweep, RowCountAndSingleValueEquivalence) {
  ScenarioConfig cfg = small_config();
  cfg.n_trials = 2;
  cfg.methods = {Method::MUSIC, Method::SOMP};
  const auto rows = sweep(cfg, SweepAxis::SNR, {0.0, 10.0, 20.0});
  EXPECT_EQ(rows.size(), 6u);
  const auto one = sweep(cfg, SweepAxis::SNR, {cfg.snr_db});
  const auto agg = aggregate(run_scenario(cfg), cfg.methods);
  ASSERT_EQ(one.size(), agg.size());
  for (std::size_t i = 0; i < agg.size(); ++i) {
    EXPECT_EQ(one[i].summary.method, agg[i].method);
    EXPECT_EQ(one[i].summary.mse_deg2, agg[i].mse_deg2);
  }
  EXPECT_THROW(sweep(cfg, SweepAxis::N, {6.5}), Error);
  EXPECT_THROW(sweep(cfg, SweepAxis::SNR, {}), Error);
  std::ostringstream os;
  write_sweep_csv(os, rows);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "axis_value,method,rmse_deg,mse_deg2,mean_wall_time_s,failure_rate");
}

TEST(Config, RoundTripAndErrors) {
  ScenarioConfig cfg = small_config();
  cfg.sigma_p_deg = 7.5;
  cfg.methods = {Method::GPANM_L1, Method::MUSIC};
  cfg.params.l1_ce_scale = 2.0;
  std::stringstream ss;
  write_config(ss, cfg);
  const ScenarioConfig back = parse_config(ss);
  std::ostringstream a, b;
  write_config(a, cfg);
  write_config(b, back);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(back.methods, cfg.methods);
  EXPECT_EQ(back.sigma_p_deg, 7.5);

  std::istringstream bad("n_antennas = 10\nbogus_key = 3\n");
  try {
    parse_config(bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ConfigError);
  }
  std::istringstream badval("snr_db = loud\n");
  EXPECT_THROW(parse_config(badval), Error);
  std::istringstream commented("# comment\n\nsnr_db = 5 # trailing\n");
  EXPECT_EQ(parse_config(commented).snr_db, 5.0);
}

TEST(Config, MethodNames) {
  EXPECT_EQ(parse_method("gp-anm"), Method::GPANM);
  EXPECT_EQ(parse_method("GPANM_L1"), Method::GPANM_L1);
  EXPECT_EQ(parse_method_list("music,somp"), (std::vector<Method>{Method::MUSIC, Method::SOMP}));
  EXPECT_THROW(parse_method("sbl"), Error);
  EXPECT_EQ(parse_axis("sigma_a"), SweepAxis::SIGMA_A);
}
