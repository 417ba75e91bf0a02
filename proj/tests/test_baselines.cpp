// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <random>
#include <set>

#include "gpanm/baselines.hpp"
#include "gpanm/errors.hpp"
#include "support.hpp"

using namespace gpanm;
using gpanm::testing::random_instance;

namespace {

SnapshotMatrix two_source_data(const UlaConfig& cfg, double a_deg, double b_deg, int p, std::uint64_t seed) {
  RVector th(2);
  th << deg_to_rad(a_deg), deg_to_rad(b_deg);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  CMatrix s(2, p);
  for (Eigen::Index i = 0; i < s.size(); ++i) s.data()[i] = cdouble(nd(rng), nd(rng));
  return synthesize(SignalScene(th, s), cfg, GainPhaseError::none(cfg.n_antennas()), 0.0, 0);
}

}  // namespace

TEST(GridDictionary, AtomsAreSteeringVectors) {
  const UlaConfig cfg(6);
  const GridDictionary g(cfg, 0.5, 10.0);
  EXPECT_EQ(g.size(), 41);
  for (int i = 0; i < g.size(); i += 7)
    EXPECT_LT((g.atoms().col(i) - steering_vector(deg_to_rad(g.angles_deg()[i]), cfg)).norm(), 1e-14);
  EXPECT_THROW(GridDictionary(cfg, std::vector<double>{1.0, 0.5}), Error);
}

TEST(Music, OnGridSourcesRecoveredExactly) {
  const UlaConfig cfg(10);
  const GridDictionary grid(cfg, 0.01, 70.0);
  const SnapshotMatrix y = two_source_data(cfg, -23.41, 31.07, 6, 3);
  const MusicResult r = music(y, 2, grid);
  ASSERT_EQ(r.thetas_deg.size(), 2u);
  EXPECT_NEAR(r.thetas_deg[0], -23.41, 1e-9);
  EXPECT_NEAR(r.thetas_deg[1], 31.07, 1e-9);
  EXPECT_FALSE(r.too_few_peaks);
}

TEST(Music, ScaleInvariantAndPsdCovariance) {
  const auto inst = random_instance(8, 4, 2, 7);
  const GridDictionary grid(inst.config, 0.1, 70.0);
  const MusicResult a = music(inst.y, 2, grid);
  const MusicResult b = music(SnapshotMatrix(cdouble(0.0, 3.7) * inst.y.data()), 2, grid);
  ASSERT_EQ(a.thetas_deg.size(), b.thetas_deg.size());
  for (std::size_t i = 0; i < a.thetas_deg.size(); ++i) EXPECT_NEAR(a.thetas_deg[i], b.thetas_deg[i], 1e-9);
  for (int i = 0; i < inst.y.n_antennas(); ++i) EXPECT_GE(a.eigenvalues[i], -1e-10);
  EXPECT_TRUE(std::is_sorted(a.eigenvalues.begin(), a.eigenvalues.end()));
}

TEST(Music, RejectsBadModelOrder) {
  const auto inst = random_instance(6, 3, 1, 8);
  const GridDictionary grid(inst.config, 1.0, 90.0);
  for (int k : {0, 6, 7}) {
    try {
      music(inst.y, k, grid);
      FAIL() << k;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::RankError);
    }
  }
}

TEST(Somp, SingleAtomInOneStep) {
  const UlaConfig cfg(8);
  const GridDictionary grid(cfg, 0.5, 60.0);
  const CMatrix y = grid.atoms().col(37) * CMatrix::Constant(1, 3, cdouble(2.0, -1.0));
  const SompResult r = somp(SnapshotMatrix(y), grid, 1);
  ASSERT_EQ(r.indices.size(), 1u);
  EXPECT_EQ(r.indices[0], 37);
  EXPECT_EQ(r.thetas_deg[0], grid.angles_deg()[37]);
  EXPECT_LT(r.residual_history.back(), 1e-12);
}

TEST(Somp, DistinctPicksAndDecreasingResidual) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto inst = random_instance(10, 5, 3, 20 + seed);
    const GridDictionary grid(inst.config, 0.1, 70.0);
    const SompResult r = somp(inst.y, grid, 3);
    EXPECT_EQ(std::set<int>(r.indices.begin(), r.indices.end()).size(), 3u);
    ASSERT_EQ(r.residual_history.size(), 4u);
    for (std::size_t i = 1; i < r.residual_history.size(); ++i)
      EXPECT_LT(r.residual_history[i], r.residual_history[i - 1]);
    EXPECT_TRUE(std::is_sorted(r.thetas_deg.begin(), r.thetas_deg.end()));
  }
}

TEST(Somp, OrthogonalAtomsRecoveredExactly) {
  // Atoms spaced 0.2 in sin(theta) are orthogonal for N = 10; the grid also holds
  // the in-between atoms so there are near neighbours to reject.
  const UlaConfig cfg(10);
  std::vector<double> angles;
  for (int i = -9; i <= 9; ++i) angles.push_back(rad_to_deg(std::asin(0.1 * i)));
  const GridDictionary grid(cfg, angles);
  const SnapshotMatrix y = two_source_data(cfg, angles[3], angles[11], 5, 11);  // sin = -0.6, 0.2
  const SompResult r = somp(y, grid, 2);
  EXPECT_NEAR(r.thetas_deg[0], angles[3], 1e-12);
  EXPECT_NEAR(r.thetas_deg[1], angles[11], 1e-12);
  EXPECT_LT(r.residual_history.back(), 1e-9);
}

TEST(Anm, IsGpAnmWithoutErrorTerm) {
  const auto inst = random_instance(6, 3, 1, 30);
  GpAnmParams base;
  base.grid_step_deg = 0.5;
  base.k_signals = 1;
  base.ce = 0.9;  // overridden
  const DoaEstimate a = anm_estimate(inst.y, 3.0, inst.config, base);
  base.ce = 0.0;
  base.tau = 3.0;
  const DoaEstimate b = estimate(inst.y, base, inst.config);
  EXPECT_EQ(a.thetas_deg, b.thetas_deg);
  EXPECT_EQ(a.dual.kappa, 0.0);
  EXPECT_EQ(a.diagnostics.objective, b.diagnostics.objective);
}
