// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "gpanm/array_model.hpp"
#include "gpanm/errors.hpp"

using namespace gpanm;

namespace {

constexpr double kPi = std::numbers::pi;

SignalScene one_source(double theta, int p = 1, cdouble amp = 1.0) {
  RVector th(1);
  th << theta;
  CMatrix s = CMatrix::Constant(1, p, amp);
  return SignalScene(th, s);
}

}  // namespace

TEST(UlaConfig, DerivesXi) {
  UlaConfig c(8, 0.5);
  EXPECT_EQ(c.n_antennas(), 8);
  EXPECT_EQ(c.xi(), 2.0 * kPi * 0.5);
  EXPECT_THROW(UlaConfig(1), Error);
  EXPECT_THROW(UlaConfig(4, 0.0), Error);
}

TEST(SteeringVector, BroadsideIsAllOnes) {
  const CVector a = steering_vector(0.0, UlaConfig(4));
  for (int i = 0; i < 4; ++i) EXPECT_EQ(a[i], cdouble(1.0, 0.0));
}

TEST(SteeringVector, ThirtyDegreesWithXiPi) {
  // xi = pi with d = lambda / 2; sin 30 deg = 1/2 gives quarter-turn steps.
  const CVector a = steering_vector(kPi / 6.0, UlaConfig(3, 0.5));
  EXPECT_NEAR(std::abs(a[0] - cdouble(1, 0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(a[1] - cdouble(0, 1)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(a[2] - cdouble(-1, 0)), 0.0, 1e-15);
}

TEST(SteeringVector, NormIsN) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-kPi / 2, kPi / 2);
  for (int t = 0; t < 100; ++t) {
    const CVector a = steering_vector(u(rng), UlaConfig(7));
    EXPECT_NEAR(a.squaredNorm(), 7.0, 1e-12);
    EXPECT_EQ(a[0], cdouble(1.0, 0.0));
  }
}

TEST(SteeringDerivative, EndfireIsZero) {
  const CVector d = steering_derivative(kPi / 2, UlaConfig(5));
  EXPECT_LT(d.norm(), 1e-13);
}

TEST(SteeringDerivative, BroadsideHandValue) {
  const CVector d = steering_derivative(0.0, UlaConfig(3, 0.5));
  EXPECT_NEAR(std::abs(d[0]), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(d[1] - cdouble(0, kPi)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(d[2] - cdouble(0, 2 * kPi)), 0.0, 1e-14);
}

TEST(SteeringDerivative, MatchesCentralDifference) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.4, 1.4);
  const UlaConfig cfg(9, 0.5);
  const double h = 1e-6;
  for (int t = 0; t < 100; ++t) {
    const double th = u(rng);
    const CVector fd = (steering_vector(th + h, cfg) - steering_vector(th - h, cfg)) / (2 * h);
    const CVector an = steering_derivative(th, cfg);
    EXPECT_LT((fd - an).norm() / an.norm(), 1e-6) << "theta=" << th;
  }
}

TEST(GainMatrix, Examples) {
  EXPECT_TRUE(gain_matrix(GainPhaseError::none(3)).isIdentity());
  RVector g(2), phi(2);
  g << 1.0, 0.0;
  phi << 0.0, 0.0;
  const CMatrix m = gain_matrix(GainPhaseError::from_gain_phase(g, phi));
  EXPECT_NEAR(std::abs(m(0, 0) - 2.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(m(1, 1) - 1.0), 0.0, 1e-15);
  g.setZero();
  phi << kPi / 2, 0.0;
  const CMatrix m2 = gain_matrix(GainPhaseError::from_gain_phase(g, phi));
  EXPECT_NEAR(std::abs(m2(0, 0) - cdouble(0, 1)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(m2(1, 1) - 1.0), 0.0, 1e-15);
}

TEST(GainPhaseError, ConsistencyAndWrapping) {
  const GainPhaseError e = draw_errors(0.2, 25.0, 50, 8);
  const CMatrix g = gain_matrix(e);
  for (int n = 0; n < 50; ++n) {
    const cdouble expect = (1.0 + e.g()[n]) * std::polar(1.0, e.phi()[n]) - 1.0;
    EXPECT_NEAR(std::abs(e.e()[n] - expect), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(g(n, n) - (1.0 + e.e()[n])), 0.0, 1e-15);
    EXPECT_GE(e.phi()[n], 0.0);
    EXPECT_LT(e.phi()[n], 2 * kPi);
  }
}

TEST(DrawErrors, ZeroSpreadGivesZeroError) {
  const GainPhaseError e = draw_errors(0.0, 0.0, 6, 1);
  EXPECT_EQ(e.e().norm(), 0.0);
}

TEST(DrawErrors, DeterministicPerSeed) {
  const GainPhaseError a = draw_errors(0.15, 10.0, 10, 42);
  const GainPhaseError b = draw_errors(0.15, 10.0, 10, 42);
  EXPECT_EQ(a.g(), b.g());
  EXPECT_EQ(a.phi(), b.phi());
  const GainPhaseError c = draw_errors(0.15, 10.0, 10, 43);
  EXPECT_NE(a.g(), c.g());
}

TEST(DrawErrors, SampleStdOfGain) {
  const GainPhaseError e = draw_errors(0.15, 10.0, 100'000, 5);
  const double mean = e.g().mean();
  const double sd = std::sqrt((e.g().array() - mean).square().sum() / (e.g().size() - 1));
  EXPECT_NEAR(sd, 0.15, 0.01 * 0.15);
}

TEST(DrawErrors, PhaseSpreadIsInRadians) {
  const GainPhaseError e = draw_errors(0.0, 10.0, 100'000, 6);
  // Unwrap to (-pi, pi] before measuring the spread.
  RVector p = e.phi();
  for (Eigen::Index i = 0; i < p.size(); ++i)
    if (p[i] > kPi) p[i] -= 2 * kPi;
  const double sd = std::sqrt(p.squaredNorm() / p.size());
  EXPECT_NEAR(sd, deg_to_rad(10.0), 0.01 * deg_to_rad(10.0));
}

TEST(Synthesize, NoiselessSingleBroadsideSource) {
  const UlaConfig cfg(5);
  CMatrix s(1, 3);
  s << cdouble(1, 2), cdouble(-0.5, 0), cdouble(0, 1);
  RVector th(1);
  th << 0.0;
  const SnapshotMatrix y = synthesize(SignalScene(th, s), cfg, GainPhaseError::none(5), 0.0, 1);
  for (int n = 0; n < 5; ++n)
    for (int p = 0; p < 3; ++p) EXPECT_EQ(y.data()(n, p), s(0, p));
}

TEST(Synthesize, NoiselessEqualsModelAndIsLinear) {
  const UlaConfig cfg(6);
  const GainPhaseError err = draw_errors(0.1, 5.0, 6, 3);
  RVector th(2);
  th << -0.3, 0.4;
  const CMatrix s1 = CMatrix::Random(2, 4), s2 = CMatrix::Random(2, 4);
  const cdouble a(0.7, -1.1), b(2.0, 0.5);
  const CMatrix y1 = synthesize(SignalScene(th, s1), cfg, err, 0.0, 0).data();
  const CMatrix y2 = synthesize(SignalScene(th, s2), cfg, err, 0.0, 0).data();
  const CMatrix y12 = synthesize(SignalScene(th, a * s1 + b * s2), cfg, err, 0.0, 0).data();
  EXPECT_LT((y12 - a * y1 - b * y2).norm(), 1e-12);
  const CMatrix model = gain_matrix(err) * steering_matrix(th, cfg) * s1;
  EXPECT_LT((y1 - model).norm(), 1e-13);
}

TEST(Synthesize, NoiseEnergyMatchesVariance) {
  const UlaConfig cfg(10);
  const SignalScene zero = one_source(0.0, 5, 0.0);
  double total = 0.0;
  for (int s = 0; s < 1000; ++s)
    total += synthesize(zero, cfg, GainPhaseError::none(10), 1.0, s).data().squaredNorm() / 50.0;
  EXPECT_NEAR(total / 1000.0, 1.0, 0.05);
}

TEST(Synthesize, DimensionMismatch) {
  EXPECT_THROW(synthesize(one_source(0.0), UlaConfig(4), GainPhaseError::none(5), 0.0, 0), Error);
}

TEST(SnrToNoiseStd, UnitSignalAtZeroDb) {
  // One broadside source with |s| = 1 gives ||GAS||^2 = N P.
  const UlaConfig cfg(4);
  EXPECT_NEAR(snr_to_noise_std(0.0, one_source(0.0, 3), cfg, GainPhaseError::none(4)), 1.0, 1e-15);
  EXPECT_LT(snr_to_noise_std(300.0, one_source(0.0, 3), cfg, GainPhaseError::none(4)), 1e-14);
}

TEST(SnrToNoiseStd, ZeroSignalRaises) {
  try {
    snr_to_noise_std(10.0, one_source(0.0, 2, 0.0), UlaConfig(4), GainPhaseError::none(4));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroSignal);
  }
}

TEST(SnrToNoiseStd, EmpiricalSnrAtTwentyDb) {
  const UlaConfig cfg(10);
  const GainPhaseError err = draw_errors(0.15, 10.0, 10, 2);
  RVector th(3);
  th << deg_to_rad(-56.8889), deg_to_rad(-7.6806), deg_to_rad(5.9595);
  std::mt19937_64 rng(4);
  std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
  CMatrix s(3, 5);
  for (Eigen::Index i = 0; i < s.size(); ++i) s.data()[i] = cdouble(nd(rng), nd(rng));
  const SignalScene scene(th, s);
  const double sd = snr_to_noise_std(20.0, scene, cfg, err);
  const CMatrix clean = noiseless_output(scene, cfg, err);
  double noise = 0.0;
  for (int seed = 0; seed < 1000; ++seed) noise += (synthesize(scene, cfg, err, sd, seed).data() - clean).squaredNorm();
  const double snr = 10.0 * std::log10(clean.squaredNorm() / (noise / 1000.0));
  EXPECT_NEAR(snr, 20.0, 0.1);
}

TEST(SignalScene, Validation) {
  RVector th(2);
  th << 0.3, -0.3;
  EXPECT_THROW(SignalScene(th, CMatrix::Ones(2, 1)), Error);
  th << -0.3, 2.0;
  EXPECT_THROW(SignalScene(th, CMatrix::Ones(2, 1)), Error);
  th << -0.3, 0.3;
  EXPECT_THROW(SignalScene(th, CMatrix::Ones(3, 1)), Error);
  EXPECT_THROW(SignalScene(th, CMatrix::Ones(2, 0)), Error);
}

TEST(SnapshotCsv, RoundTripIsExact) {
  const CMatrix d = CMatrix::Random(4, 3);
  std::stringstream ss;
  write_snapshot_csv(ss, SnapshotMatrix(d));
  std::string header;
  std::getline(std::stringstream(ss.str()), header);
  EXPECT_EQ(header, "re_0,im_0,re_1,im_1,re_2,im_2");
  const SnapshotMatrix back = read_snapshot_csv(ss);
  EXPECT_EQ(back.data(), d);
  EXPECT_EQ(back.content_hash(), SnapshotMatrix(d).content_hash());
}

TEST(SnapshotCsv, RejectsMalformedInput) {
  std::stringstream bad_header("re_0,im_0,re_1\n1,2,3\n");
  EXPECT_THROW(read_snapshot_csv(bad_header), Error);
  std::stringstream bad_row("re_0,im_0\n1,2\n3\n");
  EXPECT_THROW(read_snapshot_csv(bad_row), Error);
  std::stringstream bad_num("re_0,im_0\n1,abc\n");
  EXPECT_THROW(read_snapshot_csv(bad_num), Error);
  std::stringstream crlf("re_0,im_0\r\n1,2\r\n");
  EXPECT_EQ(read_snapshot_csv(crlf).data()(0, 0), cdouble(1, 2));
}
