// SPDX-License-Identifier: Apache-2.0
//
// Shared fixtures for the unit and acceptance tests.
#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "gpanm/array_model.hpp"
#include "gpanm/crlb.hpp"
#include "gpanm/estimator.hpp"

namespace gpanm::testing {

struct Instance {
  UlaConfig config{2};
  SignalScene scene{RVector::Zero(1), CMatrix::Ones(1, 1)};
  GainPhaseError error = GainPhaseError::none(2);
  double noise_std = 0.0;
  SnapshotMatrix y;
};

// Sources spread over [-60, 60] degrees at least 15 degrees apart.
inline Instance random_instance(int n, int p, int k, std::uint64_t seed, double snr_db = 20.0,
                                double sigma_a = 0.15, double sigma_p_deg = 10.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-60.0, 60.0);
  std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
  std::vector<double> deg;
  while (static_cast<int>(deg.size()) < k) {
    const double c = u(rng);
    if (std::all_of(deg.begin(), deg.end(), [c](double d) { return std::abs(d - c) >= 15.0; })) deg.push_back(c);
  }
  std::sort(deg.begin(), deg.end());
  RVector th(k);
  for (int i = 0; i < k; ++i) th[i] = deg_to_rad(deg[static_cast<std::size_t>(i)]);
  CMatrix s(k, p);
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    const double re = nd(rng);
    s.data()[i] = cdouble(re, nd(rng));
  }
  Instance inst;
  inst.config = UlaConfig(n);
  inst.scene = SignalScene(th, s);
  inst.error = draw_errors(sigma_a, sigma_p_deg, n, seed + 1000);
  inst.noise_std = snr_to_noise_std(snr_db, inst.scene, inst.config, inst.error);
  inst.y = synthesize(inst.scene, inst.config, inst.error, inst.noise_std, seed + 2000);
  return inst;
}

struct DualCheck {
  double block_min_eig = 0.0;  // lambda_min([[Q, U], [U^H, tau^2 I]])
  double trace_eq_max = 0.0;   // max_k |sum_n Q_{n,n+k}|
  double norm_lhs = 0.0;       // Tr Q + kappa ||Q||_2
  double bound_excess = 0.0;   // max over a 1 degree grid of ||U^H a||^2 - tau^2 (1 - kappa ||Q||_2)
  bool hermitian = true;
};

inline DualCheck check_dual(const DualSolution& d, const UlaConfig& cfg) {
  DualCheck c;
  const Eigen::Index n = d.q.rows(), p = d.u.cols();
  CMatrix block(n + p, n + p);
  block << d.q, d.u, d.u.adjoint(), d.tau * d.tau * CMatrix::Identity(p, p);
  c.block_min_eig = Eigen::SelfAdjointEigenSolver<CMatrix>(block, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
  for (Eigen::Index k = 1; k < n; ++k) c.trace_eq_max = std::max(c.trace_eq_max, std::abs(d.q.diagonal(k).sum()));
  Eigen::JacobiSVD<CMatrix> svd(d.q);
  c.norm_lhs = d.q.trace().real() + d.kappa * svd.singularValues()[0];
  c.hermitian = (d.q - d.q.adjoint()).norm() <= 1e-12;
  const double bound = d.tau * d.tau * (1.0 - d.kappa * svd.singularValues()[0]);
  c.bound_excess = -std::numeric_limits<double>::infinity();
  for (int deg = -90; deg <= 90; ++deg) {
    const double v = (d.u.adjoint() * steering_vector(deg_to_rad(deg), cfg)).squaredNorm();
    c.bound_excess = std::max(c.bound_excess, v - bound);
  }
  return c;
}

inline double gpanm_tau(int n, int p, double sigma, double ce) {
  const double np = static_cast<double>(n * p);
  const double b1 = std::sqrt(2.0) * sigma * std::exp(std::lgamma((np + 1) / 2) - std::lgamma(np / 2));
  const double b2 = (std::sqrt(double(n)) + std::sqrt(double(p)) + 4.0) * sigma;
  return std::min(b1, b2) * ce + sigma * std::sqrt(4.0 * np * std::log(double(n)));
}

// N in [2, 6], K in [1, 2], P in [1, 3] with a random Hermitian PD source covariance.
inline CrlbScenario random_crlb_scenario(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> nd(2, 6), kd(1, 2), pd(1, 3);
  std::uniform_real_distribution<double> ud(-1.0, 1.0);
  const int n = nd(rng), k = kd(rng), p = pd(rng);
  RVector th(k), g(n), phi(n);
  for (int i = 0; i < k; ++i) th[i] = 1.2 * ud(rng);
  for (int i = 0; i < n; ++i) {
    g[i] = 0.2 * ud(rng);
    phi[i] = 0.3 * ud(rng);
  }
  CMatrix m(k * p, k * p);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = cdouble(ud(rng), ud(rng));
  CrlbScenario s = make_crlb_scenario(UlaConfig(n), th, g, phi, p, 1.0, 0.5 + 0.5 * (ud(rng) + 1.0));
  s.source_cov = m * m.adjoint() + 0.1 * CMatrix::Identity(k * p, k * p);
  s.validate();
  return s;
}

}  // namespace gpanm::testing
