// SPDX-License-Identifier: Apache-2.0
#include "gpanm/crlb.hpp"

#include <cmath>
#include <future>
#include <limits>

#include "gpanm/errors.hpp"

namespace gpanm {

namespace {

constexpr double kMaxCovCondition = 1e12;
constexpr double kMinRelInformation = 1e-14;
constexpr double kMaxFimCondition = 1e10;

// I_P (x) M
CMatrix kron_identity(int p, const CMatrix& m) {
  CMatrix out = CMatrix::Zero(p * m.rows(), p * m.cols());
  for (int i = 0; i < p; ++i) out.block(i * m.rows(), i * m.cols(), m.rows(), m.cols()) = m;
  return out;
}

CVector complex_gains(const CrlbScenario& scn) {
  CVector g(scn.gains.size());
  for (Eigen::Index n = 0; n < g.size(); ++n) g[n] = (1.0 + scn.gains[n]) * std::polar(1.0, scn.phases[n]);
  return g;
}

CMatrix array_response(const CrlbScenario& scn) {
  return complex_gains(scn).asDiagonal() * steering_matrix(scn.thetas, scn.config);
}

// X B M^H + (X B M^H)^H with M = I (x) G A.
CMatrix hermitian_product(const CrlbScenario& scn, const CMatrix& dx) {
  const int p = scn.n_snapshots();
  const CMatrix big = kron_identity(p, array_response(scn));
  const CMatrix term = kron_identity(p, dx) * scn.source_cov * big.adjoint();
  return term + term.adjoint();
}

}  // namespace

int CrlbScenario::n_snapshots() const {
  const int k = n_signals();
  return k > 0 ? static_cast<int>(source_cov.rows()) / k : 0;
}

void CrlbScenario::validate() const {
  const int n = config.n_antennas();
  const int k = n_signals();
  require(k >= 1, ErrorCode::InvalidArgument, "CRLB scenario needs at least one source");
  require(gains.size() == n && phases.size() == n, ErrorCode::DimensionMismatch,
          "gain and phase vectors must have one entry per antenna");
  require(source_cov.rows() == source_cov.cols() && source_cov.rows() >= k && source_cov.rows() % k == 0,
          ErrorCode::DimensionMismatch, "source covariance must be KP x KP");
  require((source_cov - source_cov.adjoint()).cwiseAbs().maxCoeff() <= 1e-10, ErrorCode::NotHermitian,
          "source covariance is not Hermitian");
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(source_cov, Eigen::EigenvaluesOnly);
  require(eig.eigenvalues().minCoeff() >= -1e-10 * std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff()),
          ErrorCode::InvalidArgument, "source covariance is not PSD");
  require(noise_var > 0.0 && std::isfinite(noise_var), ErrorCode::InvalidArgument, "noise_var must be positive");
}

CrlbScenario make_crlb_scenario(const UlaConfig& config, RVector thetas, RVector gains, RVector phases,
                                int p_snapshots, double source_power, double noise_var) {
  require(p_snapshots >= 1 && source_power >= 0.0, ErrorCode::InvalidArgument, "bad CRLB scenario");
  CrlbScenario s{config, std::move(thetas), std::move(gains), std::move(phases), CMatrix(), noise_var};
  const auto kp = s.thetas.size() * p_snapshots;
  s.source_cov = source_power * CMatrix::Identity(kp, kp);
  s.validate();
  return s;
}

CMatrix model_covariance(const CrlbScenario& scn) {
  scn.validate();
  const CMatrix big = kron_identity(scn.n_snapshots(), array_response(scn));
  CMatrix c = big * scn.source_cov * big.adjoint();
  c.diagonal().array() += scn.noise_var;
  return 0.5 * (c + c.adjoint());
}

CMatrix dcov_dtheta(const CrlbScenario& scn, int k) {
  scn.validate();
  require(k >= 0 && k < scn.n_signals(), ErrorCode::InvalidArgument, "theta index out of range");
  CMatrix da = CMatrix::Zero(scn.config.n_antennas(), scn.n_signals());
  da.col(k) = steering_derivative(scn.thetas[k], scn.config);
  return hermitian_product(scn, complex_gains(scn).asDiagonal() * da);
}

CMatrix dcov_dgain(const CrlbScenario& scn, int k) {
  scn.validate();
  require(k >= 0 && k < scn.config.n_antennas(), ErrorCode::InvalidArgument, "gain index out of range");
  const CMatrix a = steering_matrix(scn.thetas, scn.config);
  CMatrix dga = CMatrix::Zero(a.rows(), a.cols());
  dga.row(k) = std::polar(1.0, scn.phases[k]) * a.row(k);
  return hermitian_product(scn, dga);
}

FimResult fim(const CrlbScenario& scn) {
  const CMatrix c = model_covariance(scn);
  const int k = scn.n_signals();
  const int n = scn.config.n_antennas();
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(c, Eigen::EigenvaluesOnly);
  const RVector& lam = eig.eigenvalues();
  FimResult r;
  r.cov_condition = lam.minCoeff() > 0.0 ? lam.maxCoeff() / lam.minCoeff() : std::numeric_limits<double>::infinity();
  require(r.cov_condition < kMaxCovCondition, ErrorCode::IllConditioned,
          "covariance condition number " + std::to_string(r.cov_condition));
  const Eigen::LLT<CMatrix> llt(c);

  // W_i = C^-1 dC_i; F_ij = Tr(W_i W_j).
  std::vector<CMatrix> w;
  w.reserve(static_cast<std::size_t>(k + n));
  for (int i = 0; i < k; ++i) w.push_back(llt.solve(dcov_dtheta(scn, i)));
  for (int i = 0; i < n; ++i) w.push_back(llt.solve(dcov_dgain(scn, i)));
  const int m = k + n;
  RMatrix f(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j) {
      const cdouble t = (w[static_cast<std::size_t>(i)].transpose().cwiseProduct(w[static_cast<std::size_t>(j)])).sum();
      r.max_imag_residue = std::max(r.max_imag_residue, std::abs(t.imag()));
      f(i, j) = t.real();
      f(j, i) = t.real();
    }
  }
  r.f11 = f.topLeftCorner(k, k);
  r.f12 = f.topRightCorner(k, n);
  r.f21 = f.bottomLeftCorner(n, k);
  r.f22 = f.bottomRightCorner(n, n);
  const double f_scale = f.diagonal().maxCoeff();
  for (int i = 0; i < k; ++i) {
    require(r.f11(i, i) > kMinRelInformation * f_scale, ErrorCode::IllConditioned,
            "Fisher information for theta_" + std::to_string(i) + " vanishes");
    r.crlb_diag += 1.0 / r.f11(i, i);
  }
  Eigen::JacobiSVD<RMatrix> svd(f);
  const RVector& sv = svd.singularValues();
  const double cond = sv[sv.size() - 1] > 0.0 ? sv[0] / sv[sv.size() - 1] : std::numeric_limits<double>::infinity();
  if (cond < kMaxFimCondition) {
    const RMatrix finv = f.ldlt().solve(RMatrix::Identity(m, m));
    r.crlb_full = finv.diagonal().head(k).sum();
  }
  return r;
}

std::vector<CrlbPoint> crlb_curve(const CrlbScenario& base, const std::vector<double>& snr_grid_db) {
  require(!snr_grid_db.empty(), ErrorCode::InvalidArgument, "SNR grid is empty");
  base.validate();
  const CMatrix big = kron_identity(base.n_snapshots(), array_response(base));
  const double signal = (big * base.source_cov * big.adjoint()).trace().real() / static_cast<double>(big.rows());
  require(signal > 0.0, ErrorCode::ZeroSignal, "scenario has zero signal power");

  std::vector<std::future<CrlbPoint>> jobs;
  for (double snr : snr_grid_db) {
    jobs.push_back(std::async(std::launch::async, [&base, signal, snr] {
      CrlbPoint pt{snr, std::numeric_limits<double>::quiet_NaN(), false};
      CrlbScenario s = base;
      s.noise_var = signal / std::pow(10.0, snr / 10.0);
      try {
        pt.crlb_deg = rad_to_deg(std::sqrt(fim(s).crlb_diag));
        pt.ok = true;
      } catch (const Error&) {
        pt.ok = false;
      }
      return pt;
    }));
  }
  std::vector<CrlbPoint> out;
  out.reserve(jobs.size());
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

}  // namespace gpanm
