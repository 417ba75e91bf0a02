// SPDX-License-Identifier: Apache-2.0
#include "gpanm/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gpanm/errors.hpp"

namespace gpanm {

GridDictionary::GridDictionary(const UlaConfig& config, double step_deg, double range_deg)
    : angles_deg_(angle_grid(step_deg, range_deg)) {
  build(config);
}

GridDictionary::GridDictionary(const UlaConfig& config, std::vector<double> angles_deg)
    : angles_deg_(std::move(angles_deg)) {
  require(!angles_deg_.empty(), ErrorCode::InvalidArgument, "grid needs at least one angle");
  for (std::size_t i = 1; i < angles_deg_.size(); ++i)
    require(angles_deg_[i] > angles_deg_[i - 1], ErrorCode::InvalidArgument,
            "grid angles must be strictly increasing");
  build(config);
}

void GridDictionary::build(const UlaConfig& config) {
  RVector th(static_cast<Eigen::Index>(angles_deg_.size()));
  for (std::size_t i = 0; i < angles_deg_.size(); ++i) th[static_cast<Eigen::Index>(i)] = deg_to_rad(angles_deg_[i]);
  atoms_ = steering_matrix(th, config);
}

MusicResult music(const SnapshotMatrix& y, int k, const GridDictionary& grid) {
  const int n = y.n_antennas();
  require(k >= 1 && k < n, ErrorCode::RankError, "MUSIC needs 1 <= k < N");
  require(y.n_snapshots() >= 1, ErrorCode::InvalidArgument, "MUSIC needs at least one snapshot");
  require(grid.atoms().rows() == n, ErrorCode::DimensionMismatch, "dictionary size differs from the array");
  const CMatrix r = y.data() * y.data().adjoint() / static_cast<double>(y.n_snapshots());
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(0.5 * (r + r.adjoint()));
  require(eig.info() == Eigen::Success, ErrorCode::EigenFailure, "covariance eigendecomposition failed");
  const CMatrix en = eig.eigenvectors().leftCols(n - k);
  const CMatrix proj = en.adjoint() * grid.atoms();

  MusicResult res;
  res.eigenvalues = eig.eigenvalues();
  res.spectrum.theta_deg = grid.angles_deg();
  res.spectrum.value.resize(grid.angles_deg().size());
  for (Eigen::Index m = 0; m < proj.cols(); ++m) {
    const double d = proj.col(m).squaredNorm();
    res.spectrum.value[static_cast<std::size_t>(m)] = d > 0.0 ? 1.0 / d : std::numeric_limits<double>::max();
  }
  PeakResult peaks = peak_search(res.spectrum, PeakOptions{0.5, k});
  res.thetas_deg = std::move(peaks.thetas_deg);
  res.too_few_peaks = peaks.too_few_peaks;
  return res;
}

SompResult somp(const SnapshotMatrix& y, const GridDictionary& grid, int k) {
  require(k >= 1 && k <= grid.size(), ErrorCode::InvalidArgument, "SOMP needs 1 <= k <= grid size");
  require(grid.atoms().rows() == y.n_antennas(), ErrorCode::DimensionMismatch,
          "dictionary size differs from the array");
  const CMatrix& yd = y.data();
  const CMatrix& atoms = grid.atoms();
  CMatrix resid = yd;
  SompResult res;
  res.residual_history.push_back(resid.norm());
  std::vector<bool> used(static_cast<std::size_t>(grid.size()), false);
  CMatrix basis(yd.rows(), 0);
  for (int it = 0; it < k; ++it) {
    const CMatrix corr = atoms.adjoint() * resid;
    int best = -1;
    double best_val = -1.0;
    for (Eigen::Index m = 0; m < corr.rows(); ++m) {
      if (used[static_cast<std::size_t>(m)]) continue;
      const double v = corr.row(m).squaredNorm();
      if (v > best_val) {
        best_val = v;
        best = static_cast<int>(m);
      }
    }
    used[static_cast<std::size_t>(best)] = true;
    res.indices.push_back(best);
    basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
    basis.col(basis.cols() - 1) = atoms.col(best);
    const CMatrix coef = basis.colPivHouseholderQr().solve(yd);
    resid = yd - basis * coef;
    res.residual_history.push_back(resid.norm());
  }
  for (int idx : res.indices) res.thetas_deg.push_back(grid.angles_deg()[static_cast<std::size_t>(idx)]);
  std::sort(res.thetas_deg.begin(), res.thetas_deg.end());
  return res;
}

DoaEstimate anm_estimate(const SnapshotMatrix& y, double tau, const UlaConfig& config, GpAnmParams base) {
  base.tau = tau;
  base.ce = 0.0;
  return estimate(y, base, config);
}

}  // namespace gpanm
