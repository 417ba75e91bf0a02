// SPDX-License-Identifier: Apache-2.0
//
// Reference estimators: MUSIC, SOMP over an angle grid and plain ANM.
#pragma once

#include <vector>

#include "gpanm/array_model.hpp"
#include "gpanm/estimator.hpp"

namespace gpanm {

class GridDictionary {
 public:
  // Angles from -range_deg to range_deg with the given step (both ends included).
  GridDictionary(const UlaConfig& config, double step_deg = 0.01, double range_deg = 90.0);
  // Explicit, strictly increasing angle list.
  GridDictionary(const UlaConfig& config, std::vector<double> angles_deg);

  int size() const noexcept { return static_cast<int>(angles_deg_.size()); }
  const std::vector<double>& angles_deg() const noexcept { return angles_deg_; }
  const CMatrix& atoms() const noexcept { return atoms_; }

 private:
  void build(const UlaConfig& config);

  std::vector<double> angles_deg_;
  CMatrix atoms_;
};

struct MusicResult {
  Spectrum spectrum;
  std::vector<double> thetas_deg;
  RVector eigenvalues;  // of the sample covariance, ascending
  bool too_few_peaks = false;
};

// Pseudospectrum 1 / ||E_n^H a||^2 with E_n the N - k weakest eigenvectors of
// Y Y^H / P. Raises RankError unless 1 <= k < N.
MusicResult music(const SnapshotMatrix& y, int k, const GridDictionary& grid);

struct SompResult {
  std::vector<double> thetas_deg;
  std::vector<int> indices;                // selection order
  std::vector<double> residual_history;    // ||R||_F before the first pick and after each
};

SompResult somp(const SnapshotMatrix& y, const GridDictionary& grid, int k);

// GP-ANM with C_e = 0; `base` supplies everything but tau and ce.
DoaEstimate anm_estimate(const SnapshotMatrix& y, double tau, const UlaConfig& config,
                         GpAnmParams base = {});

}  // namespace gpanm
