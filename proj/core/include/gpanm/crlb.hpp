// SPDX-License-Identifier: Apache-2.0
//
// Fisher information for joint (theta, g) estimation with stochastic sources,
// vec(Y) ~ CN(0, C), C = (I_P (x) G A) B (I_P (x) G A)^H + sigma_n^2 I.
// Phases are known; derivatives are taken with respect to real gains g.
#pragma once

#include <optional>
#include <vector>

#include "gpanm/array_model.hpp"

namespace gpanm {

struct CrlbScenario {
  UlaConfig config{2};
  RVector thetas;    // K, radians
  RVector gains;     // g, length N
  RVector phases;    // phi, length N, radians
  CMatrix source_cov;  // B, KP x KP
  double noise_var = 1.0;

  int n_signals() const noexcept { return static_cast<int>(thetas.size()); }
  int n_snapshots() const;
  // Throws unless B is Hermitian PSD of size multiple of K, and noise_var > 0.
  void validate() const;
};

// B = source_power I_{KP}.
CrlbScenario make_crlb_scenario(const UlaConfig& config, RVector thetas, RVector gains, RVector phases,
                                int p_snapshots, double source_power, double noise_var);

CMatrix model_covariance(const CrlbScenario& scn);
CMatrix dcov_dtheta(const CrlbScenario& scn, int k);
CMatrix dcov_dgain(const CrlbScenario& scn, int k);

struct FimResult {
  RMatrix f11;  // K x K
  RMatrix f12;  // K x N
  RMatrix f21;  // N x K
  RMatrix f22;  // N x N
  double crlb_diag = 0.0;              // sum_k 1 / F11_kk, rad^2
  std::optional<double> crlb_full;     // sum_k [F^-1]_kk when cond(F) < 1e10
  double cov_condition = 0.0;
  double max_imag_residue = 0.0;       // largest |Im| among the traces
};

// Raises IllConditioned when cond(C) >= 1e12 or some F11_kk falls below 1e-14
// of the largest FIM diagonal entry.
FimResult fim(const CrlbScenario& scn);

struct CrlbPoint {
  double snr_db = 0.0;
  double crlb_deg = 0.0;  // sqrt(crlb_diag) in degrees; NaN when skipped
  bool ok = true;
};

// noise_var at each point is the mean per-entry signal power over 10^(snr/10).
// Points whose FIM fails are kept with ok = false.
std::vector<CrlbPoint> crlb_curve(const CrlbScenario& base, const std::vector<double>& snr_grid_db);

}  // namespace gpanm
