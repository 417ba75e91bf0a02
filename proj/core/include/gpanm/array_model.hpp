// SPDX-License-Identifier: Apache-2.0
//
// Uniform linear array signal model with per-antenna gain-phase errors:
//
//   Y = G A S + N,   G = (I + diag{g}) diag{exp(j phi)}
//
// Angles are radians everywhere in this header. Degrees only appear at the
// boundaries that say so in their name (`_deg`).
#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <numbers>
#include <string>

#include <Eigen/Dense>

namespace gpanm {

using cdouble = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

constexpr double deg_to_rad(double deg) noexcept { return deg * std::numbers::pi / 180.0; }
constexpr double rad_to_deg(double rad) noexcept { return rad * 180.0 / std::numbers::pi; }

class UlaConfig {
 public:
  // Throws InvalidArgument unless n_antennas >= 2 and spacing_ratio > 0.
  explicit UlaConfig(int n_antennas, double spacing_ratio = 0.5);

  int n_antennas() const noexcept { return n_antennas_; }
  // d / lambda.
  double spacing_ratio() const noexcept { return spacing_ratio_; }
  // 2 pi d / lambda.
  double xi() const noexcept { return xi_; }

  bool operator==(const UlaConfig&) const = default;

 private:
  int n_antennas_;
  double spacing_ratio_;
  double xi_;
};

// Per-antenna gain deviation g and phase phi (radians, wrapped to [0, 2pi)),
// plus the derived multiplicative error e_n = (1 + g_n) exp(j phi_n) - 1.
class GainPhaseError {
 public:
  static GainPhaseError none(int n);
  // phi is taken in radians and wrapped; g and phi must have equal length.
  static GainPhaseError from_gain_phase(RVector g, RVector phi_rad);

  int size() const noexcept { return static_cast<int>(g_.size()); }
  const RVector& g() const noexcept { return g_; }
  const RVector& phi() const noexcept { return phi_; }
  const CVector& e() const noexcept { return e_; }

 private:
  GainPhaseError(RVector g, RVector phi, CVector e);

  RVector g_;
  RVector phi_;
  CVector e_;
};

// K source angles (ascending, within [-pi/2, pi/2]) and their K x P amplitudes.
class SignalScene {
 public:
  SignalScene(RVector thetas, CMatrix amplitudes);

  int n_signals() const noexcept { return static_cast<int>(thetas_.size()); }
  int n_snapshots() const noexcept { return static_cast<int>(amplitudes_.cols()); }
  const RVector& thetas() const noexcept { return thetas_; }
  const CMatrix& amplitudes() const noexcept { return amplitudes_; }

 private:
  RVector thetas_;
  CMatrix amplitudes_;
};

// Received N x P data. Only the generating model lives outside; the noise
// realisation is never stored.
class SnapshotMatrix {
 public:
  SnapshotMatrix() = default;
  explicit SnapshotMatrix(CMatrix data) : data_(std::move(data)) {}

  int n_antennas() const noexcept { return static_cast<int>(data_.rows()); }
  int n_snapshots() const noexcept { return static_cast<int>(data_.cols()); }
  const CMatrix& data() const noexcept { return data_; }

  // FNV-1a over the raw doubles; used to show several estimators saw the same data.
  std::uint64_t content_hash() const noexcept;

 private:
  CMatrix data_;
};

CVector steering_vector(double theta, const UlaConfig& config);
CVector steering_derivative(double theta, const UlaConfig& config);
// Columns are steering vectors for each angle.
CMatrix steering_matrix(const RVector& thetas, const UlaConfig& config);

// (I + diag{g}) diag{exp(j phi)} as a dense diagonal matrix.
CMatrix gain_matrix(const GainPhaseError& error);

// g_n ~ N(0, sigma_a^2), phi_n ~ N(0, sigma_p^2) with sigma_p given in degrees.
// This is the only place phase spreads cross from degrees to radians.
GainPhaseError draw_errors(double sigma_a, double sigma_p_deg, int n, std::uint64_t seed);

// G A S, the noiseless array output.
CMatrix noiseless_output(const SignalScene& scene, const UlaConfig& config,
                         const GainPhaseError& error);

// Y = G A S + N with circular complex Gaussian noise of total per-entry
// variance noise_std^2 (each of re/im gets noise_std^2 / 2).
SnapshotMatrix synthesize(const SignalScene& scene, const UlaConfig& config,
                          const GainPhaseError& error, double noise_std, std::uint64_t seed);

// noise_std such that ||G A S||_F^2 / (N P noise_std^2) = 10^(snr_db / 10).
double snr_to_noise_std(double snr_db, const SignalScene& scene, const UlaConfig& config,
                        const GainPhaseError& error);

// CSV: one row per antenna, columns re_0,im_0,...,re_{P-1},im_{P-1}, header row.
void write_snapshot_csv(std::ostream& os, const SnapshotMatrix& y);
SnapshotMatrix read_snapshot_csv(std::istream& is);
void save_snapshot_csv(const std::string& path, const SnapshotMatrix& y);
SnapshotMatrix load_snapshot_csv(const std::string& path);

}  // namespace gpanm
