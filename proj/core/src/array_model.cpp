// SPDX-License-Identifier: Apache-2.0
#include "gpanm/array_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "gpanm/errors.hpp"
#include "gpanm/random.hpp"

namespace gpanm {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_phase(double phi) {
  double w = std::fmod(phi, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  // fmod of a tiny negative value can round back up to exactly 2 pi.
  if (w >= kTwoPi) w = 0.0;
  return w;
}

}  // namespace

UlaConfig::UlaConfig(int n_antennas, double spacing_ratio)
    : n_antennas_(n_antennas),
      spacing_ratio_(spacing_ratio),
      xi_(kTwoPi * spacing_ratio) {
  require(n_antennas >= 2, ErrorCode::InvalidArgument, "UlaConfig needs at least 2 antennas");
  require(spacing_ratio > 0.0 && std::isfinite(spacing_ratio), ErrorCode::InvalidArgument,
          "UlaConfig spacing ratio must be positive");
}

GainPhaseError::GainPhaseError(RVector g, RVector phi, CVector e)
    : g_(std::move(g)), phi_(std::move(phi)), e_(std::move(e)) {}

GainPhaseError GainPhaseError::none(int n) {
  require(n >= 1, ErrorCode::InvalidArgument, "GainPhaseError size must be positive");
  return GainPhaseError(RVector::Zero(n), RVector::Zero(n), CVector::Zero(n));
}

GainPhaseError GainPhaseError::from_gain_phase(RVector g, RVector phi_rad) {
  require(g.size() == phi_rad.size(), ErrorCode::DimensionMismatch,
          "gain and phase vectors differ in length");
  require(g.size() >= 1, ErrorCode::InvalidArgument, "GainPhaseError size must be positive");
  CVector e(g.size());
  for (Eigen::Index n = 0; n < g.size(); ++n) {
    phi_rad[n] = wrap_phase(phi_rad[n]);
    if (g[n] == 0.0 && phi_rad[n] == 0.0) {
      e[n] = 0.0;
    } else {
      e[n] = (1.0 + g[n]) * std::polar(1.0, phi_rad[n]) - 1.0;
    }
  }
  return GainPhaseError(std::move(g), std::move(phi_rad), std::move(e));
}

SignalScene::SignalScene(RVector thetas, CMatrix amplitudes)
    : thetas_(std::move(thetas)), amplitudes_(std::move(amplitudes)) {
  require(thetas_.size() >= 1, ErrorCode::InvalidArgument, "scene needs at least one signal");
  require(amplitudes_.cols() >= 1, ErrorCode::InvalidArgument, "scene needs at least one snapshot");
  require(amplitudes_.rows() == thetas_.size(), ErrorCode::DimensionMismatch,
          "amplitude rows must equal the number of angles");
  for (Eigen::Index k = 0; k < thetas_.size(); ++k) {
    require(std::abs(thetas_[k]) <= std::numbers::pi / 2.0, ErrorCode::InvalidArgument,
            "source angle outside [-90, 90] degrees");
    if (k > 0) {
      require(thetas_[k] >= thetas_[k - 1], ErrorCode::InvalidArgument,
              "source angles must be sorted ascending");
    }
  }
}

std::uint64_t SnapshotMatrix::content_hash() const noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  const auto* bytes = reinterpret_cast<const unsigned char*>(data_.data());
  const std::size_t n = static_cast<std::size_t>(data_.size()) * sizeof(cdouble);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= bytes[i];
    h *= 0x100000001B3ULL;
  }
  return h;
}

CVector steering_vector(double theta, const UlaConfig& config) {
  const int n = config.n_antennas();
  const double w = config.xi() * std::sin(theta);
  CVector a(n);
  for (int i = 0; i < n; ++i) a[i] = std::polar(1.0, i * w);
  return a;
}

CVector steering_derivative(double theta, const UlaConfig& config) {
  const int n = config.n_antennas();
  const double w = config.xi() * std::sin(theta);
  const double dw = config.xi() * std::cos(theta);
  CVector d(n);
  for (int i = 0; i < n; ++i) d[i] = cdouble(0.0, i * dw) * std::polar(1.0, i * w);
  return d;
}

CMatrix steering_matrix(const RVector& thetas, const UlaConfig& config) {
  CMatrix a(config.n_antennas(), thetas.size());
  for (Eigen::Index k = 0; k < thetas.size(); ++k) a.col(k) = steering_vector(thetas[k], config);
  return a;
}

CMatrix gain_matrix(const GainPhaseError& error) {
  CVector diag = error.e().array() + 1.0;
  return diag.asDiagonal();
}

GainPhaseError draw_errors(double sigma_a, double sigma_p_deg, int n, std::uint64_t seed) {
  require(sigma_a >= 0.0 && sigma_p_deg >= 0.0, ErrorCode::InvalidArgument,
          "error spreads must be non-negative");
  require(n >= 1, ErrorCode::InvalidArgument, "error vector size must be positive");
  const double sigma_p = deg_to_rad(sigma_p_deg);
  Rng rng(seed);
  std::normal_distribution<double> unit(0.0, 1.0);
  RVector g(n), phi(n);
  for (int i = 0; i < n; ++i) {
    g[i] = sigma_a * unit(rng);
    phi[i] = sigma_p * unit(rng);
  }
  return GainPhaseError::from_gain_phase(std::move(g), std::move(phi));
}

CMatrix noiseless_output(const SignalScene& scene, const UlaConfig& config,
                         const GainPhaseError& error) {
  require(error.size() == config.n_antennas(), ErrorCode::DimensionMismatch,
          "gain-phase error length differs from the antenna count");
  const CMatrix a = steering_matrix(scene.thetas(), config);
  const CVector gains = error.e().array() + 1.0;
  return gains.asDiagonal() * (a * scene.amplitudes());
}

SnapshotMatrix synthesize(const SignalScene& scene, const UlaConfig& config,
                          const GainPhaseError& error, double noise_std, std::uint64_t seed) {
  require(noise_std >= 0.0 && std::isfinite(noise_std), ErrorCode::InvalidArgument,
          "noise_std must be non-negative");
  CMatrix y = noiseless_output(scene, config, error);
  if (noise_std > 0.0) {
    Rng rng(seed);
    std::normal_distribution<double> unit(0.0, 1.0);
    const double s = noise_std / std::numbers::sqrt2;
    // Column-major fill so the noise draw order is independent of Eigen internals.
    for (Eigen::Index p = 0; p < y.cols(); ++p) {
      for (Eigen::Index n = 0; n < y.rows(); ++n) {
        const double re = unit(rng);
        const double im = unit(rng);
        y(n, p) += cdouble(s * re, s * im);
      }
    }
  }
  return SnapshotMatrix(std::move(y));
}

double snr_to_noise_std(double snr_db, const SignalScene& scene, const UlaConfig& config,
                        const GainPhaseError& error) {
  const CMatrix x = noiseless_output(scene, config, error);
  const double energy = x.squaredNorm();
  require(energy > 0.0, ErrorCode::ZeroSignal, "noiseless output has zero energy");
  const double per_entry = energy / static_cast<double>(x.size());
  return std::sqrt(per_entry / std::pow(10.0, snr_db / 10.0));
}

}  // namespace gpanm
