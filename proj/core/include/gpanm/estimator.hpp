// SPDX-License-Identifier: Apache-2.0
//
// Gridless DOA estimation under gain-phase errors (GP-ANM).
//
// The solved program, with U = tau V so the Schur block stays well scaled:
//
//   minimize    ||Y - tau V||_F^2
//   subject to  [[Q, V], [V^H, I_P]] >= 0
//               sum_n Q_{n,n+k} = 0,                k = 1..N-1
//               Tr(Q) + kappa ||Q||_2 <= 1
//
// Peaks of ||U^H a(theta)||^2 give the DOAs; a short alternating least-squares
// pass then fits the gain-phase errors and per-source waveforms.
#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gpanm/array_model.hpp"
#include "gpanm/sdp_kernel.hpp"

namespace gpanm {

enum class Variant { L2, L1 };

std::string_view to_string(Variant v) noexcept;

struct GpAnmParams {
  double tau = 1.0;
  double ce = 0.0;
  Variant variant = Variant::L2;
  double grid_step_deg = 0.01;
  double range_deg = 90.0;  // spectrum covers [-range_deg, range_deg]
  double peak_rel_threshold = 0.5;
  std::optional<int> k_signals;
  int refine_iters = 20;
  double refine_tol = 1e-8;
  sdp::SolverOptions solver;

  // Throws InvalidParams on tau <= 0, ce < 0, non-positive grid step or a
  // threshold outside (0, 1].
  void validate() const;
};

// sqrt(N (sigma_a^2 + sigma_p^2)) with sigma_p in degrees.
double compute_ce(double sigma_a, double sigma_p_deg, int n);

// Coefficient in front of ||Q||_2: (C_e + 2 sqrt N) C_e for L2, (2 + 1/sqrt N) C_e for L1.
double kappa(Variant variant, double ce, int n);

enum class SpectralNormForm {
  Epigraph,  // s I - Q >= 0, Tr(Q) + kappa s <= 1
  Block,     // [[(1 - Tr Q) I, kappa Q], [kappa Q, (1 - Tr Q) I]] >= 0
};

// Where each unknown lives in the solver's decision vector.
struct GpAnmLayout {
  int n = 0;
  int p = 0;
  int v_re = 0;      // V(i, q) real part at v_re + q n + i
  int v_im = 0;
  int q_diag = 0;    // Q(i, i) at q_diag + i
  int q_off = 0;     // Q(i, j), i < j: (re, im) pairs in row-major order of (i, j)
  int s_epi = -1;    // epigraph scalar, -1 when absent
  int var_dim = 0;

  int q_off_re(int i, int j) const;  // requires i < j
  int q_off_im(int i, int j) const { return q_off_re(i, j) + 1; }
};

struct GpAnmProgram {
  sdp::ConicProblem problem;
  GpAnmLayout layout;
  double tau = 0.0;
  double kappa = 0.0;
  SpectralNormForm form = SpectralNormForm::Epigraph;
};

GpAnmProgram build_sdp(const SnapshotMatrix& y, const GpAnmParams& params,
                       SpectralNormForm form = SpectralNormForm::Epigraph);

// How far the raw solver output was from the constraint set before the small
// restoration step in extract_dual.
struct DualDiagnostics {
  double schur_min_eig = 0.0;   // lambda_min(Q - U U^H / tau^2)
  double trace_eq_max = 0.0;    // max_k |sum_n Q_{n,n+k}|
  double norm_excess = 0.0;     // Tr Q + kappa ||Q||_2 - 1
  bool restored = false;
};

struct DualSolution {
  CMatrix u;  // N x P
  CMatrix q;  // N x N Hermitian
  double tau = 0.0;
  double kappa = 0.0;
  double q_norm = 0.0;              // largest singular value of Q
  double certificate_bound = 0.0;   // tau^2 (1 - kappa ||Q||_2)
  DualDiagnostics raw;
};

// Unpacks U and Q and checks every invariant. A raw violation above
// `tolerance` raises InvariantViolation naming the constraint; smaller ones are
// removed by restoration (projection onto the trace equalities, a diagonal shift
// for the Schur block, a rescale for the norm constraint) and recorded in `raw`.
// Infeasible solver status raises InvalidArgument.
DualSolution extract_dual(const sdp::SolverSolution& sol, const GpAnmProgram& program,
                          double tolerance = 1e-4);

struct Spectrum {
  std::vector<double> theta_deg;
  std::vector<double> value;

  std::size_t size() const noexcept { return value.size(); }
};

// Evenly spaced grid over [-range_deg, range_deg] including both ends.
std::vector<double> angle_grid(double step_deg, double range_deg);

// ||U^H a(theta)||^2 on the grid.
Spectrum dual_spectrum(const DualSolution& dual, const UlaConfig& config, double grid_step_deg,
                       double range_deg);

struct PeakOptions {
  double rel_threshold = 0.5;
  std::optional<int> k;
};

struct PeakResult {
  std::vector<double> thetas_deg;
  bool too_few_peaks = false;
};

// Interior local maxima (a plateau counts once, at its leftmost index). With k
// set, the k largest maxima are kept regardless of height; otherwise those at or
// above rel_threshold * max. Each strict peak is moved by 3-point parabolic
// interpolation, at most half a grid step.
PeakResult peak_search(const Spectrum& spectrum, const PeakOptions& opts);

struct RefinedModel {
  CVector e_hat;
  RVector b;          // K source magnitudes
  CMatrix d;          // K x P, unit-norm rows where b_k > 0
  double lambda_e = 0.0;
  bool lambda_zero_flag = false;  // ||e(0)|| < C_e, so the norm equality is unattainable
  double objective = 0.0;         // ||Y - (I + diag e) A diag(b) D||_F
  std::vector<double> objective_history;
  int iterations = 0;
};

// Alternating fit of e (closed form with a bisected multiplier so ||e|| = ce)
// and of the source waveforms, at fixed angles (radians).
RefinedModel refine(const SnapshotMatrix& y, const RVector& thetas, double ce,
                    const UlaConfig& config, int iters = 20, double tol = 1e-8);

// Closed-form e for a given multiplier lambda, with H = A D' the current model.
CVector e_update(const CMatrix& y, const CMatrix& h, double lambda);

struct EstimateDiagnostics {
  sdp::SolverStatus status = sdp::SolverStatus::MaxIters;
  int iterations = 0;
  sdp::Residuals residuals;
  double objective = 0.0;  // ||Y - U||_F
  double solve_objective = 0.0;  // solver objective, ||Y - U||_F^2 before restoration
  bool too_few_peaks = false;
  double build_time_s = 0.0;
  double solve_time_s = 0.0;
  double spectrum_time_s = 0.0;
  double refine_time_s = 0.0;
  double total_time_s = 0.0;
};

struct DoaEstimate {
  std::vector<double> thetas_deg;
  Spectrum spectrum;
  DualSolution dual;
  std::optional<RefinedModel> refined;
  EstimateDiagnostics diagnostics;
};

// build_sdp -> solve -> extract_dual -> dual_spectrum -> peak_search -> refine.
// Errors are re-raised with the failing stage prefixed to the message.
DoaEstimate estimate(const SnapshotMatrix& y, const GpAnmParams& params, const UlaConfig& config);

void write_spectrum_csv(std::ostream& os, const Spectrum& spectrum);
void save_spectrum_csv(const std::string& path, const Spectrum& spectrum);

// key=value lines, one per field.
void write_estimate(std::ostream& os, const DoaEstimate& est);

}  // namespace gpanm
