// SPDX-License-Identifier: Apache-2.0
#include "gpanm/estimator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "gpanm/errors.hpp"

namespace gpanm {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

constexpr double kSingularGainTol = 1e-8;
constexpr double kMaxCondition = 1e12;
constexpr double kBisectionTol = 1e-10;

// Adds coeff * x[var] to the Hermitian entry M(a, b) (and its conjugate to
// M(b, a)) of an m x m complex block stored through its real embedding.
void add_herm(sdp::PsdBlock& blk, int m, int a, int b, int var, cdouble coeff) {
  if (a == b) {
    blk.add(a, a, var, coeff.real());
    blk.add(m + a, m + a, var, coeff.real());
    return;
  }
  if (coeff.real() != 0.0) {
    blk.add(a, b, var, coeff.real());
    blk.add(m + a, m + b, var, coeff.real());
  }
  if (coeff.imag() != 0.0) {
    blk.add(m + a, b, var, coeff.imag());
    blk.add(m + b, a, var, -coeff.imag());
  }
}

void add_herm_offset(sdp::PsdBlock& blk, int m, int a, double value) {
  blk.add_offset(a, a, value);
  blk.add_offset(m + a, m + a, value);
}

// scale * Q(i, j) into M(row0 + i, col0 + j).
void add_q(sdp::PsdBlock& blk, int m, const GpAnmLayout& lay, int row0, int col0, int i, int j,
           cdouble scale) {
  const int a = row0 + i;
  const int b = col0 + j;
  if (i == j) {
    add_herm(blk, m, a, b, lay.q_diag + i, scale);
  } else if (i < j) {
    add_herm(blk, m, a, b, lay.q_off_re(i, j), scale);
    add_herm(blk, m, a, b, lay.q_off_im(i, j), scale * cdouble(0.0, 1.0));
  } else {
    add_herm(blk, m, a, b, lay.q_off_re(j, i), scale);
    add_herm(blk, m, a, b, lay.q_off_im(j, i), scale * cdouble(0.0, -1.0));
  }
}

CMatrix unpack_q(const RVector& x, const GpAnmLayout& lay) {
  const int n = lay.n;
  CMatrix q(n, n);
  for (int i = 0; i < n; ++i) {
    q(i, i) = x[lay.q_diag + i];
    for (int j = i + 1; j < n; ++j) {
      q(i, j) = cdouble(x[lay.q_off_re(i, j)], x[lay.q_off_im(i, j)]);
      q(j, i) = std::conj(q(i, j));
    }
  }
  return q;
}

CMatrix unpack_v(const RVector& x, const GpAnmLayout& lay) {
  CMatrix v(lay.n, lay.p);
  for (int c = 0; c < lay.p; ++c)
    for (int i = 0; i < lay.n; ++i)
      v(i, c) = cdouble(x[lay.v_re + c * lay.n + i], x[lay.v_im + c * lay.n + i]);
  return v;
}

double trace_eq_residual(const CMatrix& q) {
  double worst = 0.0;
  for (Eigen::Index k = 1; k < q.rows(); ++k) worst = std::max(worst, std::abs(q.diagonal(k).sum()));
  return worst;
}

Eigen::SelfAdjointEigenSolver<CMatrix> hermitian_eig(const CMatrix& h, bool vectors = false) {
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(h, vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  require(eig.info() == Eigen::Success, ErrorCode::EigenFailure, "Hermitian eigendecomposition failed");
  return eig;
}

double spectral_norm_hermitian(const CMatrix& h) {
  return hermitian_eig(h).eigenvalues().cwiseAbs().maxCoeff();
}

template <class F>
auto staged(const char* stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(e.code(), std::string(stage) + ": " + e.detail());
  }
}

double model_residual(const CMatrix& y, const CVector& e, const CMatrix& h) {
  const CVector gains = e.array() + 1.0;
  return (y - gains.asDiagonal() * h).norm();
}

}  // namespace

std::string_view to_string(Variant v) noexcept { return v == Variant::L2 ? "L2" : "L1"; }

void GpAnmParams::validate() const {
  require(tau > 0.0 && std::isfinite(tau), ErrorCode::InvalidParams, "tau must be positive");
  require(ce >= 0.0 && std::isfinite(ce), ErrorCode::InvalidParams, "ce must be non-negative");
  require(grid_step_deg > 0.0, ErrorCode::InvalidParams, "grid_step_deg must be positive");
  require(range_deg > 0.0 && range_deg <= 90.0, ErrorCode::InvalidParams,
          "range_deg must lie in (0, 90]");
  require(peak_rel_threshold > 0.0 && peak_rel_threshold <= 1.0, ErrorCode::InvalidParams,
          "peak_rel_threshold must lie in (0, 1]");
  require(!k_signals || *k_signals >= 1, ErrorCode::InvalidParams, "k_signals must be positive");
  require(refine_iters >= 1, ErrorCode::InvalidParams, "refine_iters must be at least 1");
  require(refine_tol >= 0.0, ErrorCode::InvalidParams, "refine_tol must be non-negative");
}

double compute_ce(double sigma_a, double sigma_p_deg, int n) {
  require(sigma_a >= 0.0 && sigma_p_deg >= 0.0 && n >= 0, ErrorCode::InvalidArgument,
          "compute_ce inputs must be non-negative");
  const double sp = deg_to_rad(sigma_p_deg);
  return std::sqrt(n * (sigma_a * sigma_a + sp * sp));
}

double kappa(Variant variant, double ce, int n) {
  const double rn = std::sqrt(static_cast<double>(n));
  return variant == Variant::L2 ? (ce + 2.0 * rn) * ce : (2.0 + 1.0 / rn) * ce;
}

int GpAnmLayout::q_off_re(int i, int j) const {
  const int pair = i * (n - 1) - i * (i - 1) / 2 + (j - i - 1);
  return q_off + 2 * pair;
}

GpAnmProgram build_sdp(const SnapshotMatrix& y, const GpAnmParams& params, SpectralNormForm form) {
  params.validate();
  const int n = y.n_antennas();
  const int p = y.n_snapshots();
  require(n >= 2 && p >= 1, ErrorCode::DimensionMismatch, "snapshot matrix must be N x P with N >= 2");

  GpAnmProgram prog;
  prog.tau = params.tau;
  prog.kappa = kappa(params.variant, params.ce, n);
  prog.form = form;
  const double tau = params.tau;
  const double kap = prog.kappa;

  GpAnmLayout& lay = prog.layout;
  lay.n = n;
  lay.p = p;
  lay.v_re = 0;
  lay.v_im = n * p;
  lay.q_diag = 2 * n * p;
  lay.q_off = lay.q_diag + n;
  lay.var_dim = lay.q_off + n * (n - 1);
  if (form == SpectralNormForm::Epigraph && kap > 0.0) lay.s_epi = lay.var_dim++;

  sdp::ConicProblem& prob = prog.problem;
  prob.var_dim = lay.var_dim;
  prob.objective.quadratic = RVector::Zero(lay.var_dim);
  prob.objective.linear = RVector::Zero(lay.var_dim);
  const CMatrix& yd = y.data();
  for (int c = 0; c < p; ++c) {
    for (int i = 0; i < n; ++i) {
      const int k = c * n + i;
      prob.objective.quadratic[lay.v_re + k] = 2.0 * tau * tau;
      prob.objective.quadratic[lay.v_im + k] = 2.0 * tau * tau;
      prob.objective.linear[lay.v_re + k] = -2.0 * tau * yd(i, c).real();
      prob.objective.linear[lay.v_im + k] = -2.0 * tau * yd(i, c).imag();
    }
  }
  prob.objective.constant = yd.squaredNorm();

  // [[Q, V], [V^H, I]]
  {
    const int m = n + p;
    sdp::PsdBlock blk(2 * m);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) add_q(blk, m, lay, 0, 0, i, j, 1.0);
    for (int c = 0; c < p; ++c) {
      for (int i = 0; i < n; ++i) {
        add_herm(blk, m, i, n + c, lay.v_re + c * n + i, 1.0);
        add_herm(blk, m, i, n + c, lay.v_im + c * n + i, cdouble(0.0, 1.0));
      }
      add_herm_offset(blk, m, n + c, 1.0);
    }
    prob.psd_blocks.push_back(std::move(blk));
  }

  for (int k = 1; k < n; ++k) {
    sdp::LinearConstraint re, im;
    for (int i = 0; i + k < n; ++i) {
      re.coeffs.emplace_back(lay.q_off_re(i, i + k), 1.0);
      im.coeffs.emplace_back(lay.q_off_im(i, i + k), 1.0);
    }
    prob.eq_constraints.push_back(std::move(re));
    prob.eq_constraints.push_back(std::move(im));
  }

  if (form == SpectralNormForm::Epigraph) {
    sdp::LinearConstraint norm_row;
    for (int i = 0; i < n; ++i) norm_row.coeffs.emplace_back(lay.q_diag + i, 1.0);
    norm_row.rhs = 1.0;
    if (lay.s_epi >= 0) {
      norm_row.coeffs.emplace_back(lay.s_epi, kap);
      // s I - Q
      sdp::PsdBlock blk(2 * n);
      for (int i = 0; i < n; ++i) add_herm(blk, n, i, i, lay.s_epi, 1.0);
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) add_q(blk, n, lay, 0, 0, i, j, -1.0);
      prob.psd_blocks.push_back(std::move(blk));
    }
    prob.ineq_constraints.push_back(std::move(norm_row));
  } else {
    // [[(1 - Tr Q) I, kappa Q], [kappa Q, (1 - Tr Q) I]]
    const int m = 2 * n;
    sdp::PsdBlock blk(2 * m);
    for (int a = 0; a < m; ++a) {
      add_herm_offset(blk, m, a, 1.0);
      for (int i = 0; i < n; ++i) add_herm(blk, m, a, a, lay.q_diag + i, -1.0);
    }
    if (kap > 0.0) {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) add_q(blk, m, lay, n, 0, i, j, kap);
    }
    prob.psd_blocks.push_back(std::move(blk));
  }
  prob.validate();
  return prog;
}

DualSolution extract_dual(const sdp::SolverSolution& sol, const GpAnmProgram& program, double tolerance) {
  require(sol.status != sdp::SolverStatus::Infeasible, ErrorCode::InvalidArgument,
          "solver reported the problem infeasible");
  const GpAnmLayout& lay = program.layout;
  require(sol.primal.size() == lay.var_dim, ErrorCode::DimensionMismatch,
          "solution length does not match the program layout");
  const double tau = program.tau;
  const double kap = program.kappa;
  const int n = lay.n;

  DualSolution d;
  d.tau = tau;
  d.kappa = kap;
  CMatrix v = unpack_v(sol.primal, lay);
  CMatrix q = unpack_q(sol.primal, lay);

  d.raw.trace_eq_max = trace_eq_residual(q);
  d.raw.schur_min_eig = hermitian_eig(q - v * v.adjoint()).eigenvalues().minCoeff();
  d.raw.norm_excess = q.trace().real() + kap * spectral_norm_hermitian(q) - 1.0;

  std::string violated;
  if (d.raw.trace_eq_max > tolerance) violated += " trace_equalities=" + std::to_string(d.raw.trace_eq_max);
  if (d.raw.schur_min_eig < -tolerance) violated += " schur_block=" + std::to_string(d.raw.schur_min_eig);
  if (d.raw.norm_excess > tolerance) violated += " norm_bound=" + std::to_string(d.raw.norm_excess);
  require(violated.empty(), ErrorCode::InvariantViolation, "dual solution violates" + violated);

  for (int k = 1; k < n; ++k) {
    const cdouble shift = q.diagonal(k).sum() / static_cast<double>(n - k);
    if (shift == 0.0) continue;
    for (int i = 0; i + k < n; ++i) {
      q(i, i + k) -= shift;
      q(i + k, i) = std::conj(q(i, i + k));
    }
    d.raw.restored = true;
  }
  const double mu = hermitian_eig(q - v * v.adjoint()).eigenvalues().minCoeff();
  if (mu < 0.0) {
    q.diagonal().array() += -mu;
    d.raw.restored = true;
  }
  const double t = q.trace().real() + kap * spectral_norm_hermitian(q);
  if (t > 1.0) {
    q /= t;
    v /= std::sqrt(t);
    d.raw.restored = true;
  }
  d.q = std::move(q);
  d.u = tau * v;
  d.q_norm = spectral_norm_hermitian(d.q);
  d.certificate_bound = tau * tau * (1.0 - kap * d.q_norm);
  require(d.certificate_bound >= 0.0, ErrorCode::InvariantViolation, "negative certificate bound");
  return d;
}

std::vector<double> angle_grid(double step_deg, double range_deg) {
  require(step_deg > 0.0 && range_deg >= 0.0, ErrorCode::InvalidArgument, "bad angle grid");
  const auto count = static_cast<std::size_t>(std::floor(2.0 * range_deg / step_deg + 1e-9)) + 1;
  std::vector<double> g(count);
  for (std::size_t i = 0; i < count; ++i) g[i] = -range_deg + static_cast<double>(i) * step_deg;
  if (range_deg - g.back() > 1e-9 * std::max(1.0, range_deg)) g.push_back(range_deg);
  else g.back() = range_deg;
  return g;
}

Spectrum dual_spectrum(const DualSolution& dual, const UlaConfig& config, double grid_step_deg,
                       double range_deg) {
  require(grid_step_deg > 0.0, ErrorCode::InvalidArgument, "grid_step_deg must be positive");
  require(dual.u.rows() == config.n_antennas(), ErrorCode::DimensionMismatch,
          "dual solution size differs from the array");
  Spectrum s;
  s.theta_deg = angle_grid(grid_step_deg, range_deg);
  RVector th(static_cast<Eigen::Index>(s.theta_deg.size()));
  for (std::size_t i = 0; i < s.theta_deg.size(); ++i) th[static_cast<Eigen::Index>(i)] = deg_to_rad(s.theta_deg[i]);
  const CMatrix a = steering_matrix(th, config);
  const CMatrix proj = dual.u.adjoint() * a;
  s.value.resize(s.theta_deg.size());
  for (Eigen::Index i = 0; i < proj.cols(); ++i) s.value[static_cast<std::size_t>(i)] = proj.col(i).squaredNorm();
  return s;
}

PeakResult peak_search(const Spectrum& spectrum, const PeakOptions& opts) {
  const std::size_t m = spectrum.size();
  require(m >= 1 && spectrum.theta_deg.size() == m, ErrorCode::InvalidArgument,
          "spectrum must be non-empty with matching angle grid");
  require(opts.rel_threshold > 0.0 && opts.rel_threshold <= 1.0, ErrorCode::InvalidArgument,
          "peak threshold must lie in (0, 1]");
  const auto& v = spectrum.value;
  const double vmax = *std::max_element(v.begin(), v.end());
  PeakResult res;
  if (!(vmax > 0.0)) {
    res.too_few_peaks = opts.k.has_value();
    return res;
  }

  std::vector<std::size_t> peaks;
  for (std::size_t i = 1; i + 1 < m;) {
    if (!(v[i] > v[i - 1])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < m && v[j + 1] == v[i]) ++j;
    if (j + 1 < m && v[j + 1] < v[i]) peaks.push_back(i);
    i = j + 1;
  }
  if (peaks.empty()) {
    peaks.push_back(static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin()));
  }

  // Highest first; equal heights keep ascending angle order.
  std::stable_sort(peaks.begin(), peaks.end(), [&v](std::size_t a, std::size_t b) { return v[a] > v[b]; });
  if (opts.k) {
    if (static_cast<int>(peaks.size()) < *opts.k) res.too_few_peaks = true;
    else peaks.resize(static_cast<std::size_t>(*opts.k));
  } else {
    const double cut = opts.rel_threshold * vmax;
    peaks.erase(std::remove_if(peaks.begin(), peaks.end(), [&](std::size_t i) { return v[i] < cut; }),
                peaks.end());
  }

  for (std::size_t i : peaks) {
    double theta = spectrum.theta_deg[i];
    // Plateaus keep their leftmost sample.
    if (i > 0 && i + 1 < m && v[i + 1] < v[i]) {
      const double y0 = v[i - 1], y1 = v[i], y2 = v[i + 1];
      const double denom = y0 - 2.0 * y1 + y2;
      if (denom < 0.0) {
        const double delta = std::clamp(0.5 * (y0 - y2) / denom, -0.5, 0.5);
        const double step = 0.5 * (spectrum.theta_deg[i + 1] - spectrum.theta_deg[i - 1]);
        theta += delta * step;
      }
    }
    res.thetas_deg.push_back(theta);
  }
  std::sort(res.thetas_deg.begin(), res.thetas_deg.end());
  return res;
}

CVector e_update(const CMatrix& y, const CMatrix& h, double lambda) {
  require(y.rows() == h.rows() && y.cols() == h.cols(), ErrorCode::DimensionMismatch,
          "e_update needs Y and H of equal size");
  CVector e(y.rows());
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    const double hh = h.row(i).squaredNorm();
    const double denom = lambda + hh;
    if (denom <= 0.0) {
      e[i] = 0.0;
      continue;
    }
    // h^H (y - h) for row vectors.
    e[i] = (h.row(i).conjugate().cwiseProduct(y.row(i) - h.row(i))).sum() / denom;
  }
  return e;
}

RefinedModel refine(const SnapshotMatrix& y, const RVector& thetas, double ce, const UlaConfig& config,
                    int iters, double tol) {
  require(thetas.size() >= 1, ErrorCode::InvalidArgument, "refine needs at least one angle");
  require(ce >= 0.0, ErrorCode::InvalidArgument, "ce must be non-negative");
  require(iters >= 1, ErrorCode::InvalidArgument, "refine needs at least one iteration");
  require(y.n_antennas() == config.n_antennas(), ErrorCode::DimensionMismatch,
          "snapshot rows differ from the antenna count");
  const CMatrix& yd = y.data();
  const CMatrix a = steering_matrix(thetas, config);
  Eigen::JacobiSVD<CMatrix> svd_a(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  {
    const RVector& sv = svd_a.singularValues();
    const double smin = sv[sv.size() - 1];
    const double cond = smin > 0.0 ? sv[0] / smin : std::numeric_limits<double>::infinity();
    require(thetas.size() <= a.rows() && cond <= kMaxCondition, ErrorCode::RankDeficient,
            "steering matrix condition number " + std::to_string(cond) + " exceeds 1e12");
  }

  RefinedModel r;
  CMatrix dp = svd_a.solve(yd);  // K x P
  r.e_hat = CVector::Zero(yd.rows());
  r.lambda_e = ce > 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  double obj = model_residual(yd, r.e_hat, a * dp);
  r.objective_history.push_back(obj);

  for (int it = 0; it < iters; ++it) {
    const CMatrix h = a * dp;
    // e-step
    if (ce > 0.0) {
      CVector e0 = e_update(yd, h, 0.0);
      if (e0.norm() < ce) {
        r.e_hat = std::move(e0);
        r.lambda_e = 0.0;
        r.lambda_zero_flag = true;
      } else {
        double lo = 0.0, hi = 1.0;
        while (e_update(yd, h, hi).norm() >= ce) {
          lo = hi;
          hi *= 2.0;
          require(hi < 1e300, ErrorCode::InvalidArgument, "lambda bracket diverged");
        }
        while (hi - lo > kBisectionTol * std::max(1.0, hi)) {
          const double mid = 0.5 * (lo + hi);
          if (e_update(yd, h, mid).norm() >= ce) lo = mid;
          else hi = mid;
        }
        r.lambda_e = 0.5 * (lo + hi);
        r.e_hat = e_update(yd, h, r.lambda_e);
        r.lambda_zero_flag = false;
      }
    }
    // D'-step
    const CVector gains = r.e_hat.array() + 1.0;
    require(gains.cwiseAbs().minCoeff() >= kSingularGainTol, ErrorCode::SingularGain,
            "|1 + e_n| below 1e-8");
    const CMatrix dp29 = svd_a.solve(gains.cwiseInverse().asDiagonal() * yd);
    const double before = model_residual(yd, r.e_hat, h);
    double next = model_residual(yd, r.e_hat, a * dp29);
    if (next <= before) {
      dp = dp29;
    } else {
      const CMatrix ga = gains.asDiagonal() * a;
      dp = Eigen::JacobiSVD<CMatrix>(ga, Eigen::ComputeThinU | Eigen::ComputeThinV).solve(yd);
      next = model_residual(yd, r.e_hat, a * dp);
    }
    r.objective_history.push_back(next);
    r.iterations = it + 1;
    const double decrease = obj - next;
    obj = next;
    if (decrease < tol) break;
  }
  r.objective = obj;
  const Eigen::Index k = dp.rows();
  r.b = RVector(k);
  r.d = CMatrix(k, dp.cols());
  for (Eigen::Index i = 0; i < k; ++i) {
    r.b[i] = dp.row(i).norm();
    r.d.row(i) = r.b[i] > 0.0 ? CMatrix(dp.row(i) / r.b[i]) : CMatrix::Zero(1, dp.cols());
  }
  return r;
}

DoaEstimate estimate(const SnapshotMatrix& y, const GpAnmParams& params, const UlaConfig& config) {
  const auto t_start = Clock::now();
  params.validate();
  require(y.n_antennas() == config.n_antennas(), ErrorCode::DimensionMismatch,
          "snapshot rows differ from the antenna count");
  DoaEstimate est;
  EstimateDiagnostics& diag = est.diagnostics;

  auto t0 = Clock::now();
  const GpAnmProgram prog = staged("build_sdp", [&] { return build_sdp(y, params); });
  diag.build_time_s = seconds_since(t0);

  t0 = Clock::now();
  const sdp::SolverSolution sol = staged("solve", [&] { return sdp::solve(prog.problem, params.solver); });
  diag.solve_time_s = seconds_since(t0);
  diag.status = sol.status;
  diag.iterations = sol.iterations;
  diag.residuals = sol.residuals;
  diag.solve_objective = sol.objective_value;

  t0 = Clock::now();
  est.dual = staged("extract_dual", [&] { return extract_dual(sol, prog); });
  diag.objective = (y.data() - est.dual.u).norm();
  est.spectrum = staged("dual_spectrum", [&] {
    return dual_spectrum(est.dual, config, params.grid_step_deg, params.range_deg);
  });
  const PeakResult peaks = staged("peak_search", [&] {
    return peak_search(est.spectrum, PeakOptions{params.peak_rel_threshold, params.k_signals});
  });
  est.thetas_deg = peaks.thetas_deg;
  diag.too_few_peaks = peaks.too_few_peaks;
  diag.spectrum_time_s = seconds_since(t0);

  t0 = Clock::now();
  if (!est.thetas_deg.empty()) {
    RVector th(static_cast<Eigen::Index>(est.thetas_deg.size()));
    for (std::size_t i = 0; i < est.thetas_deg.size(); ++i) th[static_cast<Eigen::Index>(i)] = deg_to_rad(est.thetas_deg[i]);
    // An l1 bound C translates to an l2 radius C / sqrt(N).
    const double ce2 = params.variant == Variant::L2
                           ? params.ce
                           : params.ce / std::sqrt(static_cast<double>(config.n_antennas()));
    est.refined = staged("refine", [&] {
      return refine(y, th, ce2, config, params.refine_iters, params.refine_tol);
    });
  }
  diag.refine_time_s = seconds_since(t0);
  diag.total_time_s = seconds_since(t_start);
  return est;
}

void write_spectrum_csv(std::ostream& os, const Spectrum& spectrum) {
  os << "theta_deg,value\n" << std::setprecision(15);
  for (std::size_t i = 0; i < spectrum.size(); ++i) os << spectrum.theta_deg[i] << ',' << spectrum.value[i] << '\n';
}

void save_spectrum_csv(const std::string& path, const Spectrum& spectrum) {
  std::ofstream os(path, std::ios::binary);
  require(static_cast<bool>(os), ErrorCode::IoError, "cannot open " + path + " for writing");
  write_spectrum_csv(os, spectrum);
}

void write_estimate(std::ostream& os, const DoaEstimate& est) {
  auto list = [](const auto& range, auto&& f) {
    std::ostringstream ss;
    ss << std::setprecision(12);
    bool first = true;
    for (const auto& x : range) {
      if (!first) ss << ',';
      first = false;
      f(ss, x);
    }
    return ss.str();
  };
  const auto& dg = est.diagnostics;
  os << std::setprecision(12);
  os << "thetas_deg=" << list(est.thetas_deg, [](auto& s, double x) { s << x; }) << '\n';
  os << "n_peaks=" << est.thetas_deg.size() << '\n';
  os << "too_few_peaks=" << (dg.too_few_peaks ? "true" : "false") << '\n';
  os << "solver_status=" << sdp::to_string(dg.status) << '\n';
  os << "solver_iterations=" << dg.iterations << '\n';
  os << "primal_residual=" << dg.residuals.primal << '\n';
  os << "dual_residual=" << dg.residuals.dual << '\n';
  os << "objective=" << dg.objective << '\n';
  os << "tau=" << est.dual.tau << '\n';
  os << "kappa=" << est.dual.kappa << '\n';
  os << "q_norm=" << est.dual.q_norm << '\n';
  os << "certificate_bound=" << est.dual.certificate_bound << '\n';
  os << "raw_schur_min_eig=" << est.dual.raw.schur_min_eig << '\n';
  os << "raw_trace_eq_max=" << est.dual.raw.trace_eq_max << '\n';
  os << "raw_norm_excess=" << est.dual.raw.norm_excess << '\n';
  os << "restored=" << (est.dual.raw.restored ? "true" : "false") << '\n';
  if (est.refined) {
    const RefinedModel& r = *est.refined;
    os << "refine_objective=" << r.objective << '\n';
    os << "refine_iterations=" << r.iterations << '\n';
    os << "lambda_e=" << r.lambda_e << '\n';
    os << "lambda_zero_flag=" << (r.lambda_zero_flag ? "true" : "false") << '\n';
    os << "e_hat=" << list(r.e_hat, [](auto& s, cdouble z) { s << z.real() << (z.imag() < 0 ? "" : "+") << z.imag() << 'j'; })
       << '\n';
    os << "b=" << list(r.b, [](auto& s, double x) { s << x; }) << '\n';
  }
  os << "build_time_s=" << dg.build_time_s << '\n';
  os << "solve_time_s=" << dg.solve_time_s << '\n';
  os << "spectrum_time_s=" << dg.spectrum_time_s << '\n';
  os << "refine_time_s=" << dg.refine_time_s << '\n';
  os << "total_time_s=" << dg.total_time_s << '\n';
}

}  // namespace gpanm
