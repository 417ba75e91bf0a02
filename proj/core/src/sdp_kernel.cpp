// SPDX-License-Identifier: Apache-2.0
#include "gpanm/sdp_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <numbers>

#include <Eigen/Sparse>

#include "gpanm/errors.hpp"

namespace gpanm::sdp {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

constexpr double kHermitianTol = 1e-10;
constexpr double kEqualityRhoScale = 1e3;
constexpr double kRhoMin = 1e-6;
constexpr double kRhoMax = 1e6;
constexpr int kAdaptInterval = 50;
constexpr double kInfeasTol = 1e-6;

int svec_dim(int d) { return d * (d + 1) / 2; }

// Lower-triangular, column-major position of (i, j), i >= j.
int svec_index(int d, int i, int j) { return j * d - j * (j - 1) / 2 + (i - j); }

void unpack_svec(const double* v, int d, RMatrix& m) {
  int k = 0;
  for (int j = 0; j < d; ++j) {
    m(j, j) = v[k++];
    for (int i = j + 1; i < d; ++i) {
      const double x = v[k++] / std::numbers::sqrt2;
      m(i, j) = x;
      m(j, i) = x;
    }
  }
}

void pack_svec(const RMatrix& m, int d, double* v) {
  int k = 0;
  for (int j = 0; j < d; ++j) {
    v[k++] = m(j, j);
    for (int i = j + 1; i < d; ++i) v[k++] = std::numbers::sqrt2 * m(i, j);
  }
}

// Cone layout over the stacked slack vector.
struct ConeLayout {
  int n_eq = 0;
  int n_ineq = 0;
  std::vector<int> psd_dims;
  std::vector<int> psd_offsets;
  int total = 0;
};

// Problem data in the form A x + s = b, s in K.
struct StandardForm {
  int n = 0;
  ConeLayout cones;
  SpMat a;
  RVector b;
  RVector q;
  RVector c;
};

StandardForm to_standard_form(const ConicProblem& p) {
  StandardForm f;
  f.n = p.var_dim;
  f.cones.n_eq = static_cast<int>(p.eq_constraints.size());
  f.cones.n_ineq = static_cast<int>(p.ineq_constraints.size());
  int row = f.cones.n_eq + f.cones.n_ineq;
  for (const auto& blk : p.psd_blocks) {
    f.cones.psd_dims.push_back(blk.dim);
    f.cones.psd_offsets.push_back(row);
    row += svec_dim(blk.dim);
  }
  f.cones.total = row;

  std::vector<Triplet> trip;
  f.b = RVector::Zero(row);
  int r = 0;
  for (const auto* group : {&p.eq_constraints, &p.ineq_constraints}) {
    for (const auto& lc : *group) {
      for (const auto& [var, coeff] : lc.coeffs) trip.emplace_back(r, var, coeff);
      f.b[r] = lc.rhs;
      ++r;
    }
  }
  for (std::size_t k = 0; k < p.psd_blocks.size(); ++k) {
    const auto& blk = p.psd_blocks[k];
    const int base = f.cones.psd_offsets[k];
    const int d = blk.dim;
    for (int j = 0; j < d; ++j) {
      for (int i = j; i < d; ++i) {
        const double w = (i == j) ? 1.0 : std::numbers::sqrt2;
        f.b[base + svec_index(d, i, j)] = w * blk.offset(i, j);
      }
    }
    for (const auto& t : blk.terms) {
      const int i = std::max(t.row, t.col);
      const int j = std::min(t.row, t.col);
      const double w = (i == j) ? 1.0 : std::numbers::sqrt2;
      trip.emplace_back(base + svec_index(d, i, j), t.var, -w * t.coeff);
    }
  }
  f.a.resize(row, f.n);
  f.a.setFromTriplets(trip.begin(), trip.end());  // duplicates are summed
  f.a.makeCompressed();

  f.q = p.objective.quadratic.size() ? p.objective.quadratic : RVector::Zero(f.n);
  f.c = p.objective.linear.size() ? p.objective.linear : RVector::Zero(f.n);
  return f;
}

class ConeProjector {
 public:
  explicit ConeProjector(const ConeLayout& cones) : cones_(cones) {
    for (int d : cones_.psd_dims) work_.emplace_back(RMatrix::Zero(d, d));
  }

  void project(RVector& v) {
    v.head(cones_.n_eq).setZero();
    for (int i = cones_.n_eq; i < cones_.n_eq + cones_.n_ineq; ++i) v[i] = std::max(v[i], 0.0);
    for (std::size_t k = 0; k < cones_.psd_dims.size(); ++k) {
      const int d = cones_.psd_dims[k];
      double* seg = v.data() + cones_.psd_offsets[k];
      RMatrix& m = work_[k];
      unpack_svec(seg, d, m);
      eig_.compute(m);
      require(eig_.info() == Eigen::Success, ErrorCode::EigenFailure,
              "eigendecomposition failed in PSD projection");
      const RVector& lam = eig_.eigenvalues();
      if (lam.minCoeff() >= 0.0) continue;
      if (lam.maxCoeff() <= 0.0) {
        std::fill(seg, seg + svec_dim(d), 0.0);
        continue;
      }
      const RMatrix& vecs = eig_.eigenvectors();
      // Eigenvalues are ascending; keep the non-negative tail.
      int first = 0;
      while (lam[first] < 0.0) ++first;
      const int keep = d - first;
      const RMatrix vk = vecs.rightCols(keep) * lam.tail(keep).cwiseSqrt().asDiagonal();
      m.noalias() = vk * vk.transpose();
      pack_svec(m, d, seg);
    }
  }

 private:
  const ConeLayout& cones_;
  std::vector<RMatrix> work_;
  Eigen::SelfAdjointEigenSolver<RMatrix> eig_;
};

// Ruiz equilibration; PSD blocks get a single scale so the cone is preserved.
struct Scaling {
  RVector d;  // variable scaling, x = D xbar
  RVector e;  // row scaling, sbar = E s
  double cost = 1.0;
};

Scaling equilibrate(StandardForm& f, int iters) {
  Scaling sc{RVector::Ones(f.n), RVector::Ones(f.cones.total), 1.0};
  auto inv_sqrt_norm = [](double v) { return (v < 1e-8) ? 1.0 : 1.0 / std::sqrt(std::min(v, 1e8)); };
  for (int it = 0; it < iters; ++it) {
    RVector col = f.q.cwiseAbs();
    RVector row = RVector::Zero(f.cones.total);
    for (int k = 0; k < f.a.outerSize(); ++k) {
      for (SpMat::InnerIterator iter(f.a, k); iter; ++iter) {
        const double v = std::abs(iter.value());
        col[iter.col()] = std::max(col[iter.col()], v);
        row[iter.row()] = std::max(row[iter.row()], v);
      }
    }
    RVector dcol = col.unaryExpr(inv_sqrt_norm);
    RVector erow = row.unaryExpr(inv_sqrt_norm);
    for (std::size_t k = 0; k < f.cones.psd_dims.size(); ++k) {
      const int off = f.cones.psd_offsets[k];
      const int len = svec_dim(f.cones.psd_dims[k]);
      const double mean = row.segment(off, len).mean();
      erow.segment(off, len).setConstant(inv_sqrt_norm(mean));
    }
    f.a = erow.asDiagonal() * f.a * dcol.asDiagonal();
    f.q = f.q.cwiseProduct(dcol).cwiseProduct(dcol);
    f.c = f.c.cwiseProduct(dcol);
    f.b = f.b.cwiseProduct(erow);
    sc.d = sc.d.cwiseProduct(dcol);
    sc.e = sc.e.cwiseProduct(erow);
  }
  const double qmax = f.q.size() ? f.q.cwiseAbs().maxCoeff() : 0.0;
  const double cmax = f.c.size() ? f.c.cwiseAbs().maxCoeff() : 0.0;
  const double denom = std::max(qmax, cmax);
  sc.cost = (denom < 1e-8) ? 1.0 : std::clamp(1.0 / denom, 1e-4, 1e4);
  f.q *= sc.cost;
  f.c *= sc.cost;
  return sc;
}

void rebuild_rho(const ConeLayout& cones, double rho, RVector& rho_vec) {
  rho_vec.setConstant(rho);
  rho_vec.head(cones.n_eq).setConstant(std::min(rho * kEqualityRhoScale, kRhoMax));
}

Eigen::LLT<RMatrix> factor_kkt(const StandardForm& f, double sigma, const RVector& rho_vec) {
  SpMat ata = f.a.transpose() * rho_vec.asDiagonal() * f.a;
  RMatrix k = RMatrix(ata);
  k.diagonal() += f.q + RVector::Constant(f.n, sigma);
  Eigen::LLT<RMatrix> llt(k);
  require(llt.info() == Eigen::Success, ErrorCode::InvalidArgument,
          "KKT factorisation failed (quadratic term must be PSD)");
  return llt;
}

}  // namespace

void PsdBlock::add_offset(int row, int col, double value) {
  offset(row, col) += value;
  if (row != col) offset(col, row) += value;
}

RMatrix PsdBlock::evaluate(const RVector& x) const {
  RMatrix m = offset;
  for (const auto& t : terms) {
    m(t.row, t.col) += t.coeff * x[t.var];
    if (t.row != t.col) m(t.col, t.row) += t.coeff * x[t.var];
  }
  return m;
}

double LinearConstraint::evaluate(const RVector& x) const {
  double v = 0.0;
  for (const auto& [var, coeff] : coeffs) v += coeff * x[var];
  return v;
}

double Objective::evaluate(const RVector& x) const {
  double v = constant;
  if (linear.size()) v += linear.dot(x);
  if (quadratic.size()) v += 0.5 * x.cwiseProduct(x).dot(quadratic);
  return v;
}

void ConicProblem::validate() const {
  require(var_dim >= 1, ErrorCode::InvalidArgument, "problem needs at least one variable");
  require(objective.linear.size() == 0 || objective.linear.size() == var_dim,
          ErrorCode::DimensionMismatch, "objective linear term has the wrong size");
  require(objective.quadratic.size() == 0 || objective.quadratic.size() == var_dim,
          ErrorCode::DimensionMismatch, "objective quadratic term has the wrong size");
  if (objective.quadratic.size())
    require(objective.quadratic.minCoeff() >= 0.0, ErrorCode::InvalidArgument,
            "objective quadratic term must be non-negative");
  auto check_var = [this](int v) {
    require(v >= 0 && v < var_dim, ErrorCode::InvalidArgument, "variable index out of range");
  };
  for (const auto* group : {&eq_constraints, &ineq_constraints})
    for (const auto& lc : *group)
      for (const auto& [var, coeff] : lc.coeffs) check_var(var);
  for (const auto& blk : psd_blocks) {
    require(blk.dim >= 1 && blk.offset.rows() == blk.dim && blk.offset.cols() == blk.dim,
            ErrorCode::DimensionMismatch, "PSD block offset has the wrong size");
    require((blk.offset - blk.offset.transpose()).cwiseAbs().maxCoeff() <= 1e-12,
            ErrorCode::InvalidArgument, "PSD block offset is not symmetric");
    for (const auto& t : blk.terms) {
      check_var(t.var);
      require(t.row >= 0 && t.row < blk.dim && t.col >= 0 && t.col < blk.dim,
              ErrorCode::InvalidArgument, "PSD block term outside the block");
    }
  }
}

void dump_problem(std::ostream& os, const ConicProblem& problem) {
  problem.validate();
  const int n = problem.var_dim;
  os << std::setprecision(17);
  os << "conic_problem var_dim=" << n << " eq=" << problem.eq_constraints.size()
     << " ineq=" << problem.ineq_constraints.size() << " psd=" << problem.psd_blocks.size() << '\n';
  auto dense_row = [n](const std::vector<std::pair<int, double>>& coeffs) {
    RVector r = RVector::Zero(n);
    for (const auto& [v, c] : coeffs) r[v] += c;
    return r;
  };
  auto write_row = [&os](const RVector& r) {
    for (Eigen::Index i = 0; i < r.size(); ++i) os << ' ' << r[i];
  };
  const RVector quad = problem.objective.quadratic.size() ? problem.objective.quadratic : RVector::Zero(n);
  const RVector lin = problem.objective.linear.size() ? problem.objective.linear : RVector::Zero(n);
  os << "objective_constant " << problem.objective.constant << '\n';
  os << "objective_quadratic_diag";
  write_row(quad);
  os << '\n' << "objective_linear";
  write_row(lin);
  os << '\n';
  for (const auto& lc : problem.eq_constraints) {
    os << "eq";
    write_row(dense_row(lc.coeffs));
    os << " = " << lc.rhs << '\n';
  }
  for (const auto& lc : problem.ineq_constraints) {
    os << "ineq";
    write_row(dense_row(lc.coeffs));
    os << " <= " << lc.rhs << '\n';
  }
  for (std::size_t k = 0; k < problem.psd_blocks.size(); ++k) {
    const auto& blk = problem.psd_blocks[k];
    std::vector<RVector> rows(static_cast<std::size_t>(svec_dim(blk.dim)), RVector::Zero(n));
    for (const auto& t : blk.terms) {
      const int i = std::max(t.row, t.col), j = std::min(t.row, t.col);
      rows[static_cast<std::size_t>(svec_index(blk.dim, i, j))][t.var] += t.coeff;
    }
    for (int j = 0; j < blk.dim; ++j) {
      for (int i = j; i < blk.dim; ++i) {
        os << "psd " << k << ' ' << i << ' ' << j << " offset " << blk.offset(i, j) << " coeffs";
        write_row(rows[static_cast<std::size_t>(svec_index(blk.dim, i, j))]);
        os << '\n';
      }
    }
  }
}

std::string_view to_string(SolverStatus status) noexcept {
  switch (status) {
    case SolverStatus::Optimal: return "Optimal";
    case SolverStatus::MaxIters: return "MaxIters";
    case SolverStatus::Infeasible: return "Infeasible";
  }
  return "Unknown";
}

RMatrix embed_hermitian(const CMatrix& h) {
  require(h.rows() == h.cols(), ErrorCode::DimensionMismatch, "embed_hermitian needs a square matrix");
  const double asym = h.size() ? (h - h.adjoint()).cwiseAbs().maxCoeff() : 0.0;
  require(asym <= kHermitianTol, ErrorCode::NotHermitian,
          "matrix is not Hermitian (max asymmetry " + std::to_string(asym) + ")");
  const CMatrix hs = 0.5 * (h + h.adjoint());
  const Eigen::Index n = h.rows();
  RMatrix s(2 * n, 2 * n);
  s.topLeftCorner(n, n) = hs.real();
  s.bottomRightCorner(n, n) = hs.real();
  s.bottomLeftCorner(n, n) = hs.imag();
  s.topRightCorner(n, n) = -hs.imag();
  return s;
}

CMatrix unembed_hermitian(const RMatrix& s) {
  require(s.rows() == s.cols() && s.rows() % 2 == 0, ErrorCode::DimensionMismatch,
          "unembed_hermitian needs an even square matrix");
  const Eigen::Index n = s.rows() / 2;
  CMatrix h(n, n);
  h.real() = 0.5 * (s.topLeftCorner(n, n) + s.bottomRightCorner(n, n));
  h.imag() = 0.5 * (s.bottomLeftCorner(n, n) - s.topRightCorner(n, n));
  return h;
}

RMatrix psd_project(const RMatrix& s) {
  require(s.rows() == s.cols(), ErrorCode::DimensionMismatch, "psd_project needs a square matrix");
  const RMatrix sym = 0.5 * (s + s.transpose());
  Eigen::SelfAdjointEigenSolver<RMatrix> eig(sym);
  require(eig.info() == Eigen::Success, ErrorCode::EigenFailure, "eigendecomposition did not converge");
  const RVector lam = eig.eigenvalues().cwiseMax(0.0);
  return eig.eigenvectors() * lam.asDiagonal() * eig.eigenvectors().transpose();
}

SolverSolution solve(const ConicProblem& problem, const SolverOptions& opts) {
  problem.validate();
  require(opts.abs_tol > 0.0 && opts.rel_tol > 0.0, ErrorCode::InvalidArgument,
          "solver tolerances must be positive");
  require(opts.max_iters >= 1, ErrorCode::InvalidArgument, "max_iters must be at least 1");
  require(opts.alpha > 0.0 && opts.alpha < 2.0, ErrorCode::InvalidArgument,
          "relaxation parameter must lie in (0, 2)");

  StandardForm f = to_standard_form(problem);
  const ConeLayout& cones = f.cones;
  const Scaling sc = equilibrate(f, opts.scaling_iters);
  const SpMat at = f.a.transpose();
  const int m = cones.total;
  const int n = f.n;

  const RVector d_inv = sc.d.cwiseInverse();
  const RVector e_inv = sc.e.cwiseInverse();

  double rho = std::clamp(opts.rho, kRhoMin, kRhoMax);
  RVector rho_vec(m);
  rebuild_rho(cones, rho, rho_vec);
  Eigen::LLT<RMatrix> kkt = factor_kkt(f, opts.sigma, rho_vec);
  ConeProjector projector(cones);

  RVector x = RVector::Zero(n);
  RVector s = RVector::Zero(m);
  RVector y = RVector::Zero(m);
  RVector x_tilde(n), s_tilde(m), w(m), x_new(n), s_new(m), y_new(m), rhs(n);
  RVector y_prev_check = y;

  SolverSolution sol;
  if (opts.record_merit) sol.merit_history.reserve(static_cast<std::size_t>(opts.max_iters));

  // Residuals of the current iterate in original units.
  auto evaluate = [&](const RVector& xs, const RVector& ss, const RVector& ys, Residuals& res,
                      double& prim_scale, double& dual_scale, double& gap, double& pobj) {
    const RVector ax = f.a * xs;
    const RVector rp = (ax + ss - f.b).cwiseProduct(e_inv);
    double rprim = 0.0;
    if (cones.n_eq + cones.n_ineq > 0)
      rprim = rp.head(cones.n_eq + cones.n_ineq).cwiseAbs().maxCoeff();
    for (std::size_t k = 0; k < cones.psd_dims.size(); ++k)
      rprim = std::max(rprim, rp.segment(cones.psd_offsets[k], svec_dim(cones.psd_dims[k])).norm());
    const RVector qx = f.q.cwiseProduct(xs);
    const RVector aty = at * ys;
    const RVector rd = (qx + f.c - aty).cwiseProduct(d_inv) / sc.cost;
    res.primal = rprim;
    res.dual = n ? rd.cwiseAbs().maxCoeff() : 0.0;
    auto inf_norm = [](const RVector& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; };
    prim_scale = std::max({inf_norm(ax.cwiseProduct(e_inv)), inf_norm(ss.cwiseProduct(e_inv)),
                           inf_norm(f.b.cwiseProduct(e_inv))});
    dual_scale = std::max({inf_norm(qx.cwiseProduct(d_inv)), inf_norm(aty.cwiseProduct(d_inv)),
                           inf_norm(f.c.cwiseProduct(d_inv))}) / sc.cost;
    // Scaled objective values divided by the cost scale give original units.
    const double xqx = xs.dot(qx);
    pobj = (0.5 * xqx + f.c.dot(xs)) / sc.cost;
    const double dobj = (-0.5 * xqx + f.b.dot(ys)) / sc.cost;
    gap = std::abs(pobj - dobj);
  };

  int iter = 0;
  bool done = false;
  for (iter = 1; iter <= opts.max_iters; ++iter) {
    rhs = opts.sigma * x - f.c + at * (rho_vec.cwiseProduct(f.b - s) + y);
    x_tilde = kkt.solve(rhs);
    s_tilde = f.b - f.a * x_tilde;
    x_new = opts.alpha * x_tilde + (1.0 - opts.alpha) * x;
    w = opts.alpha * s_tilde + (1.0 - opts.alpha) * s + y.cwiseQuotient(rho_vec);
    s_new = w;
    projector.project(s_new);
    y_new = rho_vec.cwiseProduct(w - s_new);

    if (opts.record_merit) {
      const double merit = std::sqrt(opts.sigma * (x_new - x).squaredNorm() +
                                     (s_new - s).cwiseAbs2().dot(rho_vec) +
                                     (y_new - y).cwiseAbs2().dot(rho_vec.cwiseInverse()));
      sol.merit_history.push_back(merit);
    }
    x.swap(x_new);
    s.swap(s_new);
    y.swap(y_new);

    const bool check = (iter % opts.check_interval == 0) || iter == opts.max_iters;
    if (!check) continue;

    Residuals res;
    double prim_scale = 0.0, dual_scale = 0.0, gap = 0.0, pobj = 0.0;
    evaluate(x, s, y, res, prim_scale, dual_scale, gap, pobj);
    sol.residuals = res;

    if (opts.verbose && iter % (10 * opts.check_interval) == 0) {
      std::cerr << "iter " << std::setw(6) << iter << "  rp " << std::scientific << std::setprecision(3)
                << res.primal << "  rd " << res.dual << "  gap " << gap << "  rho " << rho << '\n'
                << std::defaultfloat;
    }

    const double obj_scale = std::max(1.0, std::abs(pobj));
    if (res.primal <= opts.abs_tol && res.dual <= opts.abs_tol + opts.rel_tol * dual_scale &&
        gap <= opts.abs_tol + opts.rel_tol * obj_scale) {
      sol.status = SolverStatus::Optimal;
      done = true;
      break;
    }

    // Primal infeasibility certificate from the multiplier increments.
    const RVector dy = y - y_prev_check;
    y_prev_check = y;
    const double dy_norm = dy.cwiseProduct(sc.e).cwiseAbs().maxCoeff();
    if (dy_norm > 1e-12) {
      const double atdy = (at * dy).cwiseProduct(d_inv).cwiseAbs().maxCoeff();
      const double bdy = f.b.cwiseProduct(e_inv).dot(dy.cwiseProduct(sc.e)) ;
      if (atdy <= kInfeasTol * dy_norm && bdy > kInfeasTol * dy_norm) {
        sol.status = SolverStatus::Infeasible;
        done = true;
        break;
      }
    }

    if (opts.adaptive_rho && iter % kAdaptInterval == 0) {
      // Residual balancing in the scaled space.
      const RVector ax = f.a * x;
      const double rp_s = (ax + s - f.b).cwiseAbs().maxCoeff();
      const double rd_s = (f.q.cwiseProduct(x) + f.c - at * y).cwiseAbs().maxCoeff();
      const double ps = std::max({ax.cwiseAbs().maxCoeff(), s.cwiseAbs().maxCoeff(),
                                  f.b.cwiseAbs().maxCoeff(), 1e-12});
      const double ds = std::max({f.q.cwiseProduct(x).cwiseAbs().maxCoeff(),
                                  (at * y).cwiseAbs().maxCoeff(), f.c.cwiseAbs().maxCoeff(), 1e-12});
      const double ratio = std::sqrt((rp_s / ps) / std::max(rd_s / ds, 1e-30));
      const double proposed = std::clamp(rho * ratio, kRhoMin, kRhoMax);
      if (proposed > 5.0 * rho || proposed < 0.2 * rho) {
        rho = proposed;
        rebuild_rho(cones, rho, rho_vec);
        kkt = factor_kkt(f, opts.sigma, rho_vec);
      }
    }
  }
  if (!done) sol.status = SolverStatus::MaxIters;
  sol.iterations = std::min(iter, opts.max_iters);
  sol.primal = x.cwiseProduct(sc.d);
  sol.objective_value = problem.objective.evaluate(sol.primal);
  return sol;
}

}  // namespace gpanm::sdp
