// SPDX-License-Identifier: Apache-2.0
//
// A small dense conic solver for problems of the form
//
//   minimize    1/2 x' diag(q) x + c' x + c0
//   subject to  a_i' x  = b_i                 (equalities)
//               a_j' x <= b_j                 (inequalities)
//               M_k(x) = F_k0 + sum_i x_i F_ki  is PSD  (real symmetric blocks)
//
// solved by operator splitting (ADMM with over-relaxation, Ruiz equilibration
// and residual-balancing penalty updates). Complex Hermitian PSD constraints are
// handled by the caller through `embed_hermitian`.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gpanm/array_model.hpp"

namespace gpanm::sdp {

// coeff * x[var], added at (row, col) and mirrored at (col, row).
struct SymTerm {
  int row;
  int col;
  int var;
  double coeff;
};

struct PsdBlock {
  int dim = 0;
  RMatrix offset;  // symmetric dim x dim constant part
  std::vector<SymTerm> terms;

  explicit PsdBlock(int d = 0) : dim(d), offset(RMatrix::Zero(d, d)) {}

  // Adds coeff * x[var] to entries (row, col) and (col, row); a diagonal entry
  // receives it once.
  void add(int row, int col, int var, double coeff) { terms.push_back({row, col, var, coeff}); }
  void add_offset(int row, int col, double value);

  // Evaluates the affine map at x.
  RMatrix evaluate(const RVector& x) const;
};

struct LinearConstraint {
  std::vector<std::pair<int, double>> coeffs;  // sparse (var, coefficient)
  double rhs = 0.0;

  double evaluate(const RVector& x) const;
};

struct Objective {
  RVector quadratic;  // diagonal of q (empty means zero)
  RVector linear;     // c (empty means zero)
  double constant = 0.0;

  double evaluate(const RVector& x) const;
};

struct ConicProblem {
  int var_dim = 0;
  Objective objective;
  std::vector<PsdBlock> psd_blocks;
  std::vector<LinearConstraint> eq_constraints;
  std::vector<LinearConstraint> ineq_constraints;

  // Throws InvalidArgument on inconsistent sizes, out-of-range variable
  // indices or non-symmetric offsets.
  void validate() const;
};

// Debug dump for cross-checking against external solvers: a header line, then one
// line per constraint (linear constraints as dense coefficient rows, PSD blocks
// as one line per lower-triangular entry with its dense coefficient row).
void dump_problem(std::ostream& os, const ConicProblem& problem);

struct SolverOptions {
  double abs_tol = 1e-7;
  double rel_tol = 1e-6;
  int max_iters = 50'000;
  bool verbose = false;

  // Splitting parameters.
  double rho = 0.1;
  double sigma = 1e-6;
  double alpha = 1.6;
  bool adaptive_rho = true;
  int scaling_iters = 10;
  int check_interval = 10;
  // Keep the fixed-point merit of every iteration in SolverSolution::merit_history.
  bool record_merit = false;
};

enum class SolverStatus { Optimal, MaxIters, Infeasible };

std::string_view to_string(SolverStatus status) noexcept;

struct Residuals {
  double primal = 0.0;  // max over constraint groups, unscaled
  double dual = 0.0;    // ||q x + c - A' y||_inf, unscaled
};

struct SolverSolution {
  RVector primal;
  double objective_value = 0.0;
  SolverStatus status = SolverStatus::MaxIters;
  Residuals residuals;
  int iterations = 0;
  std::vector<double> merit_history;
};

// [[Re H, -Im H], [Im H, Re H]]. Inputs within 1e-10 of Hermitian are
// symmetrised first; anything further off raises NotHermitian.
RMatrix embed_hermitian(const CMatrix& h);

// Inverse of embed_hermitian for matrices with that block structure.
CMatrix unembed_hermitian(const RMatrix& s);

// Frobenius-nearest PSD matrix: V max(L, 0) V'. Raises EigenFailure if the
// eigendecomposition does not converge.
RMatrix psd_project(const RMatrix& s);

SolverSolution solve(const ConicProblem& problem, const SolverOptions& opts = {});

}  // namespace gpanm::sdp
