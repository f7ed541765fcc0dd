#pragma once

// Correlation subproblem: for S = D C D minimise over unit-diagonal PD R
//   -log det R + tr(R S) + lambda * ||R||_{1,off}
// by block coordinate descent on the dual
//   max log det W - tr W  s.t. |W_ij - S_ij| <= lambda (i != j),
// one column of W at a time, each column update being a LASSO solved by
// coordinate descent.
//
// Sign convention: while iterating, the off-diagonal entries of column j of
// the working matrix hold the LASSO coefficients beta = W11^{-1} w12 and the
// working diagonal is zero. Since R = W^{-1} has r12 = -beta and r22 = 1, the
// finalisation negates the working matrix, writes a unit diagonal and
// symmetrises. Warm starts therefore load -R0 with a zeroed diagonal.

#include <optional>
#include <vector>

#include "pcglasso/matrix_core.hpp"

namespace pcglasso {

struct RSolveConfig {
  /// Convergence threshold tau. Non-positive selects default_r_tolerance(S).
  double tol = 0.0;
  int max_sweeps = 5000;
  int max_inner = 10000;
  bool record_trace = false;
};

struct RWarmStart {
  Matrix r;  // unit-diagonal PD
  Matrix w;  // PD, ideally r^{-1}
};

struct RSweep {
  int sweep;
  double delta_max;
  Index nnz;
};

struct RSolveResult {
  Matrix r;
  Matrix w;
  int sweeps = 0;
  bool converged = false;
  double tol_used = 0.0;
  std::vector<RSweep> trace;
};

struct DualFeasibilityReport {
  double max_offdiag_violation = 0.0;  // max_{i!=j} (|W_ij - S_ij| - lambda)_+
  double diag_residual = 0.0;          // max_i |(R W)_ii - 1|
  Index kkt_sign_violations = 0;       // r_ij != 0 but W_ij - S_ij != lambda sign(r_ij)
};

double soft_threshold(double x, double lambda);

/// 1e-7 times the mean absolute off-diagonal entry of S, floored at 1e-12.
double default_r_tolerance(const Matrix& s);

RSolveResult solve_r(const Matrix& s, double lambda, const RSolveConfig& cfg = {},
                     const RWarmStart* warm = nullptr);

/// -log det R + tr(R S) + lambda ||R||_{1,off}; +inf when R is not PD.
double r_objective(const Matrix& r, const Matrix& s, double lambda);

DualFeasibilityReport check_dual_feasibility(const Matrix& r, const Matrix& w, const Matrix& s, double lambda,
                                             double kkt_tol = 1e-6);

struct GlassoResult {
  Matrix k;
  Matrix w;
  int sweeps = 0;
  bool converged = false;
};

/// Standard graphical lasso with the penalty on off-diagonal entries only
/// (dual box |W_ij - S_ij| <= lambda, W_ii = S_ii), solved by the same
/// column-wise dual coordinate descent.
GlassoResult glasso_fit(const Matrix& s, double lambda, const RSolveConfig& cfg = {});

namespace detail {

/// One column LASSO of the dual coordinate descent: updates beta = work.col(j)
/// (entry j ignored and assumed zero) in place and returns v = W beta.
/// Returns false when max_inner passes did not reach delta_max * p < tol.
bool lasso_column(const Matrix& s, const Matrix& w, Matrix& work, Index j, double lambda, double tol,
                  int max_inner, Vector& v);

}  // namespace detail

}  // namespace pcglasso
