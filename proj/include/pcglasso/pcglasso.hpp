#pragma once

// Partial-correlation graphical lasso. On the correlation scale the estimator
// minimises over unit-diagonal PD R and positive diagonal D
//
//   F(R, D) = -log det R - 2 (1 - alpha) log det D + tr(C D R D) + lambda ||R||_{1,off}
//
// by block coordinate descent (D-step, then R-step). F is strictly convex in
// each block but not jointly convex, so fits stop at coordinate-wise minimisers.

#include <chrono>
#include <cstdint>
#include <optional>
#include <vector>

#include "pcglasso/d_solver.hpp"
#include "pcglasso/matrix_core.hpp"
#include "pcglasso/r_solver.hpp"

namespace pcglasso {

struct WarmStart {
  PrecisionFactorization fact;
  /// Dual matrix matching fact.r; computed as fact.r^{-1} when absent.
  std::optional<Matrix> w;
};

struct SolverConfig {
  double lambda = 0.0;
  double alpha = 0.0;
  /// Relative objective change between outer iterations.
  double outer_tol = 1e-8;
  int outer_max_iter = 500;
  /// Outer iterations also require the coordinate-wise stationarity residual
  /// to drop below stationarity_tol * (1 + ||D C D||_inf).
  double stationarity_tol = 1e-9;
  DSolveConfig d_cfg;
  /// R-subproblem threshold tau (absolute).
  double r_tol = 1e-11;
  int r_max_sweeps = 5000;
  /// Extra random restarts with d drawn log-uniformly inside the D bounds box.
  int restarts = 1;
  std::uint64_t seed = 0;
  std::optional<WarmStart> warm;

  void validate() const;

  /// Defaults overridden by PCGLASSO_OUTER_TOL, PCGLASSO_OUTER_MAX_ITER,
  /// PCGLASSO_STATIONARITY_TOL, PCGLASSO_R_TOL, PCGLASSO_D_TOL, PCGLASSO_D_MAX_ITER.
  static SolverConfig from_env();

  /// Diagonal penalty weight alpha = 4 / n suggested for sample size n.
  static double alpha_for_sample_size(Index n) { return 4.0 / static_cast<double>(n); }
};

struct FitResult {
  double lambda = 0.0;
  double alpha = 0.0;
  PrecisionFactorization fact;                 // correlation scale
  std::optional<PrecisionFactorization> fact_cov;  // covariance scale, when a scale vector was given
  Matrix w;                                    // dual from the last R-step
  /// Objective at the start and after every outer iteration.
  std::vector<double> objective_trace;
  /// Objective after every half step (D-step, R-step, D-step, ...).
  std::vector<double> step_objectives;
  double stationarity_residual = 0.0;
  double stationarity_threshold = 0.0;
  int outer_iters = 0;
  std::chrono::duration<double, std::milli> wall_time{0};
  bool converged = false;

  Matrix k() const { return fact.compose(); }
  Matrix k_cov() const { return fact_cov ? fact_cov->compose() : fact.compose(); }
  double objective() const { return objective_trace.empty() ? 0.0 : objective_trace.back(); }
};

/// F(R, D) above. Throws when r is not PD or d is not positive.
double objective(const Matrix& r, const Vector& d, const Matrix& chat, double lambda, double alpha);

FitResult fit(const CorrelationMatrix& chat, const SolverConfig& cfg, const std::optional<Vector>& scale = std::nullopt);

/// Largest violation of the coordinate-wise stationarity system
///   R^{-1} - D C D = lambda Pi + alpha I - lambda diag(J' |R|),
/// with Pi a valid subgradient of ||R||_{1,off}: Pi_ij = sign(R_ij) where
/// R_ij != 0, Pi_ij in [-1, 1] where R_ij == 0, Pi_ii = 0.
double stationarity_residual(const Matrix& r, const Vector& d, const Matrix& chat, double lambda, double alpha);

struct ExplicitD {
  Vector d;
  bool ok = true;  // false when some d_i^2 <= 0
};

/// d(R)^2 = lambda diag(J'|R|) + diag(R^{-1}) - alpha, the value D takes at any
/// coordinate-wise minimiser with this R.
ExplicitD explicit_d_from_r(const Matrix& r, double lambda, double alpha);

struct ConsistencyCheck {
  double lhs;  // ||K^{-1} - C||_inf
  double rhs;  // (lambda p + |alpha|) p^2 / ((1 - alpha) lambda_min(C))
  bool holds;  // lhs <= rhs + slack
};

/// `slack` absorbs the solver tolerance, which matters when rhs is 0 (lambda = alpha = 0).
ConsistencyCheck consistency_bound_check(const FitResult& fit, const CorrelationMatrix& chat, double lambda,
                                         double alpha, double slack = 1e-6);

enum class UniquenessRegime { small_correlation_regime, none };

/// small_correlation_regime iff ||C - I||_inf <= (2 (1 - alpha) p^3)^{-1/2}.
UniquenessRegime uniqueness_certificate(const CorrelationMatrix& chat, double lambda, double alpha);

}  // namespace pcglasso
