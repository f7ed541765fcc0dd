#pragma once

// Diagonal subproblem: for fixed R minimise
//   tr(C D R D) - 2 (1 - alpha) log det D
// over positive diagonal D. Dividing by 2(1 - alpha) gives
//   f(d) = 1/2 d' A d - sum_i log d_i,   A = (R o C) / (1 - alpha),
// whose unique stationary point solves the matrix-scaling system A d = 1/d,
// i.e. D A D e = e.

#include <vector>

#include "pcglasso/matrix_core.hpp"

namespace pcglasso {

struct ScalingProblem {
  Matrix a;
  double alpha = 0.0;
  double lambda_min_chat = 0.0;
};

struct DSolveConfig {
  int max_iter = 200;
  /// Early exit once the objective drop of an accepted step falls below tol.
  double tol = 1e-10;
  /// Companion stationarity test ||A d - 1/d||_inf <= grad_tol (1 + ||d||_inf).
  /// Set to infinity for the pure objective-drop rule.
  double grad_tol = 1e-10;
  double eta_min = 1e-14;
  double c1 = 1e-4;
  double c2 = 0.9;
  int max_line_search_steps = 20;
  bool record_trace = false;

  void validate() const;
};

struct DIterate {
  int iter;
  double objective;
  double grad_norm;
  double step;
};

struct DSolveResult {
  Vector d;
  int iterations = 0;
  bool converged = false;
  double final_gradient_norm = 0.0;
  /// f(d) at the start and after every accepted step; non-increasing.
  std::vector<double> objective_trace;
  /// Largest condition number of the diagonal Hessian model seen on the path.
  double max_hessian_condition = 1.0;
  double min_d_visited = 0.0;
  double max_d_visited = 0.0;
  std::vector<DIterate> trace;
};

/// A = (R o C) / (1 - alpha). Throws a configuration error when alpha >= 1.
ScalingProblem build_scaling_problem(const Matrix& r, const CorrelationMatrix& chat, double alpha);

/// f(d) = 1/2 d'Ad - sum log d_i
double scaling_objective(const Matrix& a, const Vector& d);
/// A d - 1/d
Vector scaling_gradient(const Matrix& a, const Vector& d);

DSolveResult solve_d_diagonal_newton(const ScalingProblem& prob, const DSolveConfig& cfg, const Vector& init);
DSolveResult solve_d_exact_newton(const ScalingProblem& prob, const DSolveConfig& cfg, const Vector& init);

struct Interval {
  double lo;
  double hi;
  bool contains(double x) const { return x >= lo && x <= hi; }
};

/// Box that contains every entry of the scaling solution when C is positive definite:
/// [sqrt((1-alpha) lmin) / p, sqrt(p (1-alpha) / lmin)].
Interval d_bounds(double lambda_min_chat, double alpha, Index p);

}  // namespace pcglasso
