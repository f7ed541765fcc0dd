#include "pcglasso/r_solver.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "pcglasso/error.hpp"
#include "pcglasso/kernels.hpp"

namespace pcglasso {

double soft_threshold(double x, double lambda) {
  const double m = std::fabs(x) - lambda;
  if (m <= 0.0) return 0.0;
  return std::copysign(m, x);
}

double default_r_tolerance(const Matrix& s) {
  const Index p = s.rows();
  if (p < 2) return 1e-12;
  const double mean_off = (s.cwiseAbs().sum() - s.diagonal().cwiseAbs().sum()) / static_cast<double>(p * (p - 1));
  return std::max(1e-7 * mean_off, 1e-12);
}

namespace detail {

bool lasso_column(const Matrix& s, const Matrix& w, Matrix& work, Index j, double lambda, double tol, int max_inner,
                  Vector& v) {
  const auto& k = kernels::active();
  const Index p = s.rows();
  const auto up = static_cast<std::size_t>(p);
  double* beta = work.col(j).data();
  beta[j] = 0.0;
  v.resize(p);
  k.gemv(w.data(), static_cast<std::size_t>(w.outerStride()), up, up, beta, v.data());
  const double* s_col = s.col(j).data();
  for (int pass = 0; pass < max_inner; ++pass) {
    double delta_max = 0.0;
    for (Index i = 0; i < p; ++i) {
      if (i == j) continue;
      const double wii = w(i, i);
      const double c = soft_threshold(s_col[i] - v(i) + wii * beta[i], lambda) / wii;
      const double delta = c - beta[i];
      if (delta != 0.0) {
        beta[i] = c;
        k.axpy(delta, w.col(i).data(), v.data(), up);
        delta_max = std::max(delta_max, std::fabs(delta));
      }
    }
    if (delta_max * static_cast<double>(p) < tol) return true;
  }
  return false;
}

}  // namespace detail

RSolveResult solve_r(const Matrix& s, double lambda, const RSolveConfig& cfg, const RWarmStart* warm) {
  if (!(lambda >= 0.0)) bad_config("lambda must be >= 0");
  require_symmetric(s, "S");
  const Index p = s.rows();
  for (Index i = 0; i < p; ++i) {
    if (!(s(i, i) > 0.0)) reject("S must have a strictly positive diagonal");
  }
  if (lambda == 0.0 && !is_positive_definite(s)) {
    reject("S is singular and lambda = 0: the correlation subproblem is unbounded");
  }

  RSolveResult res;
  res.tol_used = cfg.tol > 0.0 ? cfg.tol : default_r_tolerance(s);
  const double tau = res.tol_used;

  Matrix work = Matrix::Zero(p, p);
  Matrix w = Matrix::Identity(p, p);
  if (warm != nullptr) {
    if (warm->r.rows() != p || warm->w.rows() != p) reject("warm start has the wrong dimension");
    work = -warm->r;
    work.diagonal().setZero();
    w = warm->w;
  }

  const auto& k = kernels::active();
  const auto up = static_cast<std::size_t>(p);
  Vector v(p);
  for (int sweep = 1; sweep <= cfg.max_sweeps; ++sweep) {
    double delta_max = 0.0;
    for (Index j = 0; j < p; ++j) {
      detail::lasso_column(s, w, work, j, lambda, tau, cfg.max_inner, v);
      // The diagonal of W is refreshed separately below, so only the
      // off-diagonal part of the column enters the change measure.
      const double old_jj = w(j, j);
      v(j) = old_jj;
      delta_max = std::max(delta_max, k.l1_distance(w.col(j).data(), v.data(), up));
      w.col(j) = v;
      w.row(j) = v.transpose();
      const double new_jj = 1.0 + k.dot(w.col(j).data(), work.col(j).data(), up);
      delta_max = std::max(delta_max, std::fabs(new_jj - old_jj));
      w(j, j) = new_jj;
    }
    res.sweeps = sweep;
    if (cfg.record_trace) res.trace.push_back({sweep, delta_max, count_offdiag_nonzero(work)});
    if (delta_max < tau) {
      res.converged = true;
      break;
    }
  }

  res.r = -work;
  res.r.diagonal().setOnes();
  symmetrize(res.r);
  res.w = std::move(w);
  return res;
}

double r_objective(const Matrix& r, const Matrix& s, double lambda) {
  Eigen::LLT<Matrix> llt(r);
  if (llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
  const double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  const double l1_off = r.cwiseAbs().sum() - r.diagonal().cwiseAbs().sum();
  return -logdet + (r.cwiseProduct(s)).sum() + lambda * l1_off;
}

DualFeasibilityReport check_dual_feasibility(const Matrix& r, const Matrix& w, const Matrix& s, double lambda,
                                             double kkt_tol) {
  const Index p = s.rows();
  if (r.rows() != p || w.rows() != p) reject("shape mismatch in dual feasibility check");
  DualFeasibilityReport rep;
  const Matrix rw = r * w;
  for (Index i = 0; i < p; ++i) rep.diag_residual = std::max(rep.diag_residual, std::fabs(rw(i, i) - 1.0));
  for (Index j = 0; j < p; ++j) {
    for (Index i = 0; i < p; ++i) {
      if (i == j) continue;
      const double gap = w(i, j) - s(i, j);
      rep.max_offdiag_violation = std::max(rep.max_offdiag_violation, std::fabs(gap) - lambda);
      if (r(i, j) != 0.0 && std::fabs(gap - lambda * (r(i, j) > 0 ? 1.0 : -1.0)) > kkt_tol * std::max(1.0, lambda)) {
        ++rep.kkt_sign_violations;
      }
    }
  }
  return rep;
}

}  // namespace pcglasso
