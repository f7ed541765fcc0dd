#include <cmath>

#include "pcglasso/error.hpp"
#include "pcglasso/kernels.hpp"
#include "pcglasso/r_solver.hpp"

namespace pcglasso {

GlassoResult glasso_fit(const Matrix& s, double lambda, const RSolveConfig& cfg) {
  if (!(lambda >= 0.0)) bad_config("lambda must be >= 0");
  require_symmetric(s, "S");
  const Index p = s.rows();
  for (Index i = 0; i < p; ++i) {
    if (!(s(i, i) > 0.0)) reject("S must have a strictly positive diagonal");
  }
  if (lambda == 0.0 && !is_positive_definite(s)) reject("S is singular and lambda = 0: GLASSO is unbounded");

  const double tau = cfg.tol > 0.0 ? cfg.tol : default_r_tolerance(s);
  const auto& k = kernels::active();
  const auto up = static_cast<std::size_t>(p);

  GlassoResult res;
  Matrix w = s;
  Matrix beta = Matrix::Zero(p, p);
  Vector v(p);
  for (int sweep = 1; sweep <= cfg.max_sweeps; ++sweep) {
    double delta_max = 0.0;
    for (Index j = 0; j < p; ++j) {
      detail::lasso_column(s, w, beta, j, lambda, tau, cfg.max_inner, v);
      v(j) = w(j, j);  // unpenalised diagonal: W_jj = S_jj throughout
      delta_max = std::max(delta_max, k.l1_distance(w.col(j).data(), v.data(), up));
      w.col(j) = v;
      w.row(j) = v.transpose();
    }
    res.sweeps = sweep;
    if (delta_max < tau) {
      res.converged = true;
      break;
    }
  }

  res.k.resize(p, p);
  for (Index j = 0; j < p; ++j) {
    const double kjj = 1.0 / (w(j, j) - k.dot(w.col(j).data(), beta.col(j).data(), up));
    res.k.col(j) = -kjj * beta.col(j);
    res.k(j, j) = kjj;
  }
  symmetrize(res.k);
  res.w = std::move(w);
  return res;
}

}  // namespace pcglasso
