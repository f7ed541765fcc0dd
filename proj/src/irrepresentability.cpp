#include "pcglasso/irrepresentability.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <unsupported/Eigen/KroneckerProduct>

#include "pcglasso/error.hpp"
#include "pcglasso/parallel.hpp"

namespace pcglasso {
namespace {

void require_dense_dim(Index p) {
  if (p > kMaxDenseIrrDim) {
    reject("dense irrepresentability path supports p <= " + std::to_string(kMaxDenseIrrDim) + ", got " +
           std::to_string(p));
  }
}

Matrix spd_inverse(const Matrix& m, const char* what) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) reject(std::string(what) + " is not positive definite");
  Matrix inv = llt.solve(Matrix::Identity(m.rows(), m.cols()));
  symmetrize(inv);
  return inv;
}

// 1/2 Pdiag (I kron A + A kron I): only rows at diagonal positions survive.
Matrix half_diag_sum(const Matrix& a) {
  const Index p = a.rows();
  const Matrix eye = Matrix::Identity(p, p);
  Matrix out = 0.5 * (kron(eye, a) + kron(a, eye));
  for (Index m = 0; m < p * p; ++m) {
    if (m % (p + 1) != 0) out.row(m).setZero();
  }
  return out;
}

}  // namespace

SupportSet SupportSet::of(const Matrix& k, double threshold) {
  if (k.rows() != k.cols()) reject("support: matrix must be square");
  SupportSet s;
  s.p = k.rows();
  for (Index j = 0; j < s.p; ++j) {
    for (Index i = 0; i < s.p; ++i) {
      const bool in = i == j || std::fabs(k(i, j)) > threshold || std::fabs(k(j, i)) > threshold;
      (in ? s.pairs : s.complement).emplace_back(i, j);
    }
  }
  return s;
}

std::vector<Index> SupportSet::vec_positions() const {
  std::vector<Index> out;
  out.reserve(pairs.size());
  for (const auto& [i, j] : pairs) out.push_back(vec_index(i, j, p));
  return out;
}

std::vector<Index> SupportSet::complement_vec_positions() const {
  std::vector<Index> out;
  out.reserve(complement.size());
  for (const auto& [i, j] : complement) out.push_back(vec_index(i, j, p));
  return out;
}

Matrix kron(const Matrix& a, const Matrix& b) { return Eigen::kroneckerProduct(a, b).eval(); }

Matrix diag_projection(Index p) {
  Matrix out = Matrix::Zero(p * p, p * p);
  for (Index i = 0; i < p; ++i) out(vec_index(i, i, p), vec_index(i, i, p)) = 1.0;
  return out;
}

Matrix m_r(const Matrix& r) {
  require_dense_dim(r.rows());
  const Index q = r.rows() * r.rows();
  return Matrix::Identity(q, q) - half_diag_sum(r);
}

Matrix m_tilde(const Matrix& r) { return m_r(r) + diag_projection(r.rows()); }

Matrix n_tilde(const Matrix& r) {
  require_dense_dim(r.rows());
  const Index p = r.rows();
  return Matrix::Identity(p * p, p * p) - diag_projection(p) + half_diag_sum(r);
}

Matrix gamma_tilde(const Matrix& r_star) {
  const Index p = r_star.rows();
  require_dense_dim(p);
  require_symmetric(r_star, "R*");
  const Matrix rinv = spd_inverse(r_star, "R*");
  Matrix g = kron(rinv, rinv);
  for (Index m = 0; m < p * p; ++m) {
    if (m % (p + 1) == 0) g.row(m).setZero();
  }
  g += half_diag_sum(rinv);
  return g;
}

Matrix sign_pattern(const Matrix& k, double threshold) {
  const Index p = k.rows();
  Matrix pi = Matrix::Zero(p, p);
  for (Index j = 0; j < p; ++j) {
    for (Index i = 0; i < p; ++i) {
      if (i != j && std::fabs(k(i, j)) > threshold) pi(i, j) = k(i, j) > 0.0 ? 1.0 : -1.0;
    }
  }
  return pi;
}

double irr_value(const Matrix& gamma, const SupportSet& support, const Matrix& pi) {
  const Index p = support.p;
  if (gamma.rows() != p * p || gamma.cols() != p * p || pi.rows() != p) reject("irr: dimension mismatch");
  const std::vector<Index> s = support.vec_positions();
  const std::vector<Index> sc = support.complement_vec_positions();
  if (sc.empty()) return 0.0;

  const auto ns = static_cast<Index>(s.size());
  Matrix g_ss(ns, ns);
  Vector pi_s(ns);
  for (Index b = 0; b < ns; ++b) {
    pi_s(b) = pi.data()[s[static_cast<std::size_t>(b)]];
    for (Index a = 0; a < ns; ++a) g_ss(a, b) = gamma(s[static_cast<std::size_t>(a)], s[static_cast<std::size_t>(b)]);
  }
  if (pi_s.cwiseAbs().maxCoeff() == 0.0) return 0.0;

  Eigen::FullPivLU<Matrix> lu(g_ss);
  if (!lu.isInvertible() || lu.rcond() < 1e-14) reject("irr: Gamma_SS is numerically singular");
  const Vector y = lu.solve(pi_s);

  double worst = 0.0;
  for (const Index row : sc) {
    double v = 0.0;
    for (Index b = 0; b < ns; ++b) v += gamma(row, s[static_cast<std::size_t>(b)]) * y(b);
    worst = std::max(worst, std::fabs(v));
  }
  return worst;
}

double irr_pcglasso(const Matrix& k_star) {
  require_dense_dim(k_star.rows());
  require_symmetric(k_star, "K*");
  const PrecisionFactorization f = factorize_precision(k_star);
  return irr_value(gamma_tilde(f.r), SupportSet::of(k_star), sign_pattern(k_star));
}

double irr_glasso(const Matrix& sigma_star) {
  require_dense_dim(sigma_star.rows());
  require_symmetric(sigma_star, "Sigma*");
  const Matrix k = spd_inverse(sigma_star, "Sigma*");
  return irr_value(kron(sigma_star, sigma_star), SupportSet::of(k), sign_pattern(k));
}

IrrReport irr_report(const Matrix& k_star) {
  IrrReport rep;
  rep.pd_input = is_positive_definite(k_star);
  if (!rep.pd_input) reject("K* is not positive definite");
  rep.irr_pcg = irr_pcglasso(k_star);
  rep.irr_glasso = irr_glasso(spd_inverse(k_star, "K*"));
  rep.pcg_satisfied = rep.irr_pcg < 1.0;
  rep.glasso_satisfied = rep.irr_glasso < 1.0;
  return rep;
}

HubIrr hub_irr_closed_form(double a, double b, double c, Index p) {
  if (!(a > 0.0) || !(b > 0.0)) bad_config("hub parameters need a > 0 and b > 0");
  if (p < 2) bad_config("hub needs p >= 2");
  const double x = c * c / (a * b);
  const double pm1 = static_cast<double>(p - 1);
  HubIrr out;
  out.pcg = std::fabs(c) / std::sqrt(a * b) * (2.0 - pm1 * x);
  out.glasso = 2.0 * std::fabs(c) / b;
  out.pd = x < 1.0 / pm1;
  return out;
}

double hub_pcg_upper_bound(Index p) {
  return 4.0 * std::sqrt(2.0) / (3.0 * std::sqrt(3.0)) / std::sqrt(static_cast<double>(p - 1));
}

Heatmap irr_heatmap(const std::vector<double>& a_grid, const std::vector<double>& c_grid, double b, Index p,
                    std::uint64_t seed, double check_fraction, double check_tol, unsigned threads) {
  if (!(b > 0.0)) bad_config("heatmap needs b > 0");
  if (p < 2) bad_config("heatmap needs p >= 2");
  for (double a : a_grid) {
    if (!std::isfinite(a) || !(a > 0.0)) bad_config("heatmap a values must be finite and positive");
  }
  for (double c : c_grid) {
    if (!std::isfinite(c)) bad_config("heatmap c values must be finite");
  }
  if (!(check_fraction >= 0.0 && check_fraction <= 1.0)) bad_config("check fraction must lie in [0, 1]");

  Heatmap hm;
  std::vector<std::size_t> pd_cells;
  for (double a : a_grid) {
    for (double c : c_grid) {
      const HubIrr v = hub_irr_closed_form(a, b, c, p);
      if (v.pd) pd_cells.push_back(hm.cells.size());
      hm.cells.push_back({a, c, v.pcg, v.glasso, v.pd});
    }
  }
  if (pd_cells.empty() || p > kMaxDenseIrrDim || check_fraction == 0.0) return hm;

  std::mt19937_64 rng(seed);
  std::shuffle(pd_cells.begin(), pd_cells.end(), rng);
  const auto want = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(check_fraction * static_cast<double>(pd_cells.size()))));
  pd_cells.resize(std::min(want, pd_cells.size()));
  std::sort(pd_cells.begin(), pd_cells.end());

  std::vector<double> errors(pd_cells.size());
  parallel_for(pd_cells.size(), threads, [&](std::size_t t) {
    const HeatmapCell& cell = hm.cells[pd_cells[t]];
    Matrix k = Matrix::Identity(p, p) * b;
    k(0, 0) = cell.a;
    for (Index i = 1; i < p; ++i) k(0, i) = k(i, 0) = cell.c;
    const double pcg = irr_pcglasso(k);
    const double gl = irr_glasso(spd_inverse(k, "K*"));
    errors[t] = std::max(std::fabs(pcg - cell.irr_pcg), std::fabs(gl - cell.irr_glasso));
  });
  for (std::size_t t = 0; t < pd_cells.size(); ++t) {
    hm.cells[pd_cells[t]].cross_checked = true;
    hm.max_check_error = std::max(hm.max_check_error, errors[t]);
    if (!(errors[t] <= check_tol)) ++hm.mismatches;
  }
  hm.checked = static_cast<Index>(pd_cells.size());
  return hm;
}

}  // namespace pcglasso
