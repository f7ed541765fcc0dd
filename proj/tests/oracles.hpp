#pragma once

// Independent reference computations used by the tests. Nothing here calls
// the library's solvers.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <limits>
#include <random>

namespace oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline Matrix random_spd(int p, std::mt19937_64& rng, int extra_dof = 5) {
  std::normal_distribution<double> z;
  Matrix x(p + extra_dof, p);
  for (int j = 0; j < p; ++j)
    for (int i = 0; i < x.rows(); ++i) x(i, j) = z(rng);
  Matrix s = x.transpose() * x / static_cast<double>(x.rows());
  return 0.5 * (s + s.transpose());
}

inline Matrix to_correlation(const Matrix& s) {
  const int p = static_cast<int>(s.rows());
  Matrix c(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) c(i, j) = i == j ? 1.0 : s(i, j) / std::sqrt(s(i, i) * s(j, j));
  return c;
}

inline Matrix random_corr(int p, std::mt19937_64& rng, int extra_dof = 5) {
  return to_correlation(random_spd(p, rng, extra_dof));
}

/// Pearson correlation straight from the definition, two-pass.
inline Matrix pearson(const Matrix& x) {
  const int n = static_cast<int>(x.rows()), p = static_cast<int>(x.cols());
  Matrix c(p, p);
  for (int a = 0; a < p; ++a) {
    for (int b = 0; b < p; ++b) {
      double ma = 0, mb = 0;
      for (int i = 0; i < n; ++i) {
        ma += x(i, a);
        mb += x(i, b);
      }
      ma /= n;
      mb /= n;
      double sab = 0, saa = 0, sbb = 0;
      for (int i = 0; i < n; ++i) {
        sab += (x(i, a) - ma) * (x(i, b) - mb);
        saa += (x(i, a) - ma) * (x(i, a) - ma);
        sbb += (x(i, b) - mb) * (x(i, b) - mb);
      }
      c(a, b) = sab / std::sqrt(saa * sbb);
    }
  }
  return c;
}

/// (A kron B) entry for vec positions (i, j) and (k, l), column-major vec.
inline double kron_entry(const Matrix& a, const Matrix& b, int i, int j, int k, int l) { return a(j, l) * b(i, k); }

inline Matrix kron_direct(const Matrix& a, const Matrix& b) {
  const int p = static_cast<int>(a.rows());
  Matrix out(p * p, p * p);
  for (int j = 0; j < p; ++j)
    for (int i = 0; i < p; ++i)
      for (int l = 0; l < p; ++l)
        for (int k = 0; k < p; ++k) out(i + p * j, k + p * l) = kron_entry(a, b, i, j, k, l);
  return out;
}

/// -log det R + tr(R S) + lambda ||R||_{1,off} for unit-diagonal R built from
/// the upper-triangle parameters; +inf outside the PD cone.
inline double r_subproblem(const Vector& upper, const Matrix& s, double lambda) {
  const int p = static_cast<int>(s.rows());
  Matrix r = Matrix::Identity(p, p);
  int t = 0;
  for (int j = 1; j < p; ++j)
    for (int i = 0; i < j; ++i) r(i, j) = r(j, i) = upper(t++);
  Eigen::LLT<Matrix> llt(r);
  if (llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
  double logdet = 0;
  for (int i = 0; i < p; ++i) logdet += 2 * std::log(llt.matrixLLT()(i, i));
  double l1 = 0;
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j)
      if (i != j) l1 += std::fabs(r(i, j));
  return -logdet + (r.cwiseProduct(s)).sum() + lambda * l1;
}

/// Minimum of f over the box [-1, 1]^m by a coarse grid followed by
/// successively finer grids around the incumbent. Fine for m <= 3 and convex f.
inline double grid_minimum(int m, const std::function<double(const Vector&)>& f, Vector* argmin = nullptr) {
  Vector center = Vector::Zero(m);
  double half = 1.0;
  int steps = m == 1 ? 400 : (m == 2 ? 80 : 40);
  double best = std::numeric_limits<double>::infinity();
  Vector best_x = center;
  for (int round = 0; round < 40 && half > 1e-9; ++round) {
    const double h = 2 * half / steps;
    Vector x(m);
    std::vector<int> idx(static_cast<std::size_t>(m), 0);
    const Vector c0 = best_x.size() == m && std::isfinite(best) ? best_x : center;
    for (;;) {
      for (int d = 0; d < m; ++d) x(d) = std::clamp(c0(d) - half + h * idx[static_cast<std::size_t>(d)], -0.999999, 0.999999);
      const double v = f(x);
      if (v < best) {
        best = v;
        best_x = x;
      }
      int d = 0;
      while (d < m && ++idx[static_cast<std::size_t>(d)] > steps) idx[static_cast<std::size_t>(d++)] = 0;
      if (d == m) break;
    }
    half = 3 * h;
    steps = m == 3 ? 12 : 30;
  }
  if (argmin) *argmin = best_x;
  return best;
}

/// Minimum over d > 0 of 1/2 d'Ad - sum log d by plain gradient descent with
/// backtracking in log coordinates. Slow but independent of the library.
inline Vector scaling_reference(const Matrix& a) {
  const int p = static_cast<int>(a.rows());
  Vector u = Vector::Zero(p);  // d = exp(u)
  auto f = [&](const Vector& uu) {
    const Vector d = uu.array().exp();
    return 0.5 * d.dot(a * d) - uu.sum();
  };
  double fu = f(u);
  for (int it = 0; it < 200000; ++it) {
    const Vector d = u.array().exp();
    const Vector g = (d.array() * (a * d).array() - 1.0).matrix();
    if (g.cwiseAbs().maxCoeff() < 1e-13) break;
    double t = 1.0;
    for (;;) {
      const Vector un = u - t * g;
      const double fn = f(un);
      if (fn <= fu - 0.25 * t * g.squaredNorm()) {
        u = un;
        fu = fn;
        break;
      }
      t *= 0.5;
      if (t < 1e-20) return u.array().exp();
    }
  }
  return u.array().exp();
}

}  // namespace oracle
