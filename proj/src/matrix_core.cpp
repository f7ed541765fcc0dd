#include "pcglasso/matrix_core.hpp"

#include <cmath>
#include <string>

#include "pcglasso/error.hpp"

namespace pcglasso {

SampleData SampleData::from_rows(Matrix rows) {
  if (rows.rows() < 2) reject("sample data needs at least 2 observations");
  if (rows.cols() < 2) reject("sample data needs at least 2 variables");
  if (!rows.allFinite()) reject("sample data contains non-finite values");
  Vector means = rows.colwise().mean().transpose();
  rows.rowwise() -= means.transpose();
  for (Index j = 0; j < rows.cols(); ++j) {
    if (rows.col(j).squaredNorm() <= 0.0) reject("column " + std::to_string(j) + " has zero variance");
  }
  return SampleData(std::move(rows), std::move(means));
}

SampleData SampleData::subset(const std::vector<Index>& idx) const {
  Matrix sub(static_cast<Index>(idx.size()), p());
  for (std::size_t k = 0; k < idx.size(); ++k) sub.row(static_cast<Index>(k)) = rows_.row(idx[k]);
  return from_rows(std::move(sub));
}

CorrelationMatrix CorrelationMatrix::from_matrix(Matrix c, double tol) {
  if (c.rows() != c.cols() || c.rows() < 1) reject("correlation matrix must be square and non-empty");
  if (!c.allFinite()) reject("correlation matrix contains non-finite values");
  require_symmetric(c, "correlation matrix", tol);
  for (Index i = 0; i < c.rows(); ++i) {
    if (std::fabs(c(i, i) - 1.0) > tol) reject("correlation matrix must have unit diagonal");
  }
  if (max_abs_offdiag(c) > 1.0 + tol) reject("correlation entries must lie in [-1, 1]");
  symmetrize(c);
  c.diagonal().setOnes();
  c = c.cwiseMax(-1.0).cwiseMin(1.0);
  const double lmin = min_eigenvalue(c);
  if (lmin < -1e-8) reject("correlation matrix is not positive semidefinite");
  return CorrelationMatrix(std::move(c), lmin);
}

Matrix PrecisionFactorization::compose() const { return compose_precision(*this); }

Matrix sample_covariance(const SampleData& data) {
  Matrix s = data.rows().transpose() * data.rows() / static_cast<double>(data.n());
  symmetrize(s);
  return s;
}

CorrelationResult correlation_from_covariance(const Matrix& sigma) {
  require_symmetric(sigma, "covariance");
  const Index p = sigma.rows();
  Vector h(p);
  for (Index i = 0; i < p; ++i) {
    if (!(sigma(i, i) > 0.0)) reject("covariance diagonal entry " + std::to_string(i) + " is not positive");
    h(i) = 1.0 / std::sqrt(sigma(i, i));
  }
  Matrix c(p, p);
  for (Index j = 0; j < p; ++j) {
    for (Index i = 0; i < p; ++i) c(i, j) = sigma(i, j) / std::sqrt(sigma(i, i) * sigma(j, j));
  }
  // Cauchy-Schwarz can be violated by rounding for (near-)collinear columns.
  c = c.cwiseMax(-1.0).cwiseMin(1.0);
  symmetrize(c);
  c.diagonal().setOnes();
  return CorrelationResult{CorrelationMatrix::from_matrix(std::move(c)), std::move(h), sigma};
}

CorrelationResult correlation_from_data(const SampleData& data) {
  return correlation_from_covariance(sample_covariance(data));
}

Matrix partial_correlations(const Matrix& k) {
  require_positive_definite(k, "precision matrix");
  const Index p = k.rows();
  Matrix out(p, p);
  for (Index j = 0; j < p; ++j) {
    for (Index i = 0; i < p; ++i) out(i, j) = i == j ? 1.0 : -k(i, j) / std::sqrt(k(i, i) * k(j, j));
  }
  symmetrize(out);
  return out;
}

PrecisionFactorization factorize_precision(const Matrix& k) {
  require_positive_definite(k, "precision matrix");
  const Index p = k.rows();
  PrecisionFactorization f;
  f.d = k.diagonal().cwiseSqrt();
  f.r.resize(p, p);
  for (Index j = 0; j < p; ++j) {
    for (Index i = 0; i < p; ++i) f.r(i, j) = i == j ? 1.0 : k(i, j) / (f.d(i) * f.d(j));
  }
  symmetrize(f.r);
  return f;
}

Matrix compose_precision(const PrecisionFactorization& f) {
  Matrix k = f.d.asDiagonal() * f.r * f.d.asDiagonal();
  symmetrize(k);
  return k;
}

double min_eigenvalue(const Matrix& m) {
  if (m.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

bool is_positive_definite(const Matrix& m) {
  if (m.rows() != m.cols() || !m.allFinite()) return false;
  Eigen::LLT<Matrix> llt(m);
  return llt.info() == Eigen::Success;
}

void symmetrize(Matrix& m) {
  const Index p = m.rows();
  for (Index j = 0; j < p; ++j) {
    for (Index i = j + 1; i < p; ++i) {
      const double v = 0.5 * (m(i, j) + m(j, i));
      m(i, j) = v;
      m(j, i) = v;
    }
  }
}

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

double max_abs_offdiag(const Matrix& m) {
  double out = 0.0;
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < m.rows(); ++i) {
      if (i != j) out = std::max(out, std::fabs(m(i, j)));
    }
  }
  return out;
}

Index count_offdiag_nonzero(const Matrix& m) {
  Index n = 0;
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < j; ++i) n += m(i, j) != 0.0 ? 1 : 0;
  }
  return n;
}

void require_symmetric(const Matrix& m, const char* what, double tol) {
  if (m.rows() != m.cols()) reject(std::string(what) + " must be square");
  const double scale = std::max(1.0, max_abs(m));
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = j + 1; i < m.rows(); ++i) {
      if (std::fabs(m(i, j) - m(j, i)) > tol * scale) reject(std::string(what) + " must be symmetric");
    }
  }
}

void require_positive_definite(const Matrix& m, const char* what) {
  require_symmetric(m, what);
  if (!is_positive_definite(m)) reject(std::string(what) + " must be positive definite");
}

}  // namespace pcglasso
