#pragma once

#include <Eigen/Dense>
#include <optional>

namespace pcglasso {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// n x p observations, one row per sample. Columns are centred on construction.
class SampleData {
 public:
  /// Rejects n < 2, p < 2 and constant columns.
  static SampleData from_rows(Matrix rows);

  const Matrix& rows() const { return rows_; }
  const Vector& column_means() const { return means_; }
  Index n() const { return rows_.rows(); }
  Index p() const { return rows_.cols(); }

  /// Rows selected by index, re-centred. Used for cross-validation folds.
  SampleData subset(const std::vector<Index>& idx) const;

 private:
  SampleData(Matrix centred, Vector means) : rows_(std::move(centred)), means_(std::move(means)) {}
  Matrix rows_;
  Vector means_;
};

/// Symmetric, unit-diagonal matrix with all entries in [-1, 1]. Caches its
/// smallest eigenvalue, which may be zero for rank-deficient samples.
class CorrelationMatrix {
 public:
  /// Validates the invariants up to `tol` and then enforces them exactly
  /// (explicit symmetrisation, diagonal set to one).
  static CorrelationMatrix from_matrix(Matrix c, double tol = 1e-10);
  static CorrelationMatrix identity(Index p) { return from_matrix(Matrix::Identity(p, p)); }

  const Matrix& entries() const { return c_; }
  double lambda_min() const { return lambda_min_; }
  Index dim() const { return c_.rows(); }
  double operator()(Index i, Index j) const { return c_(i, j); }

 private:
  CorrelationMatrix(Matrix c, double lmin) : c_(std::move(c)), lambda_min_(lmin) {}
  Matrix c_;
  double lambda_min_;
};

/// K = D R D with unit-diagonal R and positive d = diag(D).
struct PrecisionFactorization {
  Matrix r;
  Vector d;
  /// diag(Sigma)^{-1/2} when the factorisation lives on the correlation scale
  /// of a covariance input.
  std::optional<Vector> scale;

  Matrix compose() const;
};

struct CorrelationResult {
  CorrelationMatrix chat;
  Vector scale;       // H = diag(Sigma)^{-1/2}
  Matrix covariance;  // Sigma, 1/n normalisation
};

/// Sample covariance with 1/n normalisation of already-centred data.
Matrix sample_covariance(const SampleData& data);

/// C = H Sigma H with H = diag(Sigma)^{-1/2}.
CorrelationResult correlation_from_covariance(const Matrix& sigma);
CorrelationResult correlation_from_data(const SampleData& data);

/// P_ii = 1, P_ij = -K_ij / sqrt(K_ii K_jj).
Matrix partial_correlations(const Matrix& k);

PrecisionFactorization factorize_precision(const Matrix& k);
Matrix compose_precision(const PrecisionFactorization& f);

double min_eigenvalue(const Matrix& m);
bool is_positive_definite(const Matrix& m);

/// (M + M^T) / 2, bitwise symmetric.
void symmetrize(Matrix& m);

/// max_ij |M_ij|
double max_abs(const Matrix& m);
/// max_{i != j} |M_ij|
double max_abs_offdiag(const Matrix& m);
/// Number of pairs i < j with M_ij != 0 (exact-zero test).
Index count_offdiag_nonzero(const Matrix& m);

/// Throws rejected-input errors for non-square or asymmetric matrices.
void require_symmetric(const Matrix& m, const char* what, double tol = 1e-10);
void require_positive_definite(const Matrix& m, const char* what);

}  // namespace pcglasso
