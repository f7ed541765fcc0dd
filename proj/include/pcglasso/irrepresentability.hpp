#pragma once

// Irrepresentability values for sign recovery.
//
// Matrices of size p^2 x p^2 act on vec(X), the column-major stacking of a
// p x p matrix, so entry (i, j) sits at position i + p * j. With that ordering
// (A kron B) vec(X) = vec(B X A^T).
//
// The scale-free version uses
//   Gamma~ = Pperp (R^{-1} kron R^{-1}) + 1/2 Pdiag (R^{-1} kron I + I kron R^{-1}),
// where R is the unit-diagonal factor of K* and Pdiag keeps the diagonal
// positions of vec(X). The classical version uses Gamma* = Sigma* kron Sigma*.
// Both report || Gamma_{S^c S} Gamma_{SS}^{-1} vec(Pi)_S ||_inf, with S the
// support of K* (diagonal included) and Pi = sign(K*) off the diagonal,
// zero on it.

#include <cstdint>
#include <utility>
#include <vector>

#include "pcglasso/matrix_core.hpp"

namespace pcglasso {

/// Largest p accepted by the dense p^2 x p^2 constructions.
inline constexpr Index kMaxDenseIrrDim = 60;

inline Index vec_index(Index i, Index j, Index p) { return i + p * j; }

struct SupportSet {
  Index p = 0;
  std::vector<std::pair<Index, Index>> pairs;       // (i, j) with |K_ij| > threshold
  std::vector<std::pair<Index, Index>> complement;

  static SupportSet of(const Matrix& k, double threshold = 1e-12);
  std::vector<Index> vec_positions() const;
  std::vector<Index> complement_vec_positions() const;
};

struct IrrReport {
  double irr_pcg = 0.0;
  double irr_glasso = 0.0;
  bool pcg_satisfied = true;
  bool glasso_satisfied = true;
  bool pd_input = true;
};

Matrix kron(const Matrix& a, const Matrix& b);
/// Orthogonal projection of vec(X) onto vec(diag X).
Matrix diag_projection(Index p);

/// I - 1/2 Pdiag (I kron R + R kron I)
Matrix m_r(const Matrix& r);
/// m_r(R) + Pdiag
Matrix m_tilde(const Matrix& r);
/// Pperp + 1/2 Pdiag (I kron R + R kron I), the inverse of m_tilde(R).
Matrix n_tilde(const Matrix& r);

Matrix gamma_tilde(const Matrix& r_star);

/// || gamma_{S^c S} gamma_{SS}^{-1} vec(pi)_S ||_inf; 0 when S^c is empty.
/// Throws when gamma_{SS} is numerically singular.
double irr_value(const Matrix& gamma, const SupportSet& support, const Matrix& pi);

/// Sign pattern of K off the diagonal (zeros below the support threshold).
Matrix sign_pattern(const Matrix& k, double threshold = 1e-12);

double irr_pcglasso(const Matrix& k_star);
double irr_glasso(const Matrix& sigma_star);
IrrReport irr_report(const Matrix& k_star);

/// Hub precision with K_11 = a, K_ii = b (i >= 2), K_1i = c.
struct HubIrr {
  double pcg;
  double glasso;
  bool pd;
};

HubIrr hub_irr_closed_form(double a, double b, double c, Index p);
/// 4 sqrt(2) / (3 sqrt(3)) / sqrt(p - 1): supremum of the scale-free hub value over PD parameters.
double hub_pcg_upper_bound(Index p);

struct HeatmapCell {
  double a;
  double c;
  double irr_pcg;
  double irr_glasso;
  bool pd;
  bool cross_checked = false;
};

struct Heatmap {
  std::vector<HeatmapCell> cells;  // row-major over (a_grid, c_grid)
  Index checked = 0;
  Index mismatches = 0;
  double max_check_error = 0.0;
};

/// Closed-form values on every grid cell. A seeded random fraction of the PD
/// cells (at least one when any exist and p fits the dense path) is recomputed
/// with the general Kronecker path; disagreements above check_tol count as
/// mismatches.
Heatmap irr_heatmap(const std::vector<double>& a_grid, const std::vector<double>& c_grid, double b, Index p,
                    std::uint64_t seed = 0, double check_fraction = 0.05, double check_tol = 1e-8,
                    unsigned threads = 0);

}  // namespace pcglasso
