#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pcglasso/d_solver.hpp"
#include "pcglasso/matrix_core.hpp"
#include "pcglasso/pcglasso.hpp"

namespace pcglasso {

/// SplitMix64 finaliser of base + golden-ratio multiples of stream; gives
/// independent seeds for replicate streams.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

// Ground-truth precision matrices. Every generator checks positive definiteness.

/// K_ii = 1, K_1i = K_i1 = -1/sqrt(p).
Matrix hub_precision(Index p);
/// K_11 = a, K_ii = b (i >= 2), K_1i = c. Rejects (p - 1) c^2 >= a b.
Matrix general_hub_precision(double a, double b, double c, Index p);
/// Block-diagonal copies of hub_precision(p / blocks).
Matrix block_hub_precision(Index p, Index blocks);
/// Tridiagonal: K_ii = 1, K_{i,i+1} = rho. Rejects rho outside the PD range.
Matrix chain_precision(Index p, double rho);
/// Block-diagonal random sparse graph without hubs: inside each block every
/// pair is an edge with probability edge_prob, weights uniform in +-[0.2, 0.5],
/// and the diagonal is the absolute row sum plus a uniform draw in [0.5, 1.5].
Matrix block_sparse_precision(Index p, Index blocks, double edge_prob, std::uint64_t seed);

/// Sample correlation of `dof` standard normal draws in dimension p (dof >= p
/// keeps it PD). dof = 0 picks p + 5.
Matrix random_correlation(Index p, std::uint64_t seed, Index dof = 0);

/// n rows x = L z with Sigma = L L^T and z standard normal. Raw rows (not centred).
Matrix sample_gaussian(const Matrix& sigma, Index n, std::uint64_t seed);

struct RmseMetrics {
  double full = 0.0;
  double diag = 0.0;
  std::optional<double> offdiag_nz;  // absent when K* has no off-diagonal nonzeros
};

RmseMetrics rmse_metrics(const Matrix& k_hat, const Matrix& k_star);

/// Fraction of pairs i < j where sign(K_hat_ij), with |K_hat_ij| <= tol read as
/// zero, equals sign(K*_ij).
double sign_accuracy(const Matrix& k_hat, const Matrix& k_star, double tol = 0.0);

enum class Structure { hub, block_hub, general_hub, chain, block_sparse };
enum class Method { pcglasso, glasso, corr_glasso };
enum class Selection { bic, ebic, cv };

const char* to_string(Structure s);
const char* to_string(Method m);
const char* to_string(Selection s);

struct StructureSpec {
  Structure kind = Structure::hub;
  Index p = 20;
  Index blocks = 4;         // block_hub, block_sparse
  double a = 1.0, b = 1.0, c = 0.2;  // general_hub
  double rho = 0.4;         // chain
  double edge_prob = 0.3;   // block_sparse
};

Matrix make_precision(const StructureSpec& spec, std::uint64_t seed);

struct StudyConfig {
  StructureSpec structure;
  std::vector<Index> n_grid{500};
  int replicates = 20;
  std::vector<Method> methods{Method::pcglasso, Method::glasso};
  Selection selection = Selection::bic;
  std::uint64_t seed = 1;
  double alpha = 0.0;
  int grid_points = 30;
  double lambda_small = 0.01;
  int cv_folds = 5;
  double gamma_ebic = 0.5;
  unsigned threads = 0;
  SolverConfig solver;

  void validate() const;
};

struct ReplicateMetrics {
  Method method;
  Index n;
  int replicate;
  bool ok = false;
  std::string error;
  RmseMetrics rmse;
  double sign_acc = 0.0;
  double lambda = 0.0;
  double wall_ms = 0.0;
};

struct MetricSummary {
  double mean = 0.0;
  double sd = 0.0;  // sample sd; 0 with fewer than 2 values
  Index count = 0;
};

struct StudyRow {
  Method method;
  Index n;
  MetricSummary rmse_full, rmse_diag, rmse_offdiag_nz, sign_accuracy, wall_ms;
  Index failures = 0;
};

struct StudyReport {
  std::vector<StudyRow> rows;               // one per (method, n), in config order
  std::vector<ReplicateMetrics> replicates;  // ordered by (n, replicate, method)
  Matrix k_star;
};

/// For every n and replicate: draw a sample from Sigma = K*^{-1}, fit every
/// method over a grid of grid_points log-spaced lambdas from the method's own
/// identity threshold down to lambda_small, pick one by the selection rule and
/// score it against K*. Failed fits are counted and excluded.
StudyReport run_study(const StudyConfig& cfg);

struct TimingRow {
  Index p;
  std::string solver;
  double mean_ms;
  double ci_lo;
  double ci_hi;
};

struct DBenchResult {
  std::vector<TimingRow> rows;
  double max_disagreement = 0.0;  // max |d_diag - d_exact|_inf over all instances
  Index instances = 0;
  Index disagreements = 0;        // instances above agreement_tol
};

/// Times both Newton variants on `replicates` random scaling problems per p.
/// The 95% interval is mean +- 1.96 sd / sqrt(replicates).
DBenchResult bench_d_solvers(const std::vector<Index>& p_grid, int replicates, std::uint64_t seed,
                             const DSolveConfig& cfg = {}, double agreement_tol = 1e-8);

}  // namespace pcglasso
