#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pcglasso/matrix_core.hpp"
#include "pcglasso/pcglasso.hpp"

namespace pcglasso {

struct PathScores {
  double loglik = 0.0;
  double bic = 0.0;
  double ebic = 0.0;
};

enum class PathMode {
  chained,       // each fit warm-started from the previous one, serial
  parallel_cold  // every fit from the identity, run concurrently
};

struct PathOptions {
  Index n = 0;              // sample size behind chat, for the information criteria
  double gamma_ebic = 0.5;
  PathMode mode = PathMode::chained;
  unsigned threads = 0;     // 0 = hardware concurrency
};

struct PathResult {
  std::vector<double> lambdas;
  std::vector<FitResult> fits;
  std::vector<Index> edge_counts;
  std::vector<PathScores> scores;
  /// Set when a fit threw; fits/edge_counts/scores then hold the prefix that succeeded.
  std::optional<std::string> error;
};

/// Smallest lambda at which the identity start is already a fixed point:
/// (1 - alpha) * ||C - I||_inf.
double lambda_identity_threshold(const CorrelationMatrix& chat, double alpha);

/// `count` log-spaced values from hi down to lo (both included).
std::vector<double> log_grid(double hi, double lo, int count);

/// Fits along a non-increasing lambda grid. Repeated values reuse the previous
/// fit, so duplicates give identical results. Fit errors stop the path and are
/// reported in PathResult::error.
PathResult lambda_path(const CorrelationMatrix& chat, const std::vector<double>& lambdas, double alpha,
                       const SolverConfig& cfg, const PathOptions& opt);

/// (n/2) (log det K - tr(K S)). K must be PD.
double gaussian_loglik(const Matrix& k, const Matrix& s, double n);

/// Pairs i < j with R_ij != 0.
Index edge_count(const FitResult& fit);

/// -2 loglik + |E| log n, loglik of the correlation-scale K against chat.
double bic_score(const FitResult& fit, const Matrix& chat, Index n);
/// bic + 4 gamma |E| log p
double ebic_score(const FitResult& fit, const Matrix& chat, Index n, double gamma_ebic);

struct CvResult {
  int folds = 0;
  std::vector<double> lambda_grid;
  std::vector<double> mean_heldout_loglik;
  double selected_lambda = 0.0;
  Index selected_index = 0;
};

/// Given a training sample and the grid, returns the covariance-scale precision
/// estimate for every grid value.
using GridFitter = std::function<std::vector<Matrix>(const SampleData& train, const std::vector<double>& grid)>;

/// k-fold cross-validation with any estimator. Rows are shuffled with `seed`,
/// split into `folds` nearly equal folds, and each held-out fold is scored by
/// gaussian_loglik against its own sample covariance. The first grid value
/// with the largest mean score is selected.
CvResult cross_validate_with(const SampleData& data, const std::vector<double>& grid, int folds, std::uint64_t seed,
                             const GridFitter& fitter, unsigned threads = 0);

/// cross_validate_with using a chained PCGLASSO path on each training fold.
CvResult cross_validate(const SampleData& data, const std::vector<double>& grid, double alpha, int folds,
                        const SolverConfig& cfg, std::uint64_t seed, unsigned threads = 0);

}  // namespace pcglasso
