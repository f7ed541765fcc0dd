#include "pcglasso/model_select.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "pcglasso/error.hpp"
#include "pcglasso/parallel.hpp"

namespace pcglasso {

double lambda_identity_threshold(const CorrelationMatrix& chat, double alpha) {
  return (1.0 - alpha) * max_abs_offdiag(chat.entries());
}

std::vector<double> log_grid(double hi, double lo, int count) {
  if (count < 1) bad_config("grid needs at least one point");
  if (!(lo > 0.0) || !(hi >= lo)) bad_config("log grid needs 0 < lo <= hi");
  std::vector<double> g(static_cast<std::size_t>(count));
  if (count == 1) {
    g[0] = hi;
    return g;
  }
  const double a = std::log(hi), b = std::log(lo);
  for (int i = 0; i < count; ++i) g[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (count - 1));
  g.front() = hi;
  g.back() = lo;
  return g;
}

double gaussian_loglik(const Matrix& k, const Matrix& s, double n) {
  if (k.rows() != s.rows() || k.cols() != s.cols()) reject("loglik: dimension mismatch");
  Eigen::LLT<Matrix> llt(k);
  if (llt.info() != Eigen::Success) reject("loglik: precision matrix is not positive definite");
  double logdet = 0.0;
  for (Index i = 0; i < k.rows(); ++i) logdet += 2.0 * std::log(llt.matrixLLT()(i, i));
  return 0.5 * n * (logdet - k.cwiseProduct(s).sum());
}

Index edge_count(const FitResult& fit) { return count_offdiag_nonzero(fit.fact.r); }

double bic_score(const FitResult& fit, const Matrix& chat, Index n) {
  const double nn = static_cast<double>(n);
  return -2.0 * gaussian_loglik(fit.k(), chat, nn) + static_cast<double>(edge_count(fit)) * std::log(nn);
}

double ebic_score(const FitResult& fit, const Matrix& chat, Index n, double gamma_ebic) {
  const double p = static_cast<double>(chat.rows());
  return bic_score(fit, chat, n) + 4.0 * gamma_ebic * static_cast<double>(edge_count(fit)) * std::log(p);
}

namespace {

void check_grid(const std::vector<double>& lambdas) {
  if (lambdas.empty()) bad_config("lambda grid is empty");
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (!(lambdas[i] >= 0.0) || !std::isfinite(lambdas[i])) bad_config("lambda grid values must be finite and >= 0");
    if (i > 0 && lambdas[i] > lambdas[i - 1]) bad_config("lambda grid must be non-increasing");
  }
}

PathScores score(const FitResult& fit, const Matrix& chat, const PathOptions& opt) {
  PathScores s;
  const double n = static_cast<double>(opt.n);
  const double edges = static_cast<double>(edge_count(fit));
  s.loglik = gaussian_loglik(fit.k(), chat, n);
  s.bic = -2.0 * s.loglik + edges * std::log(n);
  s.ebic = s.bic + 4.0 * opt.gamma_ebic * edges * std::log(static_cast<double>(chat.rows()));
  return s;
}

}  // namespace

PathResult lambda_path(const CorrelationMatrix& chat, const std::vector<double>& lambdas, double alpha,
                       const SolverConfig& cfg, const PathOptions& opt) {
  check_grid(lambdas);
  if (opt.n < 1) bad_config("path needs the sample size n >= 1");
  if (opt.gamma_ebic < 0.0) bad_config("gamma_ebic must be >= 0");

  PathResult res;
  res.lambdas = lambdas;
  const std::size_t m = lambdas.size();

  if (opt.mode == PathMode::chained) {
    for (std::size_t i = 0; i < m; ++i) {
      try {
        if (i > 0 && lambdas[i] == lambdas[i - 1]) {
          res.fits.push_back(res.fits.back());
        } else {
          SolverConfig c = cfg;
          c.lambda = lambdas[i];
          c.alpha = alpha;
          if (i > 0) c.warm = WarmStart{res.fits.back().fact, res.fits.back().w};
          res.fits.push_back(fit(chat, c));
        }
        res.edge_counts.push_back(edge_count(res.fits.back()));
        res.scores.push_back(score(res.fits.back(), chat.entries(), opt));
      } catch (const std::exception& e) {
        res.fits.resize(res.scores.size());
        res.edge_counts.resize(res.scores.size());
        res.error = "lambda = " + std::to_string(lambdas[i]) + ": " + e.what();
        break;
      }
    }
    return res;
  }

  std::vector<std::optional<FitResult>> fits(m);
  std::vector<std::string> errors(m);
  parallel_for(m, opt.threads, [&](std::size_t i) {
    try {
      SolverConfig c = cfg;
      c.lambda = lambdas[i];
      c.alpha = alpha;
      c.warm.reset();
      fits[i] = fit(chat, c);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  for (std::size_t i = 0; i < m; ++i) {
    if (!fits[i]) {
      res.error = "lambda = " + std::to_string(lambdas[i]) + ": " + errors[i];
      break;
    }
    res.fits.push_back(std::move(*fits[i]));
    res.edge_counts.push_back(edge_count(res.fits.back()));
    res.scores.push_back(score(res.fits.back(), chat.entries(), opt));
  }
  return res;
}

CvResult cross_validate_with(const SampleData& data, const std::vector<double>& grid, int folds, std::uint64_t seed,
                             const GridFitter& fitter, unsigned threads) {
  if (folds < 2) bad_config("cross-validation needs at least 2 folds");
  if (grid.empty()) bad_config("lambda grid is empty");
  const Index n = data.n();
  if (n < 2 * static_cast<Index>(folds)) reject("cross-validation needs n >= 2 * folds so every fold has 2 rows");

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  const auto nf = static_cast<std::size_t>(folds);
  std::vector<std::vector<double>> fold_scores(nf);
  parallel_for(nf, threads, [&](std::size_t f) {
    std::vector<Index> train, test;
    for (std::size_t k = 0; k < order.size(); ++k) (k % nf == f ? test : train).push_back(order[k]);
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());
    const SampleData tr = data.subset(train);
    const SampleData te = data.subset(test);
    const Matrix s_test = sample_covariance(te);
    const std::vector<Matrix> ks = fitter(tr, grid);
    if (ks.size() != grid.size()) reject("fold fitter returned the wrong number of estimates");
    auto& out = fold_scores[f];
    out.resize(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g) out[g] = gaussian_loglik(ks[g], s_test, static_cast<double>(te.n()));
  });

  CvResult res;
  res.folds = folds;
  res.lambda_grid = grid;
  res.mean_heldout_loglik.assign(grid.size(), 0.0);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    for (std::size_t f = 0; f < nf; ++f) res.mean_heldout_loglik[g] += fold_scores[f][g];
    res.mean_heldout_loglik[g] /= static_cast<double>(nf);
  }
  const auto best = std::max_element(res.mean_heldout_loglik.begin(), res.mean_heldout_loglik.end());
  res.selected_index = static_cast<Index>(best - res.mean_heldout_loglik.begin());
  res.selected_lambda = grid[static_cast<std::size_t>(res.selected_index)];
  return res;
}

CvResult cross_validate(const SampleData& data, const std::vector<double>& grid, double alpha, int folds,
                        const SolverConfig& cfg, std::uint64_t seed, unsigned threads) {
  check_grid(grid);
  const GridFitter fitter = [&](const SampleData& train, const std::vector<double>& g) {
    const CorrelationResult cr = correlation_from_data(train);
    PathOptions opt;
    opt.n = train.n();
    opt.threads = 1;
    SolverConfig c = cfg;
    PathResult path = lambda_path(cr.chat, g, alpha, c, opt);
    if (path.error) reject("cross-validation fit failed: " + *path.error);
    std::vector<Matrix> ks;
    ks.reserve(g.size());
    for (const auto& f : path.fits) {
      PrecisionFactorization cov{f.fact.r, cr.scale.cwiseProduct(f.fact.d), cr.scale};
      ks.push_back(cov.compose());
    }
    return ks;
  };
  return cross_validate_with(data, grid, folds, seed, fitter, threads);
}

}  // namespace pcglasso
