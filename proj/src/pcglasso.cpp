#include "pcglasso/pcglasso.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <random>
#include <string>

#include "pcglasso/error.hpp"
#include "pcglasso/kernels.hpp"

namespace pcglasso {
namespace {

double env_or(const char* name, double fallback) {
  const char* v = std::getenv(name);
  if (v == nullptr || *v == '\0') return fallback;
  char* end = nullptr;
  const double x = std::strtod(v, &end);
  if (end == v || *end != '\0') bad_config(std::string("cannot parse environment variable ") + name);
  return x;
}

Matrix inverse_spd(const Matrix& m) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) reject("matrix is not positive definite");
  Matrix inv = llt.solve(Matrix::Identity(m.rows(), m.cols()));
  symmetrize(inv);
  return inv;
}

Matrix scaled_correlation(const Matrix& chat, const Vector& d) {
  Matrix s = d.asDiagonal() * chat * d.asDiagonal();
  symmetrize(s);
  return s;
}

struct SingleFit {
  Matrix r, w;
  Vector d;
  std::vector<double> trace, steps;
  double residual = std::numeric_limits<double>::infinity();
  double threshold = 0.0;
  int iters = 0;
  bool converged = false;
};

SingleFit run_bcd(const CorrelationMatrix& chat, const SolverConfig& cfg, Matrix r, Matrix w, Vector d) {
  const Matrix& c = chat.entries();
  SingleFit out;
  double f_old = objective(r, d, c, cfg.lambda, cfg.alpha);
  out.trace.push_back(f_old);

  RSolveConfig rcfg;
  rcfg.tol = cfg.r_tol;
  rcfg.max_sweeps = cfg.r_max_sweeps;

  bool residual_fresh = false;
  for (int it = 1; it <= cfg.outer_max_iter; ++it) {
    const ScalingProblem prob = build_scaling_problem(r, chat, cfg.alpha);
    d = solve_d_diagonal_newton(prob, cfg.d_cfg, d).d;
    out.steps.push_back(objective(r, d, c, cfg.lambda, cfg.alpha));

    const Matrix s = scaled_correlation(c, d);
    const RWarmStart warm{r, w};
    RSolveResult rres = solve_r(s, cfg.lambda, rcfg, &warm);
    r = std::move(rres.r);
    w = std::move(rres.w);
    const double f_new = objective(r, d, c, cfg.lambda, cfg.alpha);
    out.steps.push_back(f_new);
    out.trace.push_back(f_new);
    out.iters = it;
    residual_fresh = false;

    const double rel = std::fabs(f_old - f_new) / std::max(1.0, std::fabs(f_new));
    f_old = f_new;
    if (rel < cfg.outer_tol) {
      out.threshold = cfg.stationarity_tol * (1.0 + max_abs(s));
      out.residual = stationarity_residual(r, d, c, cfg.lambda, cfg.alpha);
      residual_fresh = true;
      if (out.residual <= out.threshold) {
        out.converged = true;
        break;
      }
    }
  }
  if (!residual_fresh) {
    out.threshold = cfg.stationarity_tol * (1.0 + max_abs(scaled_correlation(c, d)));
    out.residual = stationarity_residual(r, d, c, cfg.lambda, cfg.alpha);
  }
  out.r = std::move(r);
  out.w = std::move(w);
  out.d = std::move(d);
  return out;
}

}  // namespace

void SolverConfig::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) bad_config("lambda must be a finite value >= 0");
  if (!(alpha < 1.0) || !std::isfinite(alpha)) bad_config("alpha must be a finite value < 1");
  if (!(outer_tol > 0.0)) bad_config("outer_tol must be positive");
  if (!(stationarity_tol > 0.0)) bad_config("stationarity_tol must be positive");
  if (!(r_tol > 0.0)) bad_config("r_tol must be positive");
  if (outer_max_iter < 1) bad_config("outer_max_iter must be positive");
  if (r_max_sweeps < 1) bad_config("r_max_sweeps must be positive");
  if (restarts < 1) bad_config("restarts must be >= 1");
  d_cfg.validate();
}

SolverConfig SolverConfig::from_env() {
  SolverConfig cfg;
  cfg.outer_tol = env_or("PCGLASSO_OUTER_TOL", cfg.outer_tol);
  cfg.outer_max_iter = static_cast<int>(env_or("PCGLASSO_OUTER_MAX_ITER", cfg.outer_max_iter));
  cfg.stationarity_tol = env_or("PCGLASSO_STATIONARITY_TOL", cfg.stationarity_tol);
  cfg.r_tol = env_or("PCGLASSO_R_TOL", cfg.r_tol);
  cfg.d_cfg.tol = env_or("PCGLASSO_D_TOL", cfg.d_cfg.tol);
  cfg.d_cfg.max_iter = static_cast<int>(env_or("PCGLASSO_D_MAX_ITER", cfg.d_cfg.max_iter));
  return cfg;
}

double objective(const Matrix& r, const Vector& d, const Matrix& chat, double lambda, double alpha) {
  const Index p = chat.rows();
  if (r.rows() != p || d.size() != p) reject("objective: dimension mismatch");
  if ((d.array() <= 0.0).any()) reject("objective: d must be positive");
  Eigen::LLT<Matrix> llt(r);
  if (llt.info() != Eigen::Success) reject("objective: R must be positive definite");
  const Matrix& l = llt.matrixLLT();
  double logdet_r = 0.0;
  for (Index i = 0; i < p; ++i) logdet_r += 2.0 * std::log(l(i, i));
  double trace_term = 0.0;
  double l1_off = 0.0;
  for (Index j = 0; j < p; ++j) {
    for (Index i = 0; i < p; ++i) {
      trace_term += chat(i, j) * d(i) * d(j) * r(i, j);
      if (i != j) l1_off += std::fabs(r(i, j));
    }
  }
  return -logdet_r - 2.0 * (1.0 - alpha) * d.array().log().sum() + trace_term + lambda * l1_off;
}

FitResult fit(const CorrelationMatrix& chat, const SolverConfig& cfg, const std::optional<Vector>& scale) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const Index p = chat.dim();
  if (scale && (scale->size() != p || (scale->array() <= 0.0).any())) reject("scale vector must be positive, length p");

  FitResult res;
  res.lambda = cfg.lambda;
  res.alpha = cfg.alpha;

  if (p == 1) {
    // Single variable: K = (1 - alpha) on the correlation scale.
    res.fact.r = Matrix::Ones(1, 1);
    res.fact.d = Vector::Constant(1, std::sqrt(1.0 - cfg.alpha));
    res.w = Matrix::Ones(1, 1);
    const double f = objective(res.fact.r, res.fact.d, chat.entries(), cfg.lambda, cfg.alpha);
    res.objective_trace = {f};
    res.converged = true;
  } else {
    Matrix r0 = Matrix::Identity(p, p), w0 = Matrix::Identity(p, p);
    Vector d0 = Vector::Ones(p);
    if (cfg.warm) {
      const auto& ws = *cfg.warm;
      if (ws.fact.r.rows() != p || ws.fact.d.size() != p) reject("warm start has the wrong dimension");
      r0 = ws.fact.r;
      d0 = ws.fact.d;
      w0 = ws.w ? *ws.w : inverse_spd(r0);
    }
    SingleFit best = run_bcd(chat, cfg, r0, w0, d0);

    if (cfg.restarts > 1) {
      std::mt19937_64 rng(cfg.seed);
      double lo = 0.5 * std::sqrt(1.0 - cfg.alpha), hi = 2.0 * std::sqrt(1.0 - cfg.alpha);
      if (chat.lambda_min() > 0.0) {
        const Interval box = d_bounds(chat.lambda_min(), cfg.alpha, p);
        lo = box.lo;
        hi = box.hi;
      }
      std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
      for (int k = 1; k < cfg.restarts; ++k) {
        Vector d(p);
        for (Index i = 0; i < p; ++i) d(i) = std::exp(u(rng));
        SingleFit trial = run_bcd(chat, cfg, Matrix::Identity(p, p), Matrix::Identity(p, p), d);
        if (trial.trace.back() < best.trace.back()) best = std::move(trial);
      }
    }

    res.fact.r = std::move(best.r);
    res.fact.d = std::move(best.d);
    res.w = std::move(best.w);
    res.objective_trace = std::move(best.trace);
    res.step_objectives = std::move(best.steps);
    res.stationarity_residual = best.residual;
    res.stationarity_threshold = best.threshold;
    res.outer_iters = best.iters;
    res.converged = best.converged;
  }

  if (scale) {
    PrecisionFactorization cov;
    cov.r = res.fact.r;
    cov.d = scale->cwiseProduct(res.fact.d);
    cov.scale = *scale;
    res.fact.scale = *scale;
    res.fact_cov = std::move(cov);
  }
  res.wall_time = std::chrono::steady_clock::now() - t0;
  return res;
}

double stationarity_residual(const Matrix& r, const Vector& d, const Matrix& chat, double lambda, double alpha) {
  const Index p = chat.rows();
  Eigen::LLT<Matrix> llt(r);
  if (llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
  Matrix m = llt.solve(Matrix::Identity(p, p));
  m -= d.asDiagonal() * chat * d.asDiagonal();
  double worst = 0.0;
  for (Index i = 0; i < p; ++i) {
    double row_l1 = 0.0;
    for (Index j = 0; j < p; ++j) {
      if (j != i) row_l1 += std::fabs(r(i, j));
    }
    worst = std::max(worst, std::fabs(m(i, i) - alpha + lambda * row_l1));
    for (Index j = 0; j < p; ++j) {
      if (j == i) continue;
      const double mij = 0.5 * (m(i, j) + m(j, i));
      const double v = r(i, j) != 0.0 ? std::fabs(mij - lambda * (r(i, j) > 0.0 ? 1.0 : -1.0))
                                      : std::max(0.0, std::fabs(mij) - lambda);
      worst = std::max(worst, v);
    }
  }
  return worst;
}

ExplicitD explicit_d_from_r(const Matrix& r, double lambda, double alpha) {
  const Index p = r.rows();
  const Matrix rinv = inverse_spd(r);
  ExplicitD out;
  out.d.resize(p);
  for (Index i = 0; i < p; ++i) {
    double row_l1 = 0.0;
    for (Index j = 0; j < p; ++j) {
      if (j != i) row_l1 += std::fabs(r(i, j));
    }
    const double d2 = lambda * row_l1 + rinv(i, i) - alpha;
    if (d2 > 0.0) {
      out.d(i) = std::sqrt(d2);
    } else {
      out.d(i) = std::numeric_limits<double>::quiet_NaN();
      out.ok = false;
    }
  }
  return out;
}

ConsistencyCheck consistency_bound_check(const FitResult& fit, const CorrelationMatrix& chat, double lambda,
                                         double alpha, double slack) {
  const double lmin = chat.lambda_min();
  if (!(lmin > 1e-12)) reject("consistency bound needs a positive definite correlation matrix");
  const double p = static_cast<double>(chat.dim());
  ConsistencyCheck out;
  out.lhs = max_abs(inverse_spd(fit.k()) - chat.entries());
  out.rhs = (lambda * p + std::fabs(alpha)) * p * p / ((1.0 - alpha) * lmin);
  out.holds = out.lhs <= out.rhs + slack;
  return out;
}

UniquenessRegime uniqueness_certificate(const CorrelationMatrix& chat, double /*lambda*/, double alpha) {
  if (!(alpha < 1.0)) bad_config("alpha must be < 1");
  const double p = static_cast<double>(chat.dim());
  const double dist = max_abs_offdiag(chat.entries());
  return dist <= 1.0 / std::sqrt(2.0 * (1.0 - alpha) * p * p * p) ? UniquenessRegime::small_correlation_regime
                                                                   : UniquenessRegime::none;
}

}  // namespace pcglasso
