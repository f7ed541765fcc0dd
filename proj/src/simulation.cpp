#include "pcglasso/simulation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>

#include "pcglasso/error.hpp"
#include "pcglasso/model_select.hpp"
#include "pcglasso/parallel.hpp"
#include "pcglasso/r_solver.hpp"

namespace pcglasso {

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

Matrix checked(Matrix k, const char* what) {
  if (!is_positive_definite(k)) reject(std::string(what) + " is not positive definite");
  return k;
}

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

Matrix hub_precision(Index p) {
  if (p < 2) bad_config("hub needs p >= 2");
  Matrix k = Matrix::Identity(p, p);
  const double c = -1.0 / std::sqrt(static_cast<double>(p));
  for (Index i = 1; i < p; ++i) k(0, i) = k(i, 0) = c;
  return checked(std::move(k), "hub precision");
}

Matrix general_hub_precision(double a, double b, double c, Index p) {
  if (p < 2) bad_config("hub needs p >= 2");
  if (!(a > 0.0) || !(b > 0.0)) reject("hub parameters need a > 0 and b > 0");
  if (static_cast<double>(p - 1) * c * c >= a * b) {
    reject("hub parameters are not positive definite: (p - 1) c^2 >= a b");
  }
  Matrix k = Matrix::Identity(p, p) * b;
  k(0, 0) = a;
  for (Index i = 1; i < p; ++i) k(0, i) = k(i, 0) = c;
  return checked(std::move(k), "hub precision");
}

Matrix block_hub_precision(Index p, Index blocks) {
  if (blocks < 1 || p % blocks != 0) bad_config("block hub needs p divisible by the block count");
  const Index m = p / blocks;
  if (m < 2) bad_config("block hub needs blocks of size >= 2");
  const Matrix hub = hub_precision(m);
  Matrix k = Matrix::Zero(p, p);
  for (Index b = 0; b < blocks; ++b) k.block(b * m, b * m, m, m) = hub;
  return checked(std::move(k), "block hub precision");
}

Matrix chain_precision(Index p, double rho) {
  if (p < 2) bad_config("chain needs p >= 2");
  const double limit = 1.0 / (2.0 * std::cos(std::numbers::pi / static_cast<double>(p + 1)));
  if (!(std::fabs(rho) < limit)) reject("chain parameter outside the positive definite range");
  Matrix k = Matrix::Identity(p, p);
  for (Index i = 0; i + 1 < p; ++i) k(i, i + 1) = k(i + 1, i) = rho;
  return checked(std::move(k), "chain precision");
}

Matrix block_sparse_precision(Index p, Index blocks, double edge_prob, std::uint64_t seed) {
  if (blocks < 1 || p % blocks != 0) bad_config("block sparse needs p divisible by the block count");
  if (!(edge_prob >= 0.0 && edge_prob <= 1.0)) bad_config("edge probability must lie in [0, 1]");
  const Index m = p / blocks;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::uniform_real_distribution<double> mag(0.2, 0.5);
  Matrix k = Matrix::Zero(p, p);
  for (Index b = 0; b < blocks; ++b) {
    for (Index j = 0; j < m; ++j) {
      for (Index i = j + 1; i < m; ++i) {
        if (u01(rng) < edge_prob) {
          const double w = (u01(rng) < 0.5 ? -1.0 : 1.0) * mag(rng);
          k(b * m + i, b * m + j) = k(b * m + j, b * m + i) = w;
        }
      }
    }
  }
  std::uniform_real_distribution<double> extra(0.5, 1.5);
  for (Index i = 0; i < p; ++i) k(i, i) = k.row(i).cwiseAbs().sum() + extra(rng);
  return checked(std::move(k), "block sparse precision");
}

Matrix random_correlation(Index p, std::uint64_t seed, Index dof) {
  if (p < 1) bad_config("random correlation needs p >= 1");
  if (dof == 0) dof = p + 5;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  Matrix x(dof, p);
  for (Index j = 0; j < p; ++j) {
    for (Index i = 0; i < dof; ++i) x(i, j) = z(rng);
  }
  Matrix s = x.transpose() * x;
  symmetrize(s);
  const Vector h = s.diagonal().cwiseSqrt().cwiseInverse();
  Matrix c = h.asDiagonal() * s * h.asDiagonal();
  symmetrize(c);
  c.diagonal().setOnes();
  return c.cwiseMax(-1.0).cwiseMin(1.0);
}

Matrix sample_gaussian(const Matrix& sigma, Index n, std::uint64_t seed) {
  if (n < 1) bad_config("sample size must be >= 1");
  require_symmetric(sigma, "Sigma");
  Eigen::LLT<Matrix> llt(sigma);
  if (llt.info() != Eigen::Success) reject("Sigma is not positive definite");
  const Matrix l = llt.matrixL();
  const Index p = sigma.rows();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  Matrix zs(p, n);
  for (Index r = 0; r < n; ++r) {
    for (Index i = 0; i < p; ++i) zs(i, r) = z(rng);
  }
  return (l * zs).transpose();
}

RmseMetrics rmse_metrics(const Matrix& k_hat, const Matrix& k_star) {
  if (k_hat.rows() != k_star.rows() || k_hat.cols() != k_star.cols()) reject("rmse: shape mismatch");
  const Index p = k_star.rows();
  const Matrix diff = k_hat - k_star;
  RmseMetrics m;
  m.full = std::sqrt(diff.squaredNorm() / static_cast<double>(p * p));
  m.diag = std::sqrt(diff.diagonal().squaredNorm() / static_cast<double>(p));
  double ss = 0.0;
  Index count = 0;
  for (Index j = 0; j < p; ++j) {
    for (Index i = 0; i < p; ++i) {
      if (i != j && k_star(i, j) != 0.0) {
        ss += diff(i, j) * diff(i, j);
        ++count;
      }
    }
  }
  if (count > 0) m.offdiag_nz = std::sqrt(ss / static_cast<double>(count));
  return m;
}

double sign_accuracy(const Matrix& k_hat, const Matrix& k_star, double tol) {
  if (k_hat.rows() != k_star.rows() || k_hat.cols() != k_star.cols()) reject("sign accuracy: shape mismatch");
  const Index p = k_star.rows();
  if (p < 2) return 1.0;
  auto sgn = [](double x, double t) { return std::fabs(x) <= t ? 0 : (x > 0.0 ? 1 : -1); };
  Index hits = 0, total = 0;
  for (Index j = 1; j < p; ++j) {
    for (Index i = 0; i < j; ++i) {
      hits += sgn(k_hat(i, j), tol) == sgn(k_star(i, j), 0.0) ? 1 : 0;
      ++total;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(total);
}

const char* to_string(Structure s) {
  switch (s) {
    case Structure::hub: return "hub";
    case Structure::block_hub: return "block_hub";
    case Structure::general_hub: return "general_hub";
    case Structure::chain: return "chain";
    case Structure::block_sparse: return "block_sparse";
  }
  return "?";
}

const char* to_string(Method m) {
  switch (m) {
    case Method::pcglasso: return "pcglasso";
    case Method::glasso: return "glasso";
    case Method::corr_glasso: return "corr_glasso";
  }
  return "?";
}

const char* to_string(Selection s) {
  switch (s) {
    case Selection::bic: return "bic";
    case Selection::ebic: return "ebic";
    case Selection::cv: return "cv";
  }
  return "?";
}

Matrix make_precision(const StructureSpec& spec, std::uint64_t seed) {
  switch (spec.kind) {
    case Structure::hub: return hub_precision(spec.p);
    case Structure::block_hub: return block_hub_precision(spec.p, spec.blocks);
    case Structure::general_hub: return general_hub_precision(spec.a, spec.b, spec.c, spec.p);
    case Structure::chain: return chain_precision(spec.p, spec.rho);
    case Structure::block_sparse: return block_sparse_precision(spec.p, spec.blocks, spec.edge_prob, seed);
  }
  bad_config("unknown structure");
}

void StudyConfig::validate() const {
  if (n_grid.empty()) bad_config("study needs at least one sample size");
  for (Index n : n_grid) {
    if (n < 2) bad_config("sample sizes must be >= 2");
  }
  if (replicates < 1) bad_config("replicates must be >= 1");
  if (methods.empty()) bad_config("study needs at least one method");
  if (grid_points < 1) bad_config("grid_points must be >= 1");
  if (!(lambda_small > 0.0)) bad_config("lambda_small must be positive");
  if (!(alpha < 1.0)) bad_config("alpha must be < 1");
  if (selection == Selection::cv && cv_folds < 2) bad_config("cv needs at least 2 folds");
  if (gamma_ebic < 0.0) bad_config("gamma_ebic must be >= 0");
}

namespace {

struct MethodPath {
  std::vector<double> grid;
  std::vector<Matrix> k_cov;
  std::vector<Index> edges;
};

std::vector<double> study_grid(double top, const StudyConfig& cfg) {
  return log_grid(std::max(top, cfg.lambda_small), cfg.lambda_small, cfg.grid_points);
}

MethodPath fit_method_path(Method method, const SampleData& data, const StudyConfig& cfg,
                           const std::vector<double>* grid) {
  MethodPath out;
  const CorrelationResult cr = correlation_from_data(data);
  RSolveConfig gcfg;
  gcfg.tol = 1e-10;
  switch (method) {
    case Method::pcglasso: {
      out.grid = grid ? *grid : study_grid(lambda_identity_threshold(cr.chat, cfg.alpha), cfg);
      PathOptions opt;
      opt.n = data.n();
      opt.threads = 1;
      const PathResult path = lambda_path(cr.chat, out.grid, cfg.alpha, cfg.solver, opt);
      if (path.error) reject(*path.error);
      for (const auto& f : path.fits) {
        out.k_cov.push_back(PrecisionFactorization{f.fact.r, cr.scale.cwiseProduct(f.fact.d), cr.scale}.compose());
        out.edges.push_back(edge_count(f));
      }
      break;
    }
    case Method::glasso:
    case Method::corr_glasso: {
      const bool on_corr = method == Method::corr_glasso;
      const Matrix s = on_corr ? cr.chat.entries() : cr.covariance;
      out.grid = grid ? *grid : study_grid(max_abs_offdiag(s), cfg);
      for (double lam : out.grid) {
        const GlassoResult g = glasso_fit(s, lam, gcfg);
        Matrix k = on_corr ? Matrix(cr.scale.asDiagonal() * g.k * cr.scale.asDiagonal()) : g.k;
        symmetrize(k);
        out.edges.push_back(count_offdiag_nonzero(k));
        out.k_cov.push_back(std::move(k));
      }
      break;
    }
  }
  return out;
}

MetricSummary summarise(const std::vector<double>& v) {
  MetricSummary s;
  s.count = static_cast<Index>(v.size());
  if (v.empty()) return s;
  double sum = 0.0;
  for (double x : v) sum += x;
  s.mean = sum / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return s;
}

}  // namespace

StudyReport run_study(const StudyConfig& cfg) {
  cfg.validate();
  StudyReport report;
  report.k_star = make_precision(cfg.structure, derive_seed(cfg.seed, 0));
  const Matrix sigma = [&] {
    Eigen::LLT<Matrix> llt(report.k_star);
    Matrix s = llt.solve(Matrix::Identity(report.k_star.rows(), report.k_star.cols()));
    symmetrize(s);
    return s;
  }();

  const std::size_t n_methods = cfg.methods.size();
  const std::size_t reps = static_cast<std::size_t>(cfg.replicates);
  const std::size_t tasks = cfg.n_grid.size() * reps;
  report.replicates.resize(tasks * n_methods);

  parallel_for(tasks, cfg.threads, [&](std::size_t t) {
    const std::size_t ni = t / reps;
    const int rep = static_cast<int>(t % reps);
    const Index n = cfg.n_grid[ni];
    const std::uint64_t rseed = derive_seed(cfg.seed, 1 + t);
    std::optional<SampleData> data;
    std::string data_error;
    try {
      data = SampleData::from_rows(sample_gaussian(sigma, n, rseed));
    } catch (const std::exception& e) {
      data_error = e.what();
    }
    for (std::size_t mi = 0; mi < n_methods; ++mi) {
      ReplicateMetrics& out = report.replicates[t * n_methods + mi];
      out.method = cfg.methods[mi];
      out.n = n;
      out.replicate = rep;
      if (!data) {
        out.error = data_error;
        continue;
      }
      const auto t0 = std::chrono::steady_clock::now();
      try {
        const MethodPath path = fit_method_path(out.method, *data, cfg, nullptr);
        std::size_t pick = 0;
        if (cfg.selection == Selection::cv) {
          const GridFitter fitter = [&](const SampleData& train, const std::vector<double>& grid) {
            return fit_method_path(out.method, train, cfg, &grid).k_cov;
          };
          const CvResult cv = cross_validate_with(*data, path.grid, cfg.cv_folds, derive_seed(rseed, 7), fitter, 1);
          pick = static_cast<std::size_t>(cv.selected_index);
        } else {
          const Matrix s = sample_covariance(*data);
          const double nn = static_cast<double>(n);
          const double logp = std::log(static_cast<double>(s.rows()));
          double best = std::numeric_limits<double>::infinity();
          for (std::size_t g = 0; g < path.grid.size(); ++g) {
            const double e = static_cast<double>(path.edges[g]);
            double score = -2.0 * gaussian_loglik(path.k_cov[g], s, nn) + e * std::log(nn);
            if (cfg.selection == Selection::ebic) score += 4.0 * cfg.gamma_ebic * e * logp;
            if (score < best) {
              best = score;
              pick = g;
            }
          }
        }
        out.lambda = path.grid[pick];
        out.rmse = rmse_metrics(path.k_cov[pick], report.k_star);
        out.sign_acc = sign_accuracy(path.k_cov[pick], report.k_star);
        out.ok = true;
      } catch (const std::exception& e) {
        out.error = e.what();
      }
      out.wall_ms = elapsed_ms(t0);
    }
  });

  for (Index n : cfg.n_grid) {
    for (Method m : cfg.methods) {
      StudyRow row{m, n, {}, {}, {}, {}, {}, 0};
      std::vector<double> full, diag, off, sign, wall;
      for (const auto& r : report.replicates) {
        if (r.method != m || r.n != n) continue;
        if (!r.ok) {
          ++row.failures;
          continue;
        }
        full.push_back(r.rmse.full);
        diag.push_back(r.rmse.diag);
        if (r.rmse.offdiag_nz) off.push_back(*r.rmse.offdiag_nz);
        sign.push_back(r.sign_acc);
        wall.push_back(r.wall_ms);
      }
      row.rmse_full = summarise(full);
      row.rmse_diag = summarise(diag);
      row.rmse_offdiag_nz = summarise(off);
      row.sign_accuracy = summarise(sign);
      row.wall_ms = summarise(wall);
      report.rows.push_back(row);
    }
  }
  return report;
}

DBenchResult bench_d_solvers(const std::vector<Index>& p_grid, int replicates, std::uint64_t seed,
                             const DSolveConfig& cfg, double agreement_tol) {
  if (replicates < 1) bad_config("bench needs replicates >= 1");
  cfg.validate();
  DBenchResult res;
  for (std::size_t pi = 0; pi < p_grid.size(); ++pi) {
    const Index p = p_grid[pi];
    if (p < 1) bad_config("bench dimensions must be >= 1");
    std::vector<double> t_diag, t_exact;
    for (int r = 0; r < replicates; ++r) {
      const std::uint64_t s = derive_seed(seed, pi * 100003ULL + static_cast<std::uint64_t>(r));
      const Matrix rr = random_correlation(p, derive_seed(s, 1));
      const CorrelationMatrix chat = CorrelationMatrix::from_matrix(random_correlation(p, derive_seed(s, 2)));
      const ScalingProblem prob = build_scaling_problem(rr, chat, 0.0);
      const Vector init = Vector::Ones(p);

      auto t0 = std::chrono::steady_clock::now();
      const DSolveResult a = solve_d_diagonal_newton(prob, cfg, init);
      t_diag.push_back(elapsed_ms(t0));
      t0 = std::chrono::steady_clock::now();
      const DSolveResult b = solve_d_exact_newton(prob, cfg, init);
      t_exact.push_back(elapsed_ms(t0));

      const double gap = (a.d - b.d).cwiseAbs().maxCoeff();
      res.max_disagreement = std::max(res.max_disagreement, gap);
      ++res.instances;
      if (!(gap <= agreement_tol)) ++res.disagreements;
    }
    for (const auto& [name, v] : {std::pair{"diagonal_newton", &t_diag}, std::pair{"exact_newton", &t_exact}}) {
      const MetricSummary m = summarise(*v);
      const double half = 1.96 * m.sd / std::sqrt(static_cast<double>(v->size()));
      res.rows.push_back({p, name, m.mean, m.mean - half, m.mean + half});
    }
  }
  return res;
}

}  // namespace pcglasso
