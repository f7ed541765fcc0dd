#include "pcglasso/d_solver.hpp"

#include <cmath>
#include <limits>

#include "line_search.hpp"
#include "pcglasso/error.hpp"
#include "pcglasso/kernels.hpp"

namespace pcglasso {
namespace {

// x - log(1 + x) without cancellation for small |x|.
double x_minus_log1p(double x) {
  if (std::fabs(x) < 1e-3) {
    const double x2 = x * x;
    return x2 * (0.5 - x / 3.0 + x2 / 4.0 - x2 * x / 5.0 + x2 * x2 / 6.0);
  }
  return x - std::log1p(x);
}

void matvec(const Matrix& a, const Vector& x, Vector& y) {
  y.resize(a.rows());
  kernels::active().gemv(a.data(), static_cast<std::size_t>(a.outerStride()), static_cast<std::size_t>(a.rows()),
                         static_cast<std::size_t>(a.cols()), x.data(), y.data());
}

enum class Direction { diagonal, exact };

DSolveResult solve_scaling(const ScalingProblem& prob, const DSolveConfig& cfg, const Vector& init, Direction mode) {
  cfg.validate();
  const Matrix& a = prob.a;
  const Index p = a.rows();
  if (init.size() != p) reject("initial d has the wrong length");
  if (!init.allFinite() || (init.array() <= 0.0).any()) reject("initial d must be strictly positive");

  const auto& k = kernels::active();
  DSolveResult res;
  Vector d = init;
  Vector ad, g(p), h(p), step(p), a_step;
  double f = scaling_objective(a, d);
  res.objective_trace.push_back(f);
  res.min_d_visited = d.minCoeff();
  res.max_d_visited = d.maxCoeff();

  detail::LineSearchOptions ls{cfg.c1, cfg.c2, cfg.max_line_search_steps, cfg.eta_min};
  double f_drop = std::numeric_limits<double>::infinity();

  for (int iter = 1; iter <= cfg.max_iter; ++iter) {
    matvec(a, d, ad);
    g = ad - d.cwiseInverse();
    const double gnorm = g.lpNorm<Eigen::Infinity>();
    res.final_gradient_norm = gnorm;
    const bool stationary = gnorm <= cfg.grad_tol * (1.0 + d.lpNorm<Eigen::Infinity>());
    if (f_drop < cfg.tol && stationary) {
      res.converged = true;
      break;
    }
    if (gnorm == 0.0) {
      res.converged = true;
      break;
    }

    h = a.diagonal() + d.array().square().inverse().matrix();
    res.max_hessian_condition = std::max(res.max_hessian_condition, h.maxCoeff() / h.minCoeff());
    if (mode == Direction::diagonal) {
      step = g.cwiseQuotient(h);
    } else {
      Matrix hess = a;
      hess.diagonal() = h;
      Eigen::LLT<Matrix> llt(hess);
      step = llt.solve(g);
    }

    matvec(a, step, a_step);
    const double step_g = k.dot(step.data(), g.data(), static_cast<std::size_t>(p));
    const double step_a_step = k.dot(step.data(), a_step.data(), static_cast<std::size_t>(p));

    // phi(eta) = f(d - eta * step); psi = phi(eta) - phi(0) evaluated in closed form.
    auto eval = [&](double eta) {
      double log_part = 0.0, curv = 0.0;
      for (Index i = 0; i < p; ++i) {
        const double x = -eta * step(i) / d(i);
        if (!(x > -1.0)) return detail::LineSample{std::numeric_limits<double>::infinity(), 0.0};
        log_part += x_minus_log1p(x);
        curv += eta * step(i) * step(i) / (d(i) * (d(i) - eta * step(i)));
      }
      const double psi = -eta * step_g + 0.5 * eta * eta * step_a_step + log_part;
      const double dpsi = -step_g + eta * step_a_step + curv;
      return detail::LineSample{psi, dpsi};
    };

    const auto lsr = detail::strong_wolfe(eval, -step_g, 1.0, ls);
    if (!lsr.ok || lsr.eta < cfg.eta_min) {
      // No further decrease is representable along this direction.
      res.converged = stationary;
      res.iterations = iter;
      break;
    }
    d -= lsr.eta * step;
    f += lsr.psi;
    f_drop = -lsr.psi;
    res.objective_trace.push_back(f);
    res.min_d_visited = std::min(res.min_d_visited, d.minCoeff());
    res.max_d_visited = std::max(res.max_d_visited, d.maxCoeff());
    res.iterations = iter;
    if (cfg.record_trace) res.trace.push_back({iter, f, gnorm, lsr.eta});
  }
  if (!res.converged) {
    // max_iter reached: report the stationarity of the final iterate.
    matvec(a, d, ad);
    res.final_gradient_norm = (ad - d.cwiseInverse()).lpNorm<Eigen::Infinity>();
    res.converged = f_drop < cfg.tol &&
                    res.final_gradient_norm <= cfg.grad_tol * (1.0 + d.lpNorm<Eigen::Infinity>());
  }
  res.d = std::move(d);
  return res;
}

}  // namespace

void DSolveConfig::validate() const {
  if (max_iter < 1) bad_config("D-solver max_iter must be positive");
  if (!(tol > 0.0)) bad_config("D-solver tol must be positive");
  if (!(grad_tol > 0.0)) bad_config("D-solver grad_tol must be positive");
  if (!(c1 > 0.0 && c1 < c2 && c2 < 1.0)) bad_config("Wolfe constants must satisfy 0 < c1 < c2 < 1");
  if (!(eta_min > 0.0)) bad_config("D-solver eta_min must be positive");
}

ScalingProblem build_scaling_problem(const Matrix& r, const CorrelationMatrix& chat, double alpha) {
  if (!(alpha < 1.0)) bad_config("alpha must be < 1");
  const Index p = chat.dim();
  if (r.rows() != p || r.cols() != p) reject("R and C dimensions differ");
  ScalingProblem prob;
  prob.alpha = alpha;
  prob.lambda_min_chat = chat.lambda_min();
  prob.a.resize(p, p);
  kernels::active().hadamard(r.data(), chat.entries().data(), 1.0 / (1.0 - alpha), prob.a.data(),
                             static_cast<std::size_t>(p * p));
  symmetrize(prob.a);
  return prob;
}

double scaling_objective(const Matrix& a, const Vector& d) {
  return 0.5 * d.dot(a * d) - d.array().log().sum();
}

Vector scaling_gradient(const Matrix& a, const Vector& d) { return a * d - d.cwiseInverse(); }

DSolveResult solve_d_diagonal_newton(const ScalingProblem& prob, const DSolveConfig& cfg, const Vector& init) {
  return solve_scaling(prob, cfg, init, Direction::diagonal);
}

DSolveResult solve_d_exact_newton(const ScalingProblem& prob, const DSolveConfig& cfg, const Vector& init) {
  return solve_scaling(prob, cfg, init, Direction::exact);
}

Interval d_bounds(double lambda_min_chat, double alpha, Index p) {
  if (!(lambda_min_chat > 0.0)) reject("D bounds need a positive definite correlation matrix");
  if (!(alpha < 1.0)) bad_config("alpha must be < 1");
  if (p < 1) reject("dimension must be positive");
  const double pp = static_cast<double>(p);
  return Interval{std::sqrt((1.0 - alpha) * lambda_min_chat) / pp, std::sqrt(pp * (1.0 - alpha) / lambda_min_chat)};
}

}  // namespace pcglasso
