#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "pcglasso/d_solver.hpp"
#include "pcglasso/error.hpp"

using namespace pcglasso;

namespace {

ScalingProblem problem_of(const Matrix& a) {
  ScalingProblem p;
  p.a = a;
  return p;
}

using Solver = DSolveResult (*)(const ScalingProblem&, const DSolveConfig&, const Vector&);
const Solver kSolvers[] = {solve_d_diagonal_newton, solve_d_exact_newton};

// A = (R o C) for random correlation-type R and C, which is PD.
Matrix random_a(int p, std::mt19937_64& rng) {
  const Matrix r = oracle::random_corr(p, rng, 6);
  const Matrix c = oracle::random_corr(p, rng, 6);
  return r.cwiseProduct(c);
}

}  // namespace

TEST_CASE("build_scaling_problem") {
  const auto id = CorrelationMatrix::identity(2);
  CHECK(build_scaling_problem(Matrix::Identity(2, 2), id, 0.0).a == Matrix::Identity(2, 2));
  CHECK(build_scaling_problem(Matrix::Identity(2, 2), id, 0.5).a == 2.0 * Matrix::Identity(2, 2));

  Matrix r(2, 2), c(2, 2);
  r << 1, -0.4, -0.4, 1;
  c << 1, 0.3, 0.3, 1;
  const auto prob = build_scaling_problem(r, CorrelationMatrix::from_matrix(c), 0.0);
  CHECK(prob.a(0, 1) == doctest::Approx(-0.12));
  CHECK(prob.a(1, 0) == prob.a(0, 1));
  CHECK(prob.lambda_min_chat == doctest::Approx(0.7));

  CHECK_THROWS_AS(build_scaling_problem(r, CorrelationMatrix::from_matrix(c), 1.0), Error);
}

TEST_CASE("closed-form scaling solutions") {
  Matrix half(2, 2);
  half << 1, 0.5, 0.5, 1;
  for (auto solve : kSolvers) {
    auto res = solve(problem_of(Matrix::Identity(3, 3)), {}, Vector::Constant(3, 0.3));
    CHECK(res.converged);
    CHECK((res.d - Vector::Ones(3)).cwiseAbs().maxCoeff() < 1e-9);

    res = solve(problem_of(2.0 * Matrix::Identity(3, 3)), {}, Vector::Ones(3));
    CHECK((res.d - Vector::Constant(3, std::sqrt(0.5))).cwiseAbs().maxCoeff() < 1e-9);

    res = solve(problem_of(half), {}, Vector::Ones(2));
    CHECK((res.d - Vector::Constant(2, 1.0 / std::sqrt(1.5))).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("both solvers match an independent gradient-descent reference") {
  std::mt19937_64 rng(17);
  for (int p : {2, 3, 5, 8}) {
    const Matrix a = random_a(p, rng);
    const Vector ref = oracle::scaling_reference(a);
    for (auto solve : kSolvers) {
      const auto res = solve(problem_of(a), {}, Vector::Ones(p));
      CHECK(res.converged);
      CHECK((res.d - ref).cwiseAbs().maxCoeff() < 1e-8);
    }
  }
}

TEST_CASE("solver properties on random problems") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.2, 3.0);
  for (int p : {2, 4, 10, 25, 50}) {
    CAPTURE(p);
    const Matrix r = oracle::random_corr(p, rng, 8);
    const auto chat = CorrelationMatrix::from_matrix(oracle::random_corr(p, rng, 8));
    const double alpha = p % 2 == 0 ? 0.0 : 0.3;
    const auto prob = build_scaling_problem(r, chat, alpha);
    Vector first;
    for (int start = 0; start < 3; ++start) {
      Vector init(p);
      for (int i = 0; i < p; ++i) init(i) = u(rng);
      for (auto solve : kSolvers) {
        const auto res = solve(prob, {}, init);
        REQUIRE(res.converged);
        CHECK((res.d.array() > 0).all());
        for (std::size_t t = 1; t < res.objective_trace.size(); ++t)
          CHECK(res.objective_trace[t] <= res.objective_trace[t - 1]);
        const Vector g = scaling_gradient(prob.a, res.d);
        CHECK(g.cwiseAbs().maxCoeff() <= 1e-6 * (1 + res.d.cwiseAbs().maxCoeff()));
        if (first.size() == 0) first = res.d;
        CHECK((res.d - first).cwiseAbs().maxCoeff() < 1e-8);
        // diagonal Hessian condition number limited by the visited box
        const double kappa_cap = (prob.a.diagonal().maxCoeff() + 1.0 / (res.min_d_visited * res.min_d_visited)) /
                                 (prob.a.diagonal().minCoeff() + 1.0 / (res.max_d_visited * res.max_d_visited));
        CHECK(res.max_hessian_condition <= kappa_cap * (1 + 1e-12));
      }
    }
    // every entry of the solution of the D-step lies in the box when R = I
    const auto prob_id = build_scaling_problem(Matrix::Identity(p, p), chat, alpha);
    const auto res = solve_d_exact_newton(prob_id, {}, Vector::Ones(p));
    const auto box = d_bounds(chat.lambda_min(), alpha, p);
    for (int i = 0; i < p; ++i) CHECK(box.contains(res.d(i)));
  }
}

TEST_CASE("objective helpers") {
  Matrix a(2, 2);
  a << 2, 1, 1, 3;
  Vector d(2);
  d << 1, 2;
  CHECK(scaling_objective(a, d) == doctest::Approx(0.5 * (2 + 4 + 12) - std::log(2.0)));
  const Vector g = scaling_gradient(a, d);
  CHECK(g(0) == doctest::Approx(4 - 1.0));
  CHECK(g(1) == doctest::Approx(7 - 0.5));
}

TEST_CASE("d_bounds") {
  auto b = d_bounds(1.0, 0.0, 4);
  CHECK(b.lo == doctest::Approx(0.25));
  CHECK(b.hi == doctest::Approx(2.0));
  b = d_bounds(1.0, 0.75, 2);
  CHECK(b.lo == doctest::Approx(0.25));
  CHECK(b.hi == doctest::Approx(std::sqrt(0.5)));
  b = d_bounds(1.0, 0.19, 1);
  CHECK(b.lo == doctest::Approx(0.9));
  CHECK(b.hi == doctest::Approx(0.9));
  CHECK_THROWS_AS(d_bounds(0.0, 0.0, 3), Error);
}

TEST_CASE("input and configuration errors") {
  const auto prob = problem_of(Matrix::Identity(2, 2));
  Vector bad(2);
  bad << 1, 0;
  for (auto solve : kSolvers) {
    CHECK_THROWS_AS(solve(prob, {}, bad), Error);
    CHECK_THROWS_AS(solve(prob, {}, Vector::Ones(3)), Error);
  }
  DSolveConfig cfg;
  cfg.c1 = 0.95;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  cfg.tol = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  cfg.max_iter = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("iteration cap reports non-convergence") {
  std::mt19937_64 rng(4);
  const Matrix a = random_a(20, rng);
  DSolveConfig cfg;
  cfg.max_iter = 1;
  const auto res = solve_d_diagonal_newton(problem_of(a), cfg, Vector::Constant(20, 5.0));
  CHECK_FALSE(res.converged);
  CHECK(res.iterations == 1);
  CHECK(res.objective_trace.size() == 2);
}

TEST_CASE("trace recording") {
  DSolveConfig cfg;
  cfg.record_trace = true;
  const auto res = solve_d_diagonal_newton(problem_of(Matrix::Identity(3, 3)), cfg, Vector::Constant(3, 2.0));
  REQUIRE_FALSE(res.trace.empty());
  CHECK(res.trace.front().iter == 1);
  CHECK(res.trace.size() + 1 == res.objective_trace.size());
}
