#include <doctest.h>

#include <cmath>
#include <mutex>
#include <random>

#include "oracles.hpp"
#include "pcglasso/error.hpp"
#include "pcglasso/model_select.hpp"

using namespace pcglasso;

namespace {

Matrix gaussian_rows(Index n, Index p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  Matrix x(n, p);
  for (Index i = 0; i < x.size(); ++i) x.data()[i] = z(rng);
  return x;
}

CorrelationMatrix random_chat(int p, std::mt19937_64& rng) {
  return CorrelationMatrix::from_matrix(oracle::random_corr(p, rng, 10));
}

PathOptions opts(Index n, PathMode mode = PathMode::chained) {
  PathOptions o;
  o.n = n;
  o.mode = mode;
  return o;
}

}  // namespace

TEST_CASE("log grid") {
  const auto g = log_grid(1.0, 0.01, 3);
  REQUIRE(g.size() == 3);
  CHECK(g[0] == 1.0);
  CHECK(g[1] == doctest::Approx(0.1));
  CHECK(g[2] == 0.01);
  CHECK(log_grid(0.4, 0.4, 1) == std::vector<double>{0.4});
  CHECK_THROWS_AS(log_grid(1.0, 0.0, 3), Error);
  CHECK_THROWS_AS(log_grid(1.0, 0.1, 0), Error);
}

TEST_CASE("gaussian log-likelihood") {
  CHECK(gaussian_loglik(Matrix::Identity(3, 3), Matrix::Identity(3, 3), 10) == doctest::Approx(-15.0));
  CHECK(gaussian_loglik(Matrix::Identity(3, 3), 2 * Matrix::Identity(3, 3), 2) == doctest::Approx(-6.0));

  // per-sample sum on centred data
  Matrix x = gaussian_rows(40, 4, 3);
  x = x.rowwise() - x.colwise().mean();
  const Matrix s = x.transpose() * x / 40.0;
  std::mt19937_64 rng(1);
  const Matrix k = oracle::random_spd(4, rng);
  double direct = 0;
  const double logdet = std::log(k.determinant());
  for (Index i = 0; i < 40; ++i) direct += 0.5 * (logdet - x.row(i) * k * x.row(i).transpose());
  CHECK(gaussian_loglik(k, s, 40) == doctest::Approx(direct).epsilon(1e-12));

  CHECK_THROWS_AS(gaussian_loglik(-Matrix::Identity(2, 2), Matrix::Identity(2, 2), 3), Error);
}

TEST_CASE("information criteria") {
  std::mt19937_64 rng(4);
  const auto chat = random_chat(5, rng);
  SolverConfig cfg;
  cfg.lambda = 0.05;
  const auto f = fit(chat, cfg);
  const Index n = 120;
  const double ll = gaussian_loglik(f.k(), chat.entries(), static_cast<double>(n));
  const Index e = edge_count(f);
  CHECK(e == count_offdiag_nonzero(f.fact.r));
  CHECK(bic_score(f, chat.entries(), n) == doctest::Approx(-2 * ll + static_cast<double>(e) * std::log(120.0)));
  CHECK(ebic_score(f, chat.entries(), n, 0.0) == bic_score(f, chat.entries(), n));
  CHECK(ebic_score(f, chat.entries(), n, 0.5) ==
        doctest::Approx(bic_score(f, chat.entries(), n) + 2.0 * static_cast<double>(e) * std::log(5.0)));

  cfg.lambda = 10;
  const auto empty = fit(chat, cfg);
  CHECK(edge_count(empty) == 0);
  CHECK(bic_score(empty, chat.entries(), n) ==
        doctest::Approx(-2 * gaussian_loglik(empty.k(), chat.entries(), static_cast<double>(n))));
}

TEST_CASE("path from the identity threshold") {
  std::mt19937_64 rng(6);
  const auto chat = random_chat(5, rng);
  const double lmax = lambda_identity_threshold(chat, 0.2);
  CHECK(lmax == doctest::Approx(0.8 * max_abs_offdiag(chat.entries())));
  const auto path = lambda_path(chat, {lmax}, 0.2, SolverConfig{}, opts(50));
  REQUIRE(path.fits.size() == 1);
  CHECK(path.fits[0].fact.r == Matrix::Identity(5, 5));
  CHECK(path.edge_counts[0] == 0);
}

TEST_CASE("edge counts grow as lambda falls") {
  std::mt19937_64 rng(10);
  int ok = 0;
  const int trials = 20;
  for (int t = 0; t < trials; ++t) {
    const auto chat = random_chat(4, rng);
    const auto path = lambda_path(chat, {0.5, 0.25, 0.0}, 0.0, SolverConfig{}, opts(100));
    REQUIRE(path.fits.size() == 3);
    ok += path.edge_counts[0] <= path.edge_counts[1] && path.edge_counts[1] <= path.edge_counts[2];
    for (const auto& f : path.fits) CHECK(f.stationarity_residual <= f.stationarity_threshold);
  }
  CHECK(ok >= 19);
}

TEST_CASE("duplicate grid values give identical fits") {
  std::mt19937_64 rng(15);
  const auto chat = random_chat(5, rng);
  const auto path = lambda_path(chat, {0.3, 0.1, 0.1, 0.05}, 0.0, SolverConfig{}, opts(80));
  REQUIRE(path.fits.size() == 4);
  CHECK(path.fits[1].fact.r == path.fits[2].fact.r);
  CHECK(path.fits[1].fact.d == path.fits[2].fact.d);
  CHECK(path.scores[1].bic == path.scores[2].bic);
}

TEST_CASE("chained and cold paths agree on well-conditioned problems") {
  std::mt19937_64 rng(25);
  const auto chat = random_chat(6, rng);
  const std::vector<double> grid{0.3, 0.2, 0.1, 0.05};
  const auto chained = lambda_path(chat, grid, 0.0, SolverConfig{}, opts(100));
  const auto cold = lambda_path(chat, grid, 0.0, SolverConfig{}, opts(100, PathMode::parallel_cold));
  REQUIRE(cold.fits.size() == grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK((chained.fits[i].fact.r - cold.fits[i].fact.r).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(chained.edge_counts[i] == cold.edge_counts[i]);
  }
}

TEST_CASE("path argument errors") {
  const auto chat = CorrelationMatrix::identity(3);
  CHECK_THROWS_AS(lambda_path(chat, {}, 0.0, SolverConfig{}, opts(10)), Error);
  CHECK_THROWS_AS(lambda_path(chat, {0.1, 0.2}, 0.0, SolverConfig{}, opts(10)), Error);
  CHECK_THROWS_AS(lambda_path(chat, {-0.1}, 0.0, SolverConfig{}, opts(10)), Error);
  CHECK_THROWS_AS(lambda_path(chat, {0.1}, 0.0, SolverConfig{}, opts(0)), Error);
}

TEST_CASE("cross-validation") {
  const auto grid = log_grid(0.5, 0.005, 10);
  SUBCASE("independent variables favour heavy penalties") {
    int upper = 0;
    const int seeds = 10;
    for (int s = 0; s < seeds; ++s) {
      const auto data = SampleData::from_rows(gaussian_rows(100, 5, 100 + s));
      const auto cv = cross_validate(data, grid, 0.0, 5, SolverConfig{}, 7 + s);
      CHECK(cv.selected_lambda == grid[static_cast<std::size_t>(cv.selected_index)]);
      upper += cv.selected_index < 5;
    }
    CHECK(upper >= 8);
  }
  SUBCASE("deterministic under a seed and duplicate grid points score equally") {
    const auto data = SampleData::from_rows(gaussian_rows(60, 4, 9));
    const std::vector<double> g{0.3, 0.1, 0.1, 0.02};
    const auto a = cross_validate(data, g, 0.0, 3, SolverConfig{}, 5);
    const auto b = cross_validate(data, g, 0.0, 3, SolverConfig{}, 5);
    CHECK(a.mean_heldout_loglik == b.mean_heldout_loglik);
    CHECK(a.selected_lambda == b.selected_lambda);
    CHECK(a.mean_heldout_loglik[1] == a.mean_heldout_loglik[2]);
    double best = a.mean_heldout_loglik[0];
    for (double v : a.mean_heldout_loglik) best = std::max(best, v);
    CHECK(a.mean_heldout_loglik[static_cast<std::size_t>(a.selected_index)] == best);
  }
  SUBCASE("guards") {
    const auto data = SampleData::from_rows(gaussian_rows(10, 3, 2));
    CHECK_THROWS_AS(cross_validate(data, grid, 0.0, 10, SolverConfig{}, 1), Error);
    CHECK_THROWS_AS(cross_validate(data, grid, 0.0, 1, SolverConfig{}, 1), Error);
    CHECK_THROWS_AS(cross_validate(data, {}, 0.0, 2, SolverConfig{}, 1), Error);
  }
  SUBCASE("generic fitter sees every row held out exactly once") {
    const auto data = SampleData::from_rows(gaussian_rows(23, 3, 4));
    Index seen = 0;
    std::mutex m;
    const GridFitter fitter = [&](const SampleData& train, const std::vector<double>& g) {
      std::lock_guard<std::mutex> lock(m);
      seen += data.n() - train.n();
      return std::vector<Matrix>(g.size(), Matrix::Identity(3, 3));
    };
    const auto cv = cross_validate_with(data, {1.0, 0.5}, 4, 3, fitter);
    CHECK(seen == 23);
    CHECK(cv.folds == 4);
    CHECK(cv.selected_index == 0);
  }
}
