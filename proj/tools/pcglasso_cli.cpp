// pcglasso command-line front end.
//
// Exit codes: 0 success, 2 usage, 3 input parse, 4 numeric precondition,
// 5 non-convergence (the result file is still written), 1 anything else.

#include <CLI11.hpp>
#include <cmath>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pcglasso/error.hpp"
#include "pcglasso/io.hpp"
#include "pcglasso/irrepresentability.hpp"
#include "pcglasso/model_select.hpp"
#include "pcglasso/parallel.hpp"
#include "pcglasso/pcglasso.hpp"
#include "pcglasso/simulation.hpp"

namespace pg = pcglasso;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitOther = 1;
constexpr int kExitUsage = 2;
constexpr int kExitParse = 3;
constexpr int kExitNumeric = 4;
constexpr int kExitNotConverged = 5;

int report_error(const std::string& kind, const std::string& msg, int code) {
  std::cerr << nlohmann::json{{"error", msg}, {"kind", kind}, {"exit_code", code}}.dump() << '\n';
  return code;
}

struct InputOpts {
  std::string data;
  std::string corr;
  pg::Index n = 0;
};

struct Input {
  pg::CorrelationMatrix chat;
  std::optional<pg::Vector> scale;
  std::optional<pg::SampleData> data;
  pg::Index n = 0;
};

Input load_input(const InputOpts& in) {
  if (!in.data.empty()) {
    pg::SampleData data = pg::SampleData::from_rows(pg::read_csv_matrix(in.data));
    pg::CorrelationResult cr = pg::correlation_from_data(data);
    const pg::Index n = data.n();
    return Input{std::move(cr.chat), std::move(cr.scale), std::move(data), n};
  }
  pg::Matrix c = pg::read_csv_matrix(in.corr);
  return Input{pg::CorrelationMatrix::from_matrix(std::move(c)), std::nullopt, std::nullopt, in.n};
}

std::vector<double> parse_doubles(const std::string& s, const char* flag) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(cell, &used));
      if (used != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      pg::bad_config(std::string(flag) + ": cannot parse '" + cell + "' as a number");
    }
  }
  if (out.empty()) pg::bad_config(std::string(flag) + " is empty");
  return out;
}

void add_input_opts(CLI::App* cmd, InputOpts& in, bool need_n) {
  auto* d = cmd->add_option("--data", in.data, "CSV of observations, one row per sample")->check(CLI::ExistingFile);
  auto* c = cmd->add_option("--corr", in.corr, "CSV correlation matrix")->check(CLI::ExistingFile);
  d->excludes(c);
  c->excludes(d);
  if (need_n) cmd->add_option("--n", in.n, "sample size behind --corr (for information criteria)")->check(CLI::PositiveNumber);
}

void require_one_input(const InputOpts& in) {
  if (in.data.empty() == in.corr.empty()) pg::bad_config("exactly one of --data and --corr is required");
}

struct GridOpts {
  std::string lambdas;
  int points = 30;
  double lambda_min = 0.01;
};

void add_grid_opts(CLI::App* cmd, GridOpts& g) {
  cmd->add_option("--lambdas", g.lambdas, "comma-separated non-increasing lambda grid");
  cmd->add_option("--grid-points", g.points, "log-spaced grid size when --lambdas is absent")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--lambda-min", g.lambda_min, "smallest grid value when --lambdas is absent")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
}

std::vector<double> make_grid(const GridOpts& g, const pg::CorrelationMatrix& chat, double alpha) {
  if (!g.lambdas.empty()) return parse_doubles(g.lambdas, "--lambdas");
  const double top = std::max(pg::lambda_identity_threshold(chat, alpha), g.lambda_min);
  return pg::log_grid(top, g.lambda_min, g.points);
}

pg::SolverConfig base_solver(double alpha) {
  pg::SolverConfig cfg = pg::SolverConfig::from_env();
  cfg.alpha = alpha;
  return cfg;
}

pg::Structure parse_structure(const std::string& s) {
  if (s == "hub") return pg::Structure::hub;
  if (s == "block_hub") return pg::Structure::block_hub;
  if (s == "general_hub") return pg::Structure::general_hub;
  if (s == "chain") return pg::Structure::chain;
  if (s == "block_sparse") return pg::Structure::block_sparse;
  pg::bad_config("unknown structure " + s);
}

pg::Method parse_method(const std::string& s) {
  if (s == "pcglasso") return pg::Method::pcglasso;
  if (s == "glasso") return pg::Method::glasso;
  if (s == "corr_glasso") return pg::Method::corr_glasso;
  pg::bad_config("unknown method " + s);
}

pg::Selection parse_selection(const std::string& s) {
  if (s == "bic") return pg::Selection::bic;
  if (s == "ebic") return pg::Selection::ebic;
  if (s == "cv") return pg::Selection::cv;
  pg::bad_config("unknown selection rule " + s);
}

std::vector<std::string> split_names(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Partial-correlation graphical lasso toolkit"};
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads, "worker cap, 0 = available parallelism")->capture_default_str();

  // fit
  auto* fit_cmd = app.add_subcommand("fit", "fit one (lambda, alpha) and write the result as JSON");
  InputOpts fit_in;
  double fit_lambda = 0.0, fit_alpha = 0.0;
  int fit_restarts = 1;
  std::uint64_t fit_seed = 0;
  std::string fit_out;
  add_input_opts(fit_cmd, fit_in, false);
  fit_cmd->add_option("--lambda", fit_lambda, "penalty on off-diagonal entries of R")->required()->check(CLI::NonNegativeNumber);
  fit_cmd->add_option("--alpha", fit_alpha, "diagonal weight, < 1")->capture_default_str();
  fit_cmd->add_option("--restarts", fit_restarts, "starts in total; extra ones draw random d")->capture_default_str()->check(CLI::PositiveNumber);
  fit_cmd->add_option("--seed", fit_seed, "seed for random restarts")->capture_default_str();
  fit_cmd->add_option("--out", fit_out, "output JSON path")->required();

  // path
  auto* path_cmd = app.add_subcommand("path", "fit a lambda grid and write lambda,edges,loglik,bic,ebic,wall_ms");
  InputOpts path_in;
  GridOpts path_grid;
  double path_alpha = 0.0, path_gamma = 0.5;
  std::string path_mode = "chained", path_out;
  add_input_opts(path_cmd, path_in, true);
  add_grid_opts(path_cmd, path_grid);
  path_cmd->add_option("--alpha", path_alpha)->capture_default_str();
  path_cmd->add_option("--gamma-ebic", path_gamma)->capture_default_str()->check(CLI::NonNegativeNumber);
  path_cmd->add_option("--mode", path_mode, "chained (warm starts) or cold (parallel)")
      ->capture_default_str()
      ->check(CLI::IsMember({"chained", "cold"}));
  path_cmd->add_option("--out", path_out, "output CSV path")->required();

  // select
  auto* sel_cmd = app.add_subcommand("select", "choose lambda by bic, ebic or cv and write the chosen fit as JSON");
  InputOpts sel_in;
  GridOpts sel_grid;
  double sel_alpha = 0.0, sel_gamma = 0.5;
  std::string sel_rule = "bic", sel_out;
  int sel_folds = 5;
  std::uint64_t sel_seed = 0;
  add_input_opts(sel_cmd, sel_in, true);
  add_grid_opts(sel_cmd, sel_grid);
  sel_cmd->add_option("--alpha", sel_alpha)->capture_default_str();
  sel_cmd->add_option("--rule", sel_rule)->capture_default_str()->check(CLI::IsMember({"bic", "ebic", "cv"}));
  sel_cmd->add_option("--gamma-ebic", sel_gamma)->capture_default_str()->check(CLI::NonNegativeNumber);
  sel_cmd->add_option("--folds", sel_folds)->capture_default_str()->check(CLI::Range(2, 1000000));
  sel_cmd->add_option("--seed", sel_seed)->capture_default_str();
  sel_cmd->add_option("--out", sel_out, "output JSON path")->required();

  // irr
  auto* irr_cmd = app.add_subcommand("irr", "irrepresentability values of a precision matrix or a hub");
  std::string irr_kstar, irr_hub, irr_out;
  auto* irr_k = irr_cmd->add_option("--kstar", irr_kstar, "CSV precision matrix")->check(CLI::ExistingFile);
  auto* irr_h = irr_cmd->add_option("--hub", irr_hub, "a,b,c,p");
  irr_k->excludes(irr_h);
  irr_h->excludes(irr_k);
  irr_cmd->add_option("--out", irr_out, "output CSV path")->required();

  // heatmap
  auto* hm_cmd = app.add_subcommand("heatmap", "hub irrepresentability over an (a, c) grid");
  pg::Index hm_p = 15;
  double hm_b = 1.0, hm_a_min = 0.25, hm_a_max = 5.0, hm_c_min = 0.0, hm_c_max = 1.0, hm_frac = 0.05;
  int hm_a_steps = 20, hm_c_steps = 20;
  std::uint64_t hm_seed = 0;
  std::string hm_out;
  hm_cmd->add_option("--p", hm_p)->capture_default_str()->check(CLI::Range(2, 1000000));
  hm_cmd->add_option("--b", hm_b)->capture_default_str()->check(CLI::PositiveNumber);
  hm_cmd->add_option("--a-min", hm_a_min)->capture_default_str()->check(CLI::PositiveNumber);
  hm_cmd->add_option("--a-max", hm_a_max)->capture_default_str()->check(CLI::PositiveNumber);
  hm_cmd->add_option("--a-steps", hm_a_steps)->capture_default_str()->check(CLI::PositiveNumber);
  hm_cmd->add_option("--c-min", hm_c_min)->capture_default_str();
  hm_cmd->add_option("--c-max", hm_c_max)->capture_default_str();
  hm_cmd->add_option("--c-steps", hm_c_steps)->capture_default_str()->check(CLI::PositiveNumber);
  hm_cmd->add_option("--check-fraction", hm_frac, "share of PD cells recomputed by the general path")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  hm_cmd->add_option("--seed", hm_seed)->capture_default_str();
  hm_cmd->add_option("--out", hm_out, "output CSV path")->required();

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "simulation study: method,n,metric,mean,sd");
  pg::StudyConfig sim;
  std::string sim_structure = "hub", sim_ns = "500", sim_methods = "pcglasso,glasso", sim_sel = "bic", sim_out, sim_json;
  sim_cmd->add_option("--structure", sim_structure)
      ->capture_default_str()
      ->check(CLI::IsMember({"hub", "block_hub", "general_hub", "chain", "block_sparse"}));
  sim_cmd->add_option("--p", sim.structure.p)->capture_default_str()->check(CLI::Range(2, 100000));
  sim_cmd->add_option("--blocks", sim.structure.blocks)->capture_default_str()->check(CLI::PositiveNumber);
  sim_cmd->add_option("--a", sim.structure.a)->capture_default_str();
  sim_cmd->add_option("--b", sim.structure.b)->capture_default_str();
  sim_cmd->add_option("--c", sim.structure.c)->capture_default_str();
  sim_cmd->add_option("--rho", sim.structure.rho)->capture_default_str();
  sim_cmd->add_option("--edge-prob", sim.structure.edge_prob)->capture_default_str()->check(CLI::Range(0.0, 1.0));
  sim_cmd->add_option("--n", sim_ns, "comma-separated sample sizes")->capture_default_str();
  sim_cmd->add_option("--reps", sim.replicates)->capture_default_str()->check(CLI::PositiveNumber);
  sim_cmd->add_option("--methods", sim_methods, "subset of pcglasso,glasso,corr_glasso")->capture_default_str();
  sim_cmd->add_option("--selection", sim_sel)->capture_default_str()->check(CLI::IsMember({"bic", "ebic", "cv"}));
  sim_cmd->add_option("--folds", sim.cv_folds)->capture_default_str()->check(CLI::Range(2, 1000000));
  sim_cmd->add_option("--alpha", sim.alpha)->capture_default_str();
  sim_cmd->add_option("--seed", sim.seed)->capture_default_str();
  sim_cmd->add_option("--out", sim_out, "output CSV path")->required();
  sim_cmd->add_option("--json", sim_json, "optional JSON report path");

  // bench-d
  auto* bench_cmd = app.add_subcommand("bench-d", "time diagonal vs exact Newton on random scaling problems");
  std::string bench_ps = "2,50,200", bench_out;
  int bench_reps = 5;
  std::uint64_t bench_seed = 0;
  bench_cmd->add_option("--p", bench_ps, "comma-separated dimensions")->capture_default_str();
  bench_cmd->add_option("--reps", bench_reps)->capture_default_str()->check(CLI::PositiveNumber);
  bench_cmd->add_option("--seed", bench_seed)->capture_default_str();
  bench_cmd->add_option("--out", bench_out, "output CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("usage", e.what(), kExitUsage);
  }

  try {
    if (*fit_cmd) {
      require_one_input(fit_in);
      const Input in = load_input(fit_in);
      pg::SolverConfig cfg = base_solver(fit_alpha);
      cfg.lambda = fit_lambda;
      cfg.restarts = fit_restarts;
      cfg.seed = fit_seed;
      const pg::FitResult res = pg::fit(in.chat, cfg, in.scale);
      pg::write_file_atomic(fit_out, pg::fit_json(res, cfg).dump(2) + "\n");
      if (!res.converged) return report_error("not_converged", "outer iterations exhausted", kExitNotConverged);
      return kExitOk;
    }

    if (*path_cmd) {
      require_one_input(path_in);
      const Input in = load_input(path_in);
      if (in.n < 1) pg::bad_config("--n is required with --corr");
      pg::PathOptions opt;
      opt.n = in.n;
      opt.gamma_ebic = path_gamma;
      opt.mode = path_mode == "cold" ? pg::PathMode::parallel_cold : pg::PathMode::chained;
      opt.threads = threads;
      const pg::PathResult res =
          pg::lambda_path(in.chat, make_grid(path_grid, in.chat, path_alpha), path_alpha, base_solver(path_alpha), opt);
      if (res.error) return report_error("rejected_input", *res.error, kExitNumeric);
      pg::write_file_atomic(path_out, pg::path_csv(res));
      for (const auto& f : res.fits) {
        if (!f.converged) return report_error("not_converged", "a path fit did not converge", kExitNotConverged);
      }
      return kExitOk;
    }

    if (*sel_cmd) {
      require_one_input(sel_in);
      const Input in = load_input(sel_in);
      if (in.n < 1) pg::bad_config("--n is required with --corr");
      const std::vector<double> grid = make_grid(sel_grid, in.chat, sel_alpha);
      const pg::SolverConfig cfg = base_solver(sel_alpha);
      pg::PathOptions opt;
      opt.n = in.n;
      opt.gamma_ebic = sel_gamma;
      opt.threads = threads;
      const pg::PathResult path = pg::lambda_path(in.chat, grid, sel_alpha, cfg, opt);
      if (path.error) return report_error("rejected_input", *path.error, kExitNumeric);

      std::size_t pick = 0;
      nlohmann::json scores = nlohmann::json::array();
      if (sel_rule == "cv") {
        if (!in.data) pg::bad_config("--rule cv needs --data");
        const pg::CvResult cv = pg::cross_validate(*in.data, grid, sel_alpha, sel_folds, cfg, sel_seed, threads);
        pick = static_cast<std::size_t>(cv.selected_index);
        scores = cv.mean_heldout_loglik;
      } else {
        for (std::size_t i = 0; i < path.scores.size(); ++i) {
          const double s = sel_rule == "bic" ? path.scores[i].bic : path.scores[i].ebic;
          scores.push_back(s);
          const double best = sel_rule == "bic" ? path.scores[pick].bic : path.scores[pick].ebic;
          if (s < best) pick = i;
        }
      }
      pg::FitResult chosen = path.fits[pick];
      if (in.scale) {
        chosen.fact_cov = pg::PrecisionFactorization{chosen.fact.r, in.scale->cwiseProduct(chosen.fact.d), *in.scale};
      }
      pg::SolverConfig echo = cfg;
      echo.lambda = grid[pick];
      nlohmann::json j = pg::fit_json(chosen, echo);
      j["selection"] = {{"rule", sel_rule}, {"lambda_grid", grid}, {"scores", scores}, {"selected_index", pick}};
      pg::write_file_atomic(sel_out, j.dump(2) + "\n");
      if (!chosen.converged) return report_error("not_converged", "selected fit did not converge", kExitNotConverged);
      return kExitOk;
    }

    if (*irr_cmd) {
      if (irr_kstar.empty() == irr_hub.empty()) pg::bad_config("exactly one of --kstar and --hub is required");
      std::string csv = "source,irr_pcg,irr_glasso,pcg_satisfied,glasso_satisfied,pd\n";
      if (!irr_kstar.empty()) {
        const pg::Matrix k = pg::read_csv_matrix(irr_kstar);
        const pg::IrrReport r = pg::irr_report(k);
        csv += "kstar," + pg::format_double(r.irr_pcg) + ',' + pg::format_double(r.irr_glasso) + ',' +
               (r.pcg_satisfied ? "1" : "0") + ',' + (r.glasso_satisfied ? "1" : "0") + ",1\n";
      } else {
        const std::vector<double> v = parse_doubles(irr_hub, "--hub");
        if (v.size() != 4 || v[3] != std::floor(v[3]) || v[3] < 2) pg::bad_config("--hub expects a,b,c,p with integer p >= 2");
        const auto p = static_cast<pg::Index>(v[3]);
        const pg::HubIrr h = pg::hub_irr_closed_form(v[0], v[1], v[2], p);
        if (!h.pd) pg::reject("hub parameters give a matrix that is not positive definite (pd = false)");
        csv += "closed_form," + pg::format_double(h.pcg) + ',' + pg::format_double(h.glasso) + ',' +
               (h.pcg < 1.0 ? "1" : "0") + ',' + (h.glasso < 1.0 ? "1" : "0") + ",1\n";
        if (p <= pg::kMaxDenseIrrDim) {
          const pg::IrrReport r = pg::irr_report(pg::general_hub_precision(v[0], v[1], v[2], p));
          csv += "general," + pg::format_double(r.irr_pcg) + ',' + pg::format_double(r.irr_glasso) + ',' +
                 (r.pcg_satisfied ? "1" : "0") + ',' + (r.glasso_satisfied ? "1" : "0") + ",1\n";
        }
      }
      pg::write_file_atomic(irr_out, csv);
      return kExitOk;
    }

    if (*hm_cmd) {
      if (hm_a_max < hm_a_min || hm_c_max < hm_c_min) pg::bad_config("grid bounds must satisfy min <= max");
      auto lin = [](double lo, double hi, int n) {
        std::vector<double> g(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
        return g;
      };
      const pg::Heatmap hm = pg::irr_heatmap(lin(hm_a_min, hm_a_max, hm_a_steps), lin(hm_c_min, hm_c_max, hm_c_steps),
                                             hm_b, hm_p, hm_seed, hm_frac, 1e-8, threads);
      pg::write_file_atomic(hm_out, pg::heatmap_csv(hm));
      if (hm.mismatches > 0) {
        return report_error("rejected_input", "closed form and general path disagree on " +
                                                  std::to_string(hm.mismatches) + " cells", kExitNumeric);
      }
      return kExitOk;
    }

    if (*sim_cmd) {
      sim.structure.kind = parse_structure(sim_structure);
      sim.n_grid.clear();
      for (double n : parse_doubles(sim_ns, "--n")) {
        if (n != std::floor(n) || n < 2) pg::bad_config("--n values must be integers >= 2");
        sim.n_grid.push_back(static_cast<pg::Index>(n));
      }
      sim.methods.clear();
      for (const auto& m : split_names(sim_methods)) sim.methods.push_back(parse_method(m));
      sim.selection = parse_selection(sim_sel);
      sim.threads = threads;
      sim.solver = base_solver(sim.alpha);
      const pg::StudyReport rep = pg::run_study(sim);
      if (!sim_json.empty()) pg::write_file_atomic(sim_json, pg::study_json(rep, sim).dump(2) + "\n");
      pg::write_file_atomic(sim_out, pg::study_csv(rep));
      return kExitOk;
    }

    if (*bench_cmd) {
      std::vector<pg::Index> ps;
      for (double p : parse_doubles(bench_ps, "--p")) {
        if (p != std::floor(p) || p < 1) pg::bad_config("--p values must be positive integers");
        ps.push_back(static_cast<pg::Index>(p));
      }
      const pg::DBenchResult b = pg::bench_d_solvers(ps, bench_reps, bench_seed, pg::SolverConfig::from_env().d_cfg);
      pg::write_file_atomic(bench_out, pg::timing_csv(b));
      if (b.disagreements > 0) {
        return report_error("not_converged", "solvers disagree on " + std::to_string(b.disagreements) + " instances",
                            kExitNotConverged);
      }
      return kExitOk;
    }
  } catch (const pg::Error& e) {
    switch (e.kind()) {
      case pg::ErrorKind::usage: return report_error("usage", e.what(), kExitUsage);
      case pg::ErrorKind::parse: return report_error("parse", e.what(), kExitParse);
      case pg::ErrorKind::rejected_input: return report_error("rejected_input", e.what(), kExitNumeric);
    }
  } catch (const std::exception& e) {
    return report_error("internal", e.what(), kExitOther);
  }
  return kExitOk;
}
