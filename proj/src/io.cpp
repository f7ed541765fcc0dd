#include "pcglasso/io.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <system_error>
#include <vector>

#include "pcglasso/error.hpp"

namespace pcglasso {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool parse_number(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* b = s.data();
  const char* e = b + s.size();
  if (*b == '+') ++b;
  const auto r = std::from_chars(b, e, out);
  return r.ec == std::errc() && r.ptr == e;
}

}  // namespace

Matrix parse_csv_matrix(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    std::vector<double> vals(cells.size());
    bool numeric = true;
    for (std::size_t k = 0; k < cells.size() && numeric; ++k) numeric = parse_number(cells[k], vals[k]);
    if (!numeric) {
      if (first) {
        first = false;
        continue;
      }
      bad_parse("line " + std::to_string(line_no) + ": non-numeric cell");
    }
    first = false;
    if (!rows.empty() && vals.size() != rows.front().size()) {
      bad_parse("line " + std::to_string(line_no) + ": expected " + std::to_string(rows.front().size()) +
                " columns, got " + std::to_string(vals.size()));
    }
    rows.push_back(std::move(vals));
  }
  if (rows.empty()) bad_parse("no numeric rows");
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  }
  return m;
}

Matrix read_csv_matrix(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) bad_parse("cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_csv_matrix(ss.str());
}

std::string format_double(double x) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

std::string matrix_csv(const Matrix& m) {
  std::string out;
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out += ',';
      out += format_double(m(i, j));
    }
    out += '\n';
  }
  return out;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path dir = target.has_parent_path() ? target.parent_path() : fs::path(".");
  std::random_device rd;
  const fs::path tmp = dir / ("." + target.filename().string() + ".tmp" + std::to_string(rd()));
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + tmp.string());
    f << content;
    f.flush();
    if (!f) {
      f.close();
      std::error_code ec;
      fs::remove(tmp, ec);
      throw std::runtime_error("write failed for " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw std::runtime_error("cannot move output into place at " + path);
  }
}

nlohmann::json matrix_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) bad_parse("expected a JSON array of rows");
  Matrix m(static_cast<Index>(j.size()), static_cast<Index>(j[0].size()));
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (j[r].size() != j[0].size()) bad_parse("ragged JSON matrix");
    for (std::size_t c = 0; c < j[r].size(); ++c) m(static_cast<Index>(r), static_cast<Index>(c)) = j[r][c].get<double>();
  }
  return m;
}

namespace {

nlohmann::json vector_json(const Vector& v) {
  nlohmann::json a = nlohmann::json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

}  // namespace

nlohmann::json fit_json(const FitResult& fit, const SolverConfig& cfg) {
  nlohmann::json j;
  j["lambda"] = fit.lambda;
  j["alpha"] = fit.alpha;
  j["converged"] = fit.converged;
  j["outer_iters"] = fit.outer_iters;
  j["objective"] = fit.objective();
  j["stationarity_residual"] = fit.stationarity_residual;
  j["stationarity_threshold"] = fit.stationarity_threshold;
  j["nnz_offdiag"] = count_offdiag_nonzero(fit.fact.r);
  j["wall_ms"] = fit.wall_time.count();
  j["R"] = matrix_json(fit.fact.r);
  j["d"] = vector_json(fit.fact.d);
  j["K"] = matrix_json(fit.k());
  if (fit.fact_cov) {
    j["d_cov"] = vector_json(fit.fact_cov->d);
    j["K_cov"] = matrix_json(fit.k_cov());
  }
  j["objective_trace"] = fit.objective_trace;
  j["config"] = {
      {"lambda", cfg.lambda},
      {"alpha", cfg.alpha},
      {"outer_tol", cfg.outer_tol},
      {"outer_max_iter", cfg.outer_max_iter},
      {"stationarity_tol", cfg.stationarity_tol},
      {"r_tol", cfg.r_tol},
      {"r_max_sweeps", cfg.r_max_sweeps},
      {"d_tol", cfg.d_cfg.tol},
      {"d_grad_tol", cfg.d_cfg.grad_tol},
      {"d_max_iter", cfg.d_cfg.max_iter},
      {"restarts", cfg.restarts},
      {"seed", cfg.seed},
  };
  return j;
}

std::string path_csv(const PathResult& path) {
  std::string out = "lambda,edges,loglik,bic,ebic,wall_ms\n";
  for (std::size_t i = 0; i < path.fits.size(); ++i) {
    out += format_double(path.lambdas[i]) + ',' + std::to_string(path.edge_counts[i]) + ',' +
           format_double(path.scores[i].loglik) + ',' + format_double(path.scores[i].bic) + ',' +
           format_double(path.scores[i].ebic) + ',' + format_double(path.fits[i].wall_time.count()) + '\n';
  }
  return out;
}

std::string heatmap_csv(const Heatmap& hm) {
  std::string out = "a,c,irr_pcg,irr_glasso,pd\n";
  for (const auto& c : hm.cells) {
    out += format_double(c.a) + ',' + format_double(c.c) + ',' + format_double(c.irr_pcg) + ',' +
           format_double(c.irr_glasso) + ',' + (c.pd ? "1" : "0") + '\n';
  }
  return out;
}

std::string study_csv(const StudyReport& report) {
  std::string out = "method,n,metric,mean,sd\n";
  for (const auto& r : report.rows) {
    const std::pair<const char*, const MetricSummary*> metrics[] = {
        {"rmse_full", &r.rmse_full},         {"rmse_diag", &r.rmse_diag},
        {"rmse_offdiag_nz", &r.rmse_offdiag_nz}, {"sign_accuracy", &r.sign_accuracy},
        {"wall_ms", &r.wall_ms}};
    for (const auto& [name, m] : metrics) {
      if (m->count == 0) continue;
      out += std::string(to_string(r.method)) + ',' + std::to_string(r.n) + ',' + name + ',' + format_double(m->mean) +
             ',' + format_double(m->sd) + '\n';
    }
  }
  return out;
}

nlohmann::json study_json(const StudyReport& report, const StudyConfig& cfg) {
  auto summary = [](const MetricSummary& m) { return nlohmann::json{{"mean", m.mean}, {"sd", m.sd}, {"count", m.count}}; };
  nlohmann::json j;
  j["structure"] = to_string(cfg.structure.kind);
  j["p"] = cfg.structure.p;
  j["replicates"] = cfg.replicates;
  j["selection"] = to_string(cfg.selection);
  j["seed"] = cfg.seed;
  j["alpha"] = cfg.alpha;
  j["rows"] = nlohmann::json::array();
  for (const auto& r : report.rows) {
    j["rows"].push_back({{"method", to_string(r.method)},
                         {"n", r.n},
                         {"failures", r.failures},
                         {"rmse_full", summary(r.rmse_full)},
                         {"rmse_diag", summary(r.rmse_diag)},
                         {"rmse_offdiag_nz", summary(r.rmse_offdiag_nz)},
                         {"sign_accuracy", summary(r.sign_accuracy)},
                         {"wall_ms", summary(r.wall_ms)}});
  }
  j["replicate_metrics"] = nlohmann::json::array();
  for (const auto& r : report.replicates) {
    nlohmann::json e{{"method", to_string(r.method)}, {"n", r.n}, {"replicate", r.replicate}, {"ok", r.ok}};
    if (r.ok) {
      e["lambda"] = r.lambda;
      e["rmse_full"] = r.rmse.full;
      e["rmse_diag"] = r.rmse.diag;
      if (r.rmse.offdiag_nz) e["rmse_offdiag_nz"] = *r.rmse.offdiag_nz;
      e["sign_accuracy"] = r.sign_acc;
    } else {
      e["error"] = r.error;
    }
    j["replicate_metrics"].push_back(std::move(e));
  }
  return j;
}

std::string timing_csv(const DBenchResult& bench) {
  std::string out = "p,solver,mean_ms,ci_lo,ci_hi\n";
  for (const auto& r : bench.rows) {
    out += std::to_string(r.p) + ',' + r.solver + ',' + format_double(r.mean_ms) + ',' + format_double(r.ci_lo) +
           ',' + format_double(r.ci_hi) + '\n';
  }
  return out;
}

}  // namespace pcglasso
