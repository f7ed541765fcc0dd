#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const fs::path& workdir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "pcglasso_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

fs::path file(const std::string& name) { return workdir() / name; }

void write(const std::string& name, const std::string& content) {
  std::ofstream f(file(name));
  f << content;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

int run(const std::string& args) {
  const std::string cmd = std::string(PCGLASSO_CLI_PATH) + " " + args + " >" + file("stdout.txt").string() + " 2>" +
                          file("stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("usage errors exit 2") {
  write("id.csv", "1,0,0\n0,1,0\n0,0,1\n");
  CHECK(run("fit --corr " + file("id.csv").string() + " --out " + file("x.json").string()) == 2);
  CHECK(run("fit --lambda 0.1 --out " + file("x.json").string()) == 2);
  CHECK(run("nonsense") == 2);
  CHECK(run("irr --hub 1,1,0.2 --out " + file("x.csv").string()) == 2);
  const auto err = nlohmann::json::parse(slurp(file("stderr.txt")));
  CHECK(err["exit_code"] == 2);
  CHECK(err["kind"] == "usage");
}

TEST_CASE("malformed input exits 3") {
  write("bad.csv", "1,2\n3\n");
  CHECK(run("fit --corr " + file("bad.csv").string() + " --lambda 0.1 --out " + file("x.json").string()) == 3);
  CHECK_FALSE(fs::exists(file("x.json")));
}

TEST_CASE("numeric preconditions exit 4") {
  write("notpd.csv", "1,0.9,0.9\n0.9,1,-0.9\n0.9,-0.9,1\n");
  CHECK(run("fit --corr " + file("notpd.csv").string() + " --lambda 0 --out " + file("x.json").string()) == 4);
  CHECK(run("irr --hub 1,1,0.3,15 --out " + file("h.csv").string()) == 4);
  CHECK(slurp(file("stderr.txt")).find("pd = false") != std::string::npos);
  write("const.csv", "1,2\n1,3\n1,4\n");
  CHECK(run("fit --data " + file("const.csv").string() + " --lambda 0.1 --out " + file("x.json").string()) == 4);
}

TEST_CASE("fit on the identity") {
  CHECK(run("fit --corr " + file("id.csv").string() + " --lambda 0.5 --alpha 0 --out " + file("id.json").string()) ==
        0);
  const auto j = nlohmann::json::parse(slurp(file("id.json")));
  CHECK(j["converged"] == true);
  for (int i = 0; i < 3; ++i) {
    CHECK(j["d"][i].get<double>() == doctest::Approx(1.0));
    for (int k = 0; k < 3; ++k) CHECK(j["R"][i][k].get<double>() == (i == k ? 1.0 : 0.0));
  }
}

TEST_CASE("unpenalised fit on data inverts the sample correlation") {
  write("data.csv",
        "u,v,w\n0.3,1.2,-0.5\n1.1,0.4,0.2\n-0.7,-1.3,0.9\n0.5,0.1,-1.4\n2.0,1.7,0.3\n-1.2,-0.2,0.8\n0.1,-0.9,-0.6\n");
  REQUIRE(run("fit --data " + file("data.csv").string() + " --lambda 0 --out " + file("mle.json").string()) == 0);
  const auto j = nlohmann::json::parse(slurp(file("mle.json")));
  // K_cov times the 1/n sample covariance should be the identity.
  const double x[7][3] = {{0.3, 1.2, -0.5}, {1.1, 0.4, 0.2}, {-0.7, -1.3, 0.9}, {0.5, 0.1, -1.4},
                          {2.0, 1.7, 0.3},  {-1.2, -0.2, 0.8}, {0.1, -0.9, -0.6}};
  double mean[3] = {0, 0, 0}, cov[3][3] = {};
  for (auto& row : x)
    for (int a = 0; a < 3; ++a) mean[a] += row[a] / 7;
  for (auto& row : x)
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) cov[a][b] += (row[a] - mean[a]) * (row[b] - mean[b]) / 7;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      double s = 0;
      for (int c = 0; c < 3; ++c) s += j["K_cov"][a][c].get<double>() * cov[c][b];
      CHECK(s == doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-8).scale(1.0));
    }
}

TEST_CASE("hub irrepresentability rows") {
  REQUIRE(run("irr --hub 1,1,0.2,15 --out " + file("hub.csv").string()) == 0);
  const std::string out = slurp(file("hub.csv"));
  CHECK(out.rfind("source,irr_pcg,irr_glasso,pcg_satisfied,glasso_satisfied,pd\n", 0) == 0);
  CHECK(out.find("closed_form,0.288") != std::string::npos);
  CHECK(out.find(",0.4,") != std::string::npos);

  write("diag.csv", "2,0,0\n0,3,0\n0,0,1\n");
  REQUIRE(run("irr --kstar " + file("diag.csv").string() + " --out " + file("diag_irr.csv").string()) == 0);
  CHECK(slurp(file("diag_irr.csv")).find("kstar,0,0,") != std::string::npos);
}

TEST_CASE("path, select and heatmap outputs are deterministic") {
  write("corr.csv", "1,0.4,0.1,0\n0.4,1,0.3,0.2\n0.1,0.3,1,-0.25\n0,0.2,-0.25,1\n");
  const std::string corr = file("corr.csv").string();
  REQUIRE(run("path --corr " + corr + " --n 100 --grid-points 6 --out " + file("p1.csv").string()) == 0);
  REQUIRE(run("path --corr " + corr + " --n 100 --grid-points 6 --mode cold --out " + file("p2.csv").string()) == 0);
  const std::string p1 = slurp(file("p1.csv"));
  CHECK(p1.rfind("lambda,edges,loglik,bic,ebic,wall_ms\n", 0) == 0);
  CHECK(std::count(p1.begin(), p1.end(), '\n') == 7);
  CHECK(run("path --corr " + corr + " --lambdas 0.1,0.2 --n 100 --out " + file("p3.csv").string()) == 2);

  REQUIRE(run("select --corr " + corr + " --n 100 --rule ebic --out " + file("s.json").string()) == 0);
  CHECK(nlohmann::json::parse(slurp(file("s.json"))).contains("lambda"));

  const std::string hm = "heatmap --a-steps 4 --c-steps 5 --seed 3 --out ";
  REQUIRE(run(hm + file("h1.csv").string()) == 0);
  REQUIRE(run(hm + file("h2.csv").string()) == 0);
  CHECK(slurp(file("h1.csv")) == slurp(file("h2.csv")));
}

TEST_CASE("simulate and bench-d write their tables") {
  REQUIRE(run("simulate --structure hub --p 6 --n 100 --reps 2 --seed 4 --out " + file("sim.csv").string() +
              " --json " + file("sim.json").string()) == 0);
  const std::string sim = slurp(file("sim.csv"));
  CHECK(sim.rfind("method,n,metric,mean,sd\n", 0) == 0);
  CHECK(sim.find("pcglasso,100,rmse_full") != std::string::npos);
  CHECK(nlohmann::json::parse(slurp(file("sim.json")))["rows"].size() == 2);

  REQUIRE(run("bench-d --p 2,10 --reps 2 --out " + file("bench.csv").string()) == 0);
  const std::string bench = slurp(file("bench.csv"));
  CHECK(bench.rfind("p,solver,mean_ms,ci_lo,ci_hi\n", 0) == 0);
  CHECK(std::count(bench.begin(), bench.end(), '\n') == 5);
}
