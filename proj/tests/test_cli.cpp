#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "doctest.h"
#include "subsetforge/selection.hpp"

namespace fs = std::filesystem;

namespace {

int run_cli(std::initializer_list<const char*> args) {
  std::vector<const char*> argv = {"subsetforge"};
  argv.insert(argv.end(), args.begin(), args.end());
  return subsetforge::cli::run(static_cast<int>(argv.size()), argv.data());
}

fs::path fresh_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "subsetforge_cli_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

int spawn(const std::string& args) {
  std::string cmd = std::string("\"") + TEST_CLI_BIN + "\" " + args;
  int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST_CASE("bad invocations exit with the usage status") {
  CHECK(run_cli({}) == 1);                                    // a subcommand is required
  CHECK(run_cli({"wrapper", "--method", "bogus"}) == 1);      // not in the method set
  CHECK(run_cli({"wrapper", "--method", "forward", "--tol", "-0.5"}) == 1);
  CHECK(run_cli({"wrapper", "--method", "backward", "--tol", "0.5"}) == 1);
  CHECK(run_cli({"wrapper", "--method", "fixed", "--tol", "0.01"}) == 1);
  CHECK(run_cli({"wrapper", "--method", "forward", "--k", "3"}) == 1);
  CHECK(run_cli({"wrapper", "--method", "fixed", "--model", "quantum"}) == 1);
  CHECK(run_cli({"sweep", "--order", "sideways"}) == 1);
  CHECK(run_cli({"--test-fraction", "1.5", "rank"}) == 1);
  CHECK(run_cli({"--budget", "0", "sweep"}) == 1);
  CHECK(run_cli({"--folds", "1", "sweep"}) == 1);
  CHECK(run_cli({"--n", "0", "gen"}) == 1);
  CHECK(run_cli({"--input", "x.csv", "--n", "50", "gen"}) == 1);  // mutually exclusive
}

TEST_CASE("runtime failures exit with the error status") {
  fs::path out = fresh_dir("errors");
  CHECK(run_cli({"--input", "/nonexistent/data.csv", "--out", out.c_str(), "rank"}) == 2);
}

TEST_CASE("gen writes byte-identical artifacts for a fixed seed") {
  fs::path a = fresh_dir("gen_a");
  fs::path b = fresh_dir("gen_b");
  fs::path c = fresh_dir("gen_c");

  CHECK(run_cli({"--seed", "3", "--n", "150", "--out", a.c_str(), "gen"}) == 0);
  CHECK(run_cli({"--seed", "3", "--n", "150", "--out", b.c_str(), "gen"}) == 0);
  CHECK(run_cli({"--seed", "4", "--n", "150", "--out", c.c_str(), "gen"}) == 0);

  CHECK(slurp(a / "synthetic.csv") == slurp(b / "synthetic.csv"));
  CHECK(slurp(a / "generator_config.json") == slurp(b / "generator_config.json"));
  CHECK(slurp(a / "synthetic.csv") != slurp(c / "synthetic.csv"));
}

TEST_CASE("rank reads a csv and writes the ranking figure data") {
  fs::path gen_dir = fresh_dir("rank_gen");
  fs::path out = fresh_dir("rank_out");
  REQUIRE(run_cli({"--seed", "3", "--n", "200", "--out", gen_dir.c_str(), "gen"}) == 0);

  fs::path csv = gen_dir / "synthetic.csv";
  CHECK(run_cli({"--input", csv.c_str(), "--out", out.c_str(), "rank"}) == 0);

  std::string ranking = slurp(out / "ranking.csv");
  CHECK(ranking.rfind("feature,rho,rank", 0) == 0);
  std::size_t lines = 0;
  for (char ch : ranking)
    if (ch == '\n') ++lines;
  CHECK(lines == 30);  // header plus one row per predictor
}

TEST_CASE("wrapper emits a parseable per-model report") {
  fs::path out = fresh_dir("wrapper_lr");
  // Global flags after the subcommand must fall through to the app.
  CHECK(run_cli({"wrapper", "--method", "fixed", "--k", "1", "--model", "LR", "--seed", "5",
                 "--n", "120", "--budget", "2", "--folds", "2", "--out", out.c_str()}) == 0);

  subsetforge::ProtocolReport report =
      subsetforge::protocol_report_from_json(slurp(out / "report_lr.json"));
  CHECK(report.kind == subsetforge::LearnerKind::LR);
  CHECK(report.method.name() == "fixed");
  CHECK(report.subset.names.size() == 1);
  CHECK(report.test_metrics.auc.has_value());

  // A lone report cannot fill the six-model table.
  fs::path table_out = fresh_dir("wrapper_lr_table");
  fs::path json_path = out / "report_lr.json";
  CHECK(run_cli({"--out", table_out.c_str(), "report", json_path.c_str()}) == 2);
}

TEST_CASE("the installed binary speaks csv on stdout") {
  fs::path dir = fresh_dir("spawned");
  fs::path out = dir / "schema.csv";

  CHECK(spawn("--help > /dev/null 2>&1") == 0);
  CHECK(spawn("2> /dev/null") == 1);  // no subcommand
  CHECK(spawn("schema > \"" + out.string() + "\" 2> /dev/null") == 0);

  std::string schema = slurp(out);
  CHECK(schema.rfind("name,", 0) == 0);
  CHECK(schema.find("Operating Status") != std::string::npos);
  std::size_t lines = 0;
  for (char ch : schema)
    if (ch == '\n') ++lines;
  CHECK(lines == 31);  // header, 29 predictors, target
}
