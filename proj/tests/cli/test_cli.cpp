#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "gtd/constructions.hpp"
#include "gtd/decompositions.hpp"
#include "gtd/tensor.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunResult run_cli(const std::string& args) {
  static int counter = 0;
  const fs::path dir = fs::temp_directory_path() / "gtd_cli_tests";
  fs::create_directories(dir);
  const fs::path out_path = dir / ("out" + std::to_string(counter) + ".txt");
  const fs::path err_path = dir / ("err" + std::to_string(counter) + ".txt");
  ++counter;
  const std::string command = std::string(GTD_CLI_PATH) + " " + args + " > " +
                              out_path.string() + " 2> " + err_path.string();
  const int status = std::system(command.c_str());
  RunResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.out = slurp(out_path);
  result.err = slurp(err_path);
  return result;
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "gtd_cli_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("verify rejects unknown claim ids with a usage error") {
  const RunResult r = run_cli("verify --claims no-such-claim");
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("unknown claim") != std::string::npos);
}

TEST_CASE("verify emits one JSON object per claim") {
  const RunResult r =
      run_cli("verify --claims piecewise-affine-lemma,rank-combination "
              "--seed 42");
  CHECK(r.exit_code == 0);
  std::istringstream lines(r.out);
  std::string line;
  int objects = 0;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    CHECK(j.contains("claim"));
    CHECK(j.contains("pass"));
    CHECK(j.contains("witnesses"));
    CHECK(j.contains("tolerance"));
    CHECK(j.contains("seed"));
    CHECK(j.contains("millis"));
    CHECK(j["pass"].get<bool>());
    ++objects;
  }
  CHECK(objects == 2);
}

TEST_CASE("rank-hist validates trial counts") {
  const RunResult r = run_cli("rank-hist --trials 0");
  CHECK(r.exit_code == 2);
}

TEST_CASE("rank-hist writes config-stamped CSVs with stable bytes") {
  const fs::path dir = scratch_dir("hist");
  const std::string args =
      "rank-hist --levels 2 --m 2 --ranks 2 --trials 50 --seed 42 "
      "--operator product --out " + dir.string();
  const RunResult first = run_cli(args);
  CHECK(first.exit_code == 0);
  CHECK(first.out.find("median_rank=4") != std::string::npos);

  const fs::path csv = dir / "rank_hist_L2_M2_r2.csv";
  REQUIRE(fs::exists(csv));
  const std::string bytes = slurp(csv);
  CHECK(bytes.find("# operator=product\n") != std::string::npos);
  CHECK(bytes.find("rank,count\n") != std::string::npos);
  CHECK(bytes.find("4,50") != std::string::npos);

  const RunResult second = run_cli(args);
  CHECK(second.exit_code == 0);
  CHECK(slurp(csv) == bytes);
}

TEST_CASE("grid reports malformed JSON with a position") {
  const fs::path dir = scratch_dir("badjson");
  const fs::path config = dir / "bad.json";
  std::ofstream(config) << "{ \"n\": 4, ";
  const RunResult r = run_cli("grid --config " + config.string() + " --out " +
                              (dir / "out.gten").string());
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("malformed config JSON") != std::string::npos);
  // The parse error carries the line/column of the failure.
  CHECK(r.err.find("parse error at line") != std::string::npos);
}

TEST_CASE("grid reproduces the indicator fixture byte for byte") {
  const fs::path dir = scratch_dir("indicator");

  // Fixture: the relu-max indicator construction at (1,2), m=2, n=2.
  const gtd::IndicatorCp ind = gtd::indicator_cp(
      gtd::MultiIndex({1, 2}), 2, 2, gtd::Matrix::identity(2));
  const gtd::Tensor fixture = gtd::generalized_cp(
      ind.params, gtd::Matrix::identity(2), gtd::PoolOperator::relu_max());
  const fs::path fixture_path = dir / "fixture.gten";
  gtd::write_gten_file(fixture, fixture_path);

  json config;
  config["n"] = 2;
  config["m"] = 2;
  config["operator"] = "relu-max";
  config["mode"] = "cp";
  config["f"] = "identity";
  config["weights"]["conv"] = ind.params.conv;
  config["weights"]["output"] = ind.params.output;
  const fs::path config_path = dir / "indicator.json";
  std::ofstream(config_path) << config.dump(2);

  const fs::path out_path = dir / "out.gten";
  const RunResult r = run_cli("grid --config " + config_path.string() +
                              " --out " + out_path.string() + " --matricize " +
                              (dir / "out.csv").string());
  CHECK(r.exit_code == 0);
  CHECK(slurp(out_path) == slurp(fixture_path));
  const std::string csv = slurp(dir / "out.csv");
  CHECK(csv == "0,1\n0,0\n");
}

TEST_CASE("grid evaluates the deep trivial-weight config to a constant") {
  const fs::path dir = scratch_dir("trivial");
  const gtd::TrivialWeights t = gtd::trivial_ht_weights(
      2, {2, 2}, 4, gtd::Matrix::identity(2), gtd::TrivialVariant::unshared,
      42);
  const gtd::Tensor fixture = gtd::generalized_ht(
      t.deep, gtd::Matrix::identity(2), gtd::PoolOperator::relu_max());
  const fs::path fixture_path = dir / "fixture.gten";
  gtd::write_gten_file(fixture, fixture_path);

  json config;
  config["n"] = 4;
  config["m"] = 2;
  config["operator"] = "relu-max";
  config["mode"] = "ht";
  config["widths"] = t.deep.widths;
  config["weights"]["level0"] = t.deep.level0;
  config["weights"]["levels"] = t.deep.levels;
  config["weights"]["output"] = t.deep.output;
  const fs::path config_path = dir / "trivial.json";
  std::ofstream(config_path) << config.dump(2);

  const fs::path out_path = dir / "out.gten";
  const RunResult r = run_cli("grid --config " + config_path.string() +
                              " --out " + out_path.string());
  CHECK(r.exit_code == 0);
  CHECK(slurp(out_path) == slurp(fixture_path));
  const gtd::Tensor loaded = gtd::read_gten_file(out_path);
  for (std::size_t i = 0; i < loaded.size(); ++i) CHECK(loaded[i] == 4.0);
}

TEST_CASE("grid accepts network architecture configs") {
  const fs::path dir = scratch_dir("network");
  json config;
  config["n"] = 2;
  config["m"] = 2;
  config["operator"] = "relu-max";
  config["architecture"] = "shallow";
  config["f"] = "identity";
  config["weights"]["conv"] = {{{1.0, 1.0}, {1.0, 1.0}},
                               {{0.0, 1.0}, {1.0, 0.0}}};
  config["weights"]["output"] = {1.0, -1.0};
  const fs::path config_path = dir / "net.json";
  std::ofstream(config_path) << config.dump(2);
  const fs::path out_path = dir / "out.gten";
  const RunResult r = run_cli("grid --config " + config_path.string() +
                              " --out " + out_path.string());
  CHECK(r.exit_code == 0);
  const gtd::Tensor loaded = gtd::read_gten_file(out_path);
  // The indicator weights again: a single one at (1, 2).
  CHECK(loaded.data()[0] == 0.0);
  CHECK(loaded.data()[1] == 1.0);
  CHECK(loaded.data()[2] == 0.0);
  CHECK(loaded.data()[3] == 0.0);
}

TEST_CASE("interp solves the worked scalar example") {
  const fs::path dir = scratch_dir("interp");
  const fs::path points = dir / "points.csv";
  std::ofstream(points) << "x,target\n1,5\n2,7\n";
  const fs::path weights = dir / "weights.csv";
  const fs::path residuals = dir / "residuals.csv";
  const RunResult r = run_cli("interp --points " + points.string() +
                              " --out " + weights.string() + " --residuals " +
                              residuals.string() + " --seed 42");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("max_relative_residual=") != std::string::npos);
  const std::string w = slurp(weights);
  CHECK(w.find("w1,b,a\n") != std::string::npos);
  CHECK(w.find("1,0,5\n") != std::string::npos);
  CHECK(w.find("1,-1,-3\n") != std::string::npos);
  CHECK(slurp(residuals).find("point,target,value,relative_residual\n") !=
        std::string::npos);
}

TEST_CASE("grid warns when the window leaves the non-universality regime") {
  const fs::path dir = scratch_dir("wxh_warn");
  json config;
  config["n"] = 4;
  config["m"] = 2;
  config["architecture"] = "shallow-wxh";
  config["k"] = 2;  // bound is N/2 + 1 - log_M N = 1 at n=4, m=2
  config["f"] = "identity";
  json zero_mat = {{0.0, 0.0}, {0.0, 0.0}};
  config["weights"]["conv"] = {{zero_mat, zero_mat, zero_mat, zero_mat}};
  config["weights"]["output"] = {1.0};
  const fs::path config_path = dir / "wxh.json";
  std::ofstream(config_path) << config.dump(2);
  const RunResult r = run_cli("grid --config " + config_path.string() +
                              " --out " + (dir / "out.gten").string());
  CHECK(r.exit_code == 0);
  CHECK(r.err.find("warning:") != std::string::npos);
  CHECK(r.err.find("regime") != std::string::npos);
}

TEST_CASE("verify output is independent of --jobs") {
  const fs::path dir = scratch_dir("jobs");
  const std::string claims = "rank-combination,approximation-gap,fc-universal";
  const RunResult a = run_cli("verify --claims " + claims +
                              " --seed 7 --out " + (dir / "a.json").string());
  const RunResult b = run_cli("verify --claims " + claims +
                              " --seed 7 --jobs 3 --out " +
                              (dir / "b.json").string());
  CHECK(a.exit_code == 0);
  CHECK(b.exit_code == 0);
  CHECK(slurp(dir / "a.json") == slurp(dir / "b.json"));
}

TEST_CASE("verify report artifact is byte-identical across runs") {
  const fs::path dir = scratch_dir("determinism");
  const fs::path report1 = dir / "r1.json";
  const fs::path report2 = dir / "r2.json";
  const std::string claims =
      "nondegenerate-relu,relu-max-universal,approximation-gap";
  const RunResult a = run_cli("verify --claims " + claims +
                              " --seed 42 --out " + report1.string());
  const RunResult b = run_cli("verify --claims " + claims +
                              " --seed 42 --out " + report2.string());
  CHECK(a.exit_code == 0);
  CHECK(b.exit_code == 0);
  const std::string bytes = slurp(report1);
  CHECK(!bytes.empty());
  CHECK(bytes == slurp(report2));
  CHECK(bytes.find("millis") == std::string::npos);
}
