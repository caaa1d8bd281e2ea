#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"

namespace {

namespace fs = std::filesystem;

std::string cli_path() {
  const char* p = std::getenv("HKREG_CLI");
  return p ? p : "";
}

struct RunResult {
  int exit_code;
  std::string out;
  std::string err;
};

RunResult run_cli(const std::string& args, const fs::path& dir) {
  const fs::path out = dir / "stdout.txt";
  const fs::path err = dir / "stderr.txt";
  const std::string cmd = cli_path() + " " + args + " >" + out.string() + " 2>" + err.string();
  const int status = std::system(cmd.c_str());
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  return {WEXITSTATUS(status), slurp(out), slurp(err)};
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("hkreg_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

std::string slurp_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("unknown config keys are rejected with exit 64") {
  REQUIRE(!cli_path().empty());
  const fs::path dir = fresh_dir("badkey");
  write_file(dir / "cfg.json", R"({"fit": {"sigma": 4.0, "bogus_knob": 1}})");
  const RunResult r = run_cli("fit --config " + (dir / "cfg.json").string() + " --out " +
                                  (dir / "out").string(),
                              dir);
  CHECK(r.exit_code == 64);
  CHECK(r.err.find("bogus_knob") != std::string::npos);
}

TEST_CASE("malformed json is rejected with exit 64") {
  const fs::path dir = fresh_dir("badjson");
  write_file(dir / "cfg.json", "{not json");
  const RunResult r = run_cli("fit --config " + (dir / "cfg.json").string(), dir);
  CHECK(r.exit_code == 64);
}

TEST_CASE("unknown theorem id exits 64") {
  const fs::path dir = fresh_dir("badthm");
  const RunResult r = run_cli("verify thm9 --out " + (dir / "out").string(), dir);
  CHECK(r.exit_code == 64);
}

TEST_CASE("sigma below the comparison gate exits 65") {
  const fs::path dir = fresh_dir("gate");
  // default target has M = 0.5, so sigma = 1 fails the strict gate
  write_file(dir / "cfg.json",
             R"({"verify": {"thm3": {"sigma_grid": [1.0, 2.0, 4.0, 8.0], "count": 100}}})");
  const RunResult r = run_cli("verify thm3 --config " + (dir / "cfg.json").string() + " --out " +
                                  (dir / "out").string(),
                              dir);
  CHECK(r.exit_code == 65);
}

TEST_CASE("rates with zero reps exits 64") {
  const fs::path dir = fresh_dir("reps");
  write_file(dir / "cfg.json", R"({"rates": {"reps": 0}})");
  const RunResult r = run_cli("rates --config " + (dir / "cfg.json").string(), dir);
  CHECK(r.exit_code == 64);
}

TEST_CASE("fit on clean zero data converges to zero and reruns byte-identically") {
  const fs::path dir = fresh_dir("fitzero");
  write_file(dir / "cfg.json", R"({
    "scenario": {
      "target": {"family": "constant", "value": 0.0},
      "marginal": {"family": "uniform_interval", "lo": 0.0, "hi": 1.0},
      "noise": {"family": "gaussian", "sd": 0.0, "epsilon": 1.0},
      "kernel": {"family": "gaussian", "bandwidth": 0.25},
      "probe_points": 64
    },
    "fit": {"sigma": 2.0, "lambda": 0.01, "n": 32}
  })");
  const std::string args = "fit --config " + (dir / "cfg.json").string() + " --seed 5 --out ";
  const RunResult r1 = run_cli(args + (dir / "out1").string(), dir);
  CHECK(r1.exit_code == 0);
  CHECK(r1.out.find("fit_5.json") != std::string::npos);

  const nlohmann::json model = nlohmann::json::parse(slurp_file(dir / "out1" / "fit_5.json"));
  CHECK(model["converged"].get<bool>());
  for (const auto& c : model["coefficients"]) CHECK(c.get<double>() == 0.0);

  const RunResult r2 = run_cli(args + (dir / "out2").string(), dir);
  CHECK(r2.exit_code == 0);
  CHECK(slurp_file(dir / "out1" / "fit_5.json") == slurp_file(dir / "out2" / "fit_5.json"));
  CHECK(slurp_file(dir / "out1" / "fit_5_predictions.csv") ==
        slurp_file(dir / "out2" / "fit_5_predictions.csv"));
}

TEST_CASE("verify outputs are identical across jobs settings") {
  const fs::path dir = fresh_dir("jobs");
  write_file(dir / "cfg.json",
             R"({"verify": {"thm3": {"sigma_grid": [4.0, 8.0], "count": 100}},
                 "quadrature": {"nodes": 65, "inner_tolerance": 1e-9}})");
  const std::string base = "verify thm3 --config " + (dir / "cfg.json").string() + " --seed 9";
  const RunResult r1 = run_cli(base + " --jobs 1 --out " + (dir / "j1").string(), dir);
  const RunResult r8 = run_cli(base + " --jobs 8 --out " + (dir / "j8").string(), dir);
  CHECK(r1.exit_code == 0);
  CHECK(r8.exit_code == 0);
  CHECK(slurp_file(dir / "j1" / "thm3_9.json") == slurp_file(dir / "j8" / "thm3_9.json"));
  CHECK(slurp_file(dir / "j1" / "thm3_9.csv") == slurp_file(dir / "j8" / "thm3_9.csv"));
}

TEST_CASE("non-convergence exits 2") {
  const fs::path dir = fresh_dir("noconv");
  write_file(dir / "cfg.json", R"({
    "fit": {"sigma": 0.5, "lambda": 0.001, "n": 80,
            "tol_gradient": 1e-300, "max_iterations": 2}
  })");
  const RunResult r = run_cli("fit --config " + (dir / "cfg.json").string() + " --seed 4 --out " +
                                  (dir / "out").string(),
                              dir);
  CHECK(r.exit_code == 2);
  const nlohmann::json model = nlohmann::json::parse(slurp_file(dir / "out" / "fit_4.json"));
  CHECK_FALSE(model["converged"].get<bool>());
}

TEST_CASE("compare emits matched-dataset results") {
  const fs::path dir = fresh_dir("compare");
  write_file(dir / "cfg.json", R"({"compare": {"sigma": 4.0, "lambda": 0.01, "n": 60, "reps": 4}})");
  const RunResult r = run_cli("compare --config " + (dir / "cfg.json").string() + " --seed 3 --out " +
                                  (dir / "out").string(),
                              dir);
  CHECK(r.exit_code == 0);
  const nlohmann::json j = nlohmann::json::parse(slurp_file(dir / "out" / "compare_3.json"));
  CHECK(j["huber_median_l2"].get<double>() > 0.0);
  CHECK(j["ridge_median_l2"].get<double>() > 0.0);
}

TEST_CASE("stdout carries only artifact paths") {
  const fs::path dir = fresh_dir("paths");
  const RunResult r = run_cli("verify prop1 --seed 2 --out " + (dir / "out").string(), dir);
  CHECK(r.exit_code == 0);
  std::istringstream lines(r.out);
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) {
    CHECK(fs::exists(line));
    ++count;
  }
  CHECK(count == 2);
}

}  // TEST_SUITE
