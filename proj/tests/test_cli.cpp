#include <doctest.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(SIMPLEXDIR_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("sdx_cli_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("simulate writes the dataset and is seed-deterministic") {
  TempDir tmp;
  const std::string a = (tmp.path / "a").string();
  const std::string b = (tmp.path / "b").string();
  REQUIRE(run("simulate --scenario svmc --n 200 --seed 7 --out " + a) == 0);
  REQUIRE(run("simulate --scenario svmc --n 200 --seed 7 --out " + b) == 0);
  const std::string da = slurp(tmp.path / "a" / "data.csv");
  CHECK(da == slurp(tmp.path / "b" / "data.csv"));
  // 200 rows + header, 4 columns
  int rows = -1;
  std::size_t pos = 0;
  while ((pos = da.find('\n', pos)) != std::string::npos) {
    ++rows;
    ++pos;
  }
  CHECK(rows == 200);
  CHECK(da.substr(0, da.find('\n')) == "x1,x2,x3,y");
  CHECK(slurp(tmp.path / "a" / "truth.json") == slurp(tmp.path / "b" / "truth.json"));
}

TEST_CASE("simulated mixture weights land near the design") {
  TempDir tmp;
  const std::string out = (tmp.path / "ivm").string();
  REQUIRE(run("simulate --scenario ivm --n 4000 --seed 9 --out " + out) == 0);
  const auto truth = nlohmann::json::parse(slurp(tmp.path / "ivm" / "truth.json"));
  int first = 0;
  for (int z : truth["zeta"].get<std::vector<int>>()) first += (z == 0);
  CHECK(std::abs(first / 4000.0 - 0.3) < 0.05);
}

TEST_CASE("extract skips degenerate rows and reports the dedup count") {
  TempDir tmp;
  const fs::path pairs = tmp.path / "pairs.csv";
  {
    std::ofstream out(pairs);
    out << "x1a,x2a,x3a,x1b,x2b,x3b\n";
    out << "0.3,0.4,0.3,0.32,0.38,0.3\n";
    out << "0.3,0.4,0.3,0.3,0.4,0.3\n";    // identity pair: skipped
    out << "0.3,0.4,0.3,0.31,0.39,0.3\n";  // duplicate location: deduped
    out << "0.2,0.2,0.6,0.25,0.2,0.55\n";
  }
  const std::string out_dir = (tmp.path / "ext").string();
  REQUIRE(run("extract --pairs " + pairs.string() + " --tol 0 --out " + out_dir) == 0);
  const auto report = nlohmann::json::parse(slurp(tmp.path / "ext" / "extract_report.json"));
  CHECK(report["pairs"] == 4);
  CHECK(report["skipped_degenerate"] == 1);
  CHECK(report["removed_duplicates"] == 1);
  CHECK(report["kept"] == 2);
}

TEST_CASE("extract round trip is bit-exact on its own output") {
  TempDir tmp;
  const fs::path pairs = tmp.path / "pairs.csv";
  std::ofstream(pairs) << "x1a,x2a,x3a,x1b,x2b,x3b\n0.3,0.4,0.3,0.32,0.38,0.3\n";
  const std::string d1 = (tmp.path / "e1").string();
  const std::string d2 = (tmp.path / "e2").string();
  REQUIRE(run("extract --pairs " + pairs.string() + " --out " + d1) == 0);
  REQUIRE(run("extract --pairs " + pairs.string() + " --out " + d2) == 0);
  CHECK(slurp(tmp.path / "e1" / "directions.csv") == slurp(tmp.path / "e2" / "directions.csv"));
}

TEST_CASE("fit smoke run completes and re-runs identically") {
  TempDir tmp;
  const std::string data_dir = (tmp.path / "sim").string();
  REQUIRE(run("simulate --scenario iv --n 40 --seed 3 --out " + data_dir) == 0);
  const std::string fit1 = (tmp.path / "f1").string();
  const std::string fit2 = (tmp.path / "f2").string();
  const std::string args = "fit --data " + data_dir + "/data.csv --model iv --chains 2 "
                           "--iters 600 --warmup 300 --thin 2 --seed 5 --out ";
  const int rc1 = run(args + fit1);
  const int rc2 = run(args + fit2);
  CHECK((rc1 == 0 || rc1 == 2));
  CHECK(rc1 == rc2);
  CHECK(slurp(tmp.path / "f1" / "chains.jsonl") == slurp(tmp.path / "f2" / "chains.jsonl"));
  CHECK(fs::exists(tmp.path / "f1" / "summary.json"));
}

TEST_CASE("em-init then fit consumes the starting state") {
  TempDir tmp;
  const std::string data_dir = (tmp.path / "sim").string();
  REQUIRE(run("simulate --scenario ivm --n 120 --seed 8 --out " + data_dir) == 0);
  const std::string init = (tmp.path / "init.json").string();
  REQUIRE(run("em-init --data " + data_dir + "/data.csv --model ivm --seed 2 --out " + init) == 0);
  const auto j = nlohmann::json::parse(slurp(init));
  CHECK(j.contains("state"));
  CHECK(j["state"].contains("lambda"));
  const int rc = run("fit --data " + data_dir + "/data.csv --model ivm --chains 2 --iters 500 "
                     "--warmup 250 --thin 2 --seed 4 --init " + init + " --out " +
                     (tmp.path / "fit").string());
  CHECK((rc == 0 || rc == 2));
}

TEST_CASE("input errors exit with code 1") {
  TempDir tmp;
  CHECK(run("fit --data /nonexistent.csv --model svm --out " + (tmp.path / "x").string()) != 0);
  const fs::path bad = tmp.path / "bad.csv";
  std::ofstream(bad) << "x1,x2,x3,y\n0.5,0.6,0.2,1.0\n";  // does not sum to 1
  CHECK(run("fit --data " + bad.string() + " --model svm --out " + (tmp.path / "y").string()) ==
        1);
  // select demands at least two models
  const std::string data_dir = (tmp.path / "sim").string();
  REQUIRE(run("simulate --scenario iv --n 30 --seed 1 --out " + data_dir) == 0);
  CHECK(run("select --data " + data_dir + "/data.csv --models svm --out " +
            (tmp.path / "sel").string()) == 1);
}

TEST_CASE("summarize reads saved chains") {
  TempDir tmp;
  const std::string data_dir = (tmp.path / "sim").string();
  REQUIRE(run("simulate --scenario iv --n 30 --seed 2 --out " + data_dir) == 0);
  const std::string fit_dir = (tmp.path / "fit").string();
  const int rc = run("fit --data " + data_dir + "/data.csv --model iv --chains 2 --iters 400 "
                     "--warmup 200 --thin 2 --seed 6 --out " + fit_dir);
  REQUIRE((rc == 0 || rc == 2));
  const std::string out = (tmp.path / "sum.json").string();
  REQUIRE(run("summarize --chains " + fit_dir + "/chains.jsonl --out " + out) == 0);
  const auto j = nlohmann::json::parse(slurp(out));
  CHECK(j["model"] == "iv");
  CHECK(j.contains("params"));
}

TEST_CASE("tiny fit with full default iterations stays fast") {
  TempDir tmp;
  const std::string data_dir = (tmp.path / "sim").string();
  REQUIRE(run("simulate --scenario svm --n 10 --seed 12 --out " + data_dir) == 0);
  const auto t0 = std::chrono::steady_clock::now();
  const int rc = run("fit --data " + data_dir + "/data.csv --model svm --chains 2 --seed 13 "
                     "--out " + (tmp.path / "fit").string());
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK((rc == 0 || rc == 2));
  CHECK(secs < 60.0);
}

TEST_CASE("predict scores a saved fit against withheld data") {
  TempDir tmp;
  const std::string a = (tmp.path / "train").string();
  const std::string b = (tmp.path / "test").string();
  REQUIRE(run("simulate --scenario svm --n 50 --seed 15 --out " + a) == 0);
  REQUIRE(run("simulate --scenario svm --n 10 --seed 16 --out " + b) == 0);
  const std::string fit_dir = (tmp.path / "fit").string();
  const int rc = run("fit --data " + a + "/data.csv --model svm --chains 2 --iters 1000 "
                     "--warmup 500 --thin 5 --seed 17 --out " + fit_dir);
  REQUIRE((rc == 0 || rc == 2));
  const std::string scores = (tmp.path / "scores.csv").string();
  REQUIRE(run("predict --chains " + fit_dir + "/chains.jsonl --train " + a + "/data.csv "
              "--test " + b + "/data.csv --pred-draws 20 --seed 18 --out " + scores) == 0);
  const std::string text = slurp(scores);
  CHECK(text.find("model,log_pp,se,n_test,seed") == 0);
  CHECK(text.find("svm,") != std::string::npos);
}
