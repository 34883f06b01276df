#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include <json.hpp>

#include "jgreedy/cli.hpp"
#include "jgreedy/errors.hpp"

using namespace jgreedy;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("jgreedy-test-" + tag);
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

std::string first_line(const fs::path& p) {
  std::ifstream is(p);
  std::string line;
  std::getline(is, line);
  return line;
}

}  // namespace

TEST_CASE("configuration errors exit with code 2") {
  TempDir tmp("errors");
  const std::string out = (tmp.path / "o").string();
  const auto r = run_cli({"block-sum", "--p", "5", "--out", out});
  CHECK(r.code == cli::kConfigError);
  CHECK(r.err.find("configuration error") != std::string::npos);
  CHECK(run_cli({"norms", "--alpha", "-1.5", "--out", out}).code == cli::kConfigError);
  CHECK(run_cli({"norms", "--bogus", "--out", out}).code == cli::kConfigError);
  CHECK(run_cli({"norms", "--mode", "weird", "--out", out}).code == cli::kConfigError);
  CHECK(run_cli({}).code == cli::kConfigError);
  CHECK(run_cli({"norms", "--config", (tmp.path / "missing.json").string(), "--out", out}).code ==
        cli::kConfigError);

  std::ofstream(tmp.path / "file") << "x";
  CHECK(run_cli({"identity-check", "--out", (tmp.path / "file" / "sub").string()}).code ==
        cli::kConfigError);
}

TEST_CASE("CSV headers") {
  CHECK(cli::csv_header("norms") == "n,norm,norm_pow_p");
  CHECK(cli::csv_header("block-sum") == "N,norm");
  CHECK(cli::csv_header("average-block") ==
        "N,square_function,rademacher_mean,rademacher_stderr,sqrt_square_function,"
        "sqrt_rademacher_mean,sqrt_rademacher_stderr,samples");
  CHECK(cli::csv_header("near-one") == "n,d,min_ratio,max_ratio,one_minus_largest_root");
  CHECK(cli::csv_header("witness") == "N,block_norm,average_norm,average_stderr,sign_ratio");
  CHECK(cli::csv_header("darboux-check") == "n,max_scaled_error,max_abs_error");
  CHECK(cli::csv_header("identity-check") == "N,max_deviation");
}

TEST_CASE("every command writes its artifacts") {
  TempDir tmp("artifacts");
  const std::vector<std::vector<std::string>> runs = {
      {"norms", "--p", "3", "--n-min", "8", "--n-max", "64"},
      {"block-sum", "--p", "3", "--N-min", "4", "--N-max", "32"},
      {"average-block", "--p", "3", "--N-min", "4", "--N-max", "32", "--samples", "8"},
      {"near-one", "--n-max", "160"},
      {"witness", "--p", "2", "--N-min", "4", "--N-max", "32", "--samples", "8"},
      {"darboux-check", "--n-max", "64"},
      {"identity-check", "--trials", "100"},
  };
  for (auto args : runs) {
    const std::string cmd = args.front();
    const fs::path dir = tmp.path / cmd;
    args.push_back("--out");
    args.push_back(dir.string());
    const auto r = run_cli(args);
    INFO(cmd, " ", r.err);
    REQUIRE(r.code == cli::kOk);
    CHECK_FALSE(r.out.empty());
    CHECK(first_line(dir / (cmd + ".csv")) == cli::csv_header(cmd));
    const auto summary = nlohmann::json::parse(slurp(dir / (cmd + ".json")));
    CHECK(summary.at("command") == cmd);
    CHECK(summary.contains("result"));
    const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
    CHECK(manifest.at("tool_version") == cli::kToolVersion);
    CHECK(manifest.contains("timestamp"));
    if (cmd != "identity-check") {
      CHECK(fs::exists(dir / (cmd + ".dat")));
      CHECK(fs::exists(dir / (cmd + ".dat.fit")));
    }
  }
}

TEST_CASE("witness summary line at p = 2") {
  TempDir tmp("witness2");
  const auto r = run_cli({"witness", "--p", "2", "--N-min", "8", "--N-max", "64", "--samples", "8",
                          "--out", tmp.path.string()});
  REQUIRE(r.code == cli::kOk);
  CHECK(r.out.find("gap \xE2\x89\x88 0.000") != std::string::npos);
  CHECK(r.out.find("verdict=quasi-greedy") != std::string::npos);
}

TEST_CASE("plot data") {
  TempDir tmp("plot");
  SlopeFit fit;
  for (int i = 0; i < 7; ++i) {
    fit.xs.push_back(8.0 * (1 << i));
    fit.ys.push_back(0.3 * std::pow(fit.xs.back(), 0.83) * (1.0 + 0.01 * (i % 2)));
  }
  fit = fit_loglog(fit.xs, fit.ys);
  const fs::path p = tmp.path / "block.dat";
  cli::emit_plot_data(fit, p);
  const auto back = cli::read_plot_data(p);
  REQUIRE(back.size() == 7);
  for (std::size_t i = 0; i < 7; ++i) {
    CHECK(std::abs(back[i].first / fit.xs[i] - 1.0) < 1e-12);
    CHECK(std::abs(back[i].second / fit.ys[i] - 1.0) < 1e-12);
  }
  CHECK(fs::exists(tmp.path / "block.dat.fit"));

  const fs::path q = tmp.path / "empty.dat";
  CHECK_THROWS_AS(cli::emit_plot_data(SlopeFit{}, q), EvaluationError);
  CHECK_FALSE(fs::exists(q));
}

TEST_CASE("manifest reproduces a run and flags override it") {
  TempDir tmp("manifest");
  const fs::path a = tmp.path / "a";
  const fs::path b = tmp.path / "b";
  const fs::path c = tmp.path / "c";
  REQUIRE(run_cli({"block-sum", "--alpha", "0.5", "--beta", "0.1", "--p", "2.5", "--N-min", "4",
                   "--N-max", "32", "--out", a.string()})
              .code == cli::kOk);
  REQUIRE(run_cli({"block-sum", "--config", (a / "manifest.json").string(), "--out", b.string()}).code ==
          cli::kOk);
  CHECK(slurp(a / "block-sum.csv") == slurp(b / "block-sum.csv"));
  const auto ja = nlohmann::json::parse(slurp(a / "manifest.json"));
  const auto jb = nlohmann::json::parse(slurp(b / "manifest.json"));
  CHECK(ja.at("config") == jb.at("config"));

  REQUIRE(run_cli({"block-sum", "--config", (a / "manifest.json").string(), "--p", "2", "--out",
                   c.string()})
              .code == cli::kOk);
  const auto jc = nlohmann::json::parse(slurp(c / "manifest.json"));
  CHECK(jc.at("config").at("p") == 2.0);
  CHECK(jc.at("config").at("alpha") == 0.5);
}

TEST_CASE("output does not depend on the thread count") {
  TempDir tmp("threads");
  const fs::path a = tmp.path / "a";
  const fs::path b = tmp.path / "b";
  REQUIRE(run_cli({"average-block", "--p", "3", "--N-min", "4", "--N-max", "32", "--samples", "8",
                   "--seed", "3", "--threads", "1", "--out", a.string()})
              .code == cli::kOk);
  REQUIRE(run_cli({"average-block", "--p", "3", "--N-min", "4", "--N-max", "32", "--samples", "8",
                   "--seed", "3", "--threads", "3", "--out", b.string()})
              .code == cli::kOk);
  CHECK(slurp(a / "average-block.csv") == slurp(b / "average-block.csv"));
}
