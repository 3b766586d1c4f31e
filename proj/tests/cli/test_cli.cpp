#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <vector>

#include "run.hpp"

using nlohmann::json;

namespace {

const std::string kCli = FREECONV_CLI;

cli::Result cli_run(const std::string& args) { return cli::run(kCli + " " + args); }

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_CASE("help documents every subcommand and flag") {
  const auto top = cli_run("--help");
  CHECK(top.exit_code == 0);
  for (const char* sub : {"convolve", "density", "bulk", "edges", "atoms", "stability-map", "continuity", "rmt"}) {
    CHECK(top.out.find(sub) != std::string::npos);
  }
  const auto rmt = cli_run("rmt local-law --help");
  CHECK(rmt.exit_code == 0);
  for (const char* flag : {"--n", "--group", "--a", "--b", "--seed", "--trials", "--no-center", "--rotate-a",
                           "--threads", "--eigenvalues", "--E", "--eta", "--format", "--output"}) {
    CHECK(rmt.out.find(flag) != std::string::npos);
  }
  const auto conv = cli_run("convolve --help");
  for (const char* flag : {"--m1", "--m2", "--z", "--eta-eval", "--max-iter", "--newton-tol"}) {
    CHECK(conv.out.find(flag) != std::string::npos);
  }
}

TEST_CASE("convolve examples") {
  auto r = cli_run("convolve --m1 bernoulli:0.5 --m2 bernoulli:0.5 --z 1+1e-9i");
  REQUIRE(r.exit_code == 0);
  auto j = json::parse(r.out);
  CHECK(std::abs(j["m"][0].get<double>()) < 1e-6);
  CHECK(std::abs(j["m"][1].get<double>() - 1.0) < 1e-6);
  CHECK(std::abs(j["density"].get<double>() - 1.0 / M_PI) < 1e-6);

  r = cli_run("convolve --m1 semicircle:0,1 --m2 semicircle:0,1 --z 0+1i");
  REQUIRE(r.exit_code == 0);
  j = json::parse(r.out);
  CHECK(std::abs(j["m"][0].get<double>()) < 1e-12);
  CHECK(std::abs(j["m"][1].get<double>() - 0.5) < 1e-12);

  r = cli_run("convolve --m1 pointmass:0.5 --m2 bernoulli:0.3 --z 0+1i");
  REQUIRE(r.exit_code == 0);
  j = json::parse(r.out);
  CHECK(std::abs(j["omega1"][0].get<double>() + 0.5) < 1e-12);
  CHECK(std::abs(j["omega1"][1].get<double>() - 1.0) < 1e-12);
  for (const char* key : {"omega2", "gamma", "residual"}) CHECK(j.contains(key));
}

TEST_CASE("edges example") {
  const auto r = cli_run("edges --xi 0.25 --zeta 0.25 --theta 1");
  CHECK(r.exit_code == 0);
  CHECK(r.out == "0.133975 1 1 1.866025\n");
}

TEST_CASE("density example: positive inside (0, 2)") {
  const auto r = cli_run("density --m1 bernoulli:0.5 --m2 bernoulli:0.5 --range 0,2 --points 201");
  REQUIRE(r.exit_code == 0);
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 202);
  CHECK(rows[0] == std::vector<std::string>{"x", "f", "eta", "residual", "status"});
  for (std::size_t i = 2; i + 1 < rows.size(); ++i) {
    const double x = std::stod(rows[i][0]);
    const double f = std::stod(rows[i][1]);
    CHECK(f > 0.0);
    CHECK(std::abs(f - 1.0 / (M_PI * std::sqrt(x * (2 - x)))) < 1e-5);
  }
}

TEST_CASE("bulk, atoms and json output") {
  auto r = cli_run("bulk --m1 bernoulli:0.5 --m2 bernoulli:0.5 --range -0.5,2.5 --points 301 --format json");
  REQUIRE(r.exit_code == 0);
  auto j = json::parse(r.out);
  REQUIRE(j["rows"].size() == 1);
  CHECK(std::abs(j["rows"][0][0].get<double>()) < 0.01);
  CHECK(std::abs(j["rows"][0][1].get<double>() - 2.0) < 0.01);

  r = cli_run("atoms --m1 bernoulli:0.3 --m2 bernoulli:0.3");
  REQUIRE(r.exit_code == 0);
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 2);
  CHECK(std::stod(rows[1][0]) == 0.0);
  CHECK(std::abs(std::stod(rows[1][1]) - 0.4) < 1e-15);
}

TEST_CASE("exit codes") {
  CHECK(cli_run("").exit_code == 1);
  CHECK(cli_run("rmt").exit_code == 1);
  CHECK(cli_run("convolve --bogus").exit_code == 1);
  CHECK(cli_run("convolve --m1 cauchy:0,1").exit_code == 1);
  CHECK(cli_run("convolve --z 1-1i").exit_code == 1);
  CHECK(cli_run("density --range 2,1").exit_code == 1);
  CHECK(cli_run("convolve --m1 atomic:@/nonexistent/file.json").exit_code == 1);
  CHECK(cli_run("convolve --m1 bernoulli:0.5 --m2 bernoulli:0.5 --z 1+1e-9i --max-iter 1").exit_code == 2);
}

TEST_CASE("output file and dump-config replay") {
  const auto dir = std::filesystem::temp_directory_path() / "freeconv_test_cli";
  std::filesystem::create_directories(dir);
  const auto out = (dir / "atoms.csv").string();
  REQUIRE(cli_run("atoms --m1 bernoulli:0.3 --m2 bernoulli:0.3 -o " + out).exit_code == 0);
  std::ifstream in(out);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == cli_run("atoms --m1 bernoulli:0.3 --m2 bernoulli:0.3").out);

  const std::string args = "rmt counting --n 60 --trials 3 --seed 5 --E1 0.2 --E2 0.9";
  const auto cfg = (dir / "run.toml").string();
  const auto dumped = cli_run(args + " --dump-config");
  REQUIRE(dumped.exit_code == 0);
  CHECK(dumped.out.rfind("[rmt.counting]\n", 0) == 0);
  std::ofstream(cfg) << dumped.out;
  const auto direct = cli_run(args);
  const auto replay = cli_run("--config " + cfg);
  CHECK(direct.exit_code == 0);
  CHECK(replay.exit_code == 0);
  CHECK(direct.out == replay.out);
  std::filesystem::remove_all(dir);
}

TEST_CASE("rmt subcommands are byte-identical across thread counts") {
  const std::vector<std::string> cmds{
      "rmt local-law --n 500 --trials 20 --seed 7",
      "rmt counting --n 120 --trials 6 --seed 7",
      "rmt concentration --n 120 --trials 6 --seed 7 --q a --E 0.5,1 --eta 0.1",
      "rmt subordination --n 120 --trials 6 --seed 7 --E 1 --eta 0.1,0.2",
  };
  for (const auto& c : cmds) {
    const auto one = cli::run("FREECONV_THREADS=1 " + kCli + " " + c + " --threads 4");
    const auto four = cli_run(c + " --threads 4");
    const auto again = cli_run(c + " --threads 3");
    REQUIRE(one.exit_code == 0);
    CHECK(!one.out.empty());
    CHECK(one.out == four.out);
    CHECK(one.out == again.out);
  }
}
