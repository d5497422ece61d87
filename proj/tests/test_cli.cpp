#include <gtest/gtest.h>
#include <sys/wait.h>

#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

namespace fs = std::filesystem;

namespace {
int run(const std::string& args) {
  const std::string cmd = std::string(GSLAB_CLI) + " " + args + " >/dev/null 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

fs::path workdir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("gslab_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}
}  // namespace

TEST(Cli, HelpAndUsageErrors) {
  EXPECT_EQ(run("--help"), 0);
  EXPECT_EQ(run(""), 2);
  EXPECT_EQ(run("frobnicate"), 2);
  EXPECT_EQ(run("verify --id L9 --out " + workdir("bad").string()), 2);
  EXPECT_EQ(run("check-family --family spline --out " + workdir("bad2").string()), 2);
}

TEST(Cli, CheckFamilyWritesReport) {
  const auto d = workdir("check");
  ASSERT_EQ(run("check-family --nu 2 --seed 5 --out " + d.string()), 0);
  const auto j = nlohmann::json::parse(slurp(d / "check_family_nu2.json"));
  EXPECT_EQ(j["nu"], 2);
  EXPECT_EQ(j["seed"], 5);
  EXPECT_TRUE(j["passed"].get<bool>());
  const std::string csv = slurp(d / "summary.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "statement,family,nu,m,min_slack,ratio,passed");
  EXPECT_NE(csv.find("\"power:p=2,scale_base=2,n=1\""), std::string::npos);
}

TEST(Cli, FlagsOverrideConfig) {
  const auto d = workdir("precedence");
  {
    std::ofstream cfg(d / "run.cfg");
    cfg << "nu=3\nseed=9\nout=" << (d / "from_config").string() << "\n";
  }
  ASSERT_EQ(run("check-family --config " + (d / "run.cfg").string() + " --nu 1"), 0);
  const auto j = nlohmann::json::parse(slurp(d / "from_config" / "check_family_nu1.json"));
  EXPECT_EQ(j["seed"], 9);
}

TEST(Cli, ConjugateFromCsv) {
  const auto d = workdir("conj");
  {
    std::ofstream in(d / "g.csv");
    in << "x1,value\n";
    for (int i = 0; i <= 200; ++i) {
      const double y = -4.0 + 0.04 * i;
      in << y << ',' << 0.5 * y * y << '\n';
    }
  }
  ASSERT_EQ(run("conjugate --in " + (d / "g.csv").string() + " --dual x:-2,2,41 --out " + d.string()), 0);
  std::ifstream out(d / "conjugate.csv");
  std::string line;
  std::getline(out, line);
  EXPECT_EQ(line, "x1,value");
  double x = 0, v = 0;
  char comma = 0;
  while (out >> x >> comma >> v) EXPECT_NEAR(v, 0.5 * x * x, 1e-3);
  EXPECT_EQ(run("conjugate --in " + (d / "missing.csv").string() + " --out " + d.string()), 2);
}

TEST(Cli, VerificationFailureExitsOne) {
  // the TA identity on the coarse default 2-d grids misses the tolerance
  EXPECT_EQ(run("verify --id TA --u power4 --n 2 --out " + workdir("ta2").string()), 1);
}

TEST(Cli, PaleyWienerNeedsEnoughIndices) {
  const auto d = workdir("pw");
  ASSERT_EQ(run("build-family --family power:p=2,n=1,nu_max=3 --out " + d.string()), 0);
  EXPECT_EQ(run("paley-wiener --family table:dir=" + d.string() + " --out " + (d / "out").string()), 2);
}
