#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code = -1;
  std::string out;
};

CliRun cli(const std::string& args) {
  std::string cmd = std::string(JOMATCH_CLI_PATH) + " " + args + " 2>/dev/null";
  CliRun r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  size_t got;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
  int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() /
          ("jomatch_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }
  std::string d() const { return dir.string(); }
  fs::path dir;
};

TEST_F(CliTest, GenThenSolveRecoversCleanInstance) {
  const std::string inst = (dir / "inst.json").string();
  CliRun g = cli("--seed 3 gen --n 5 --d 3 --p-true 1.0 --out " + inst);
  ASSERT_EQ(g.code, 0);
  EXPECT_NE(g.out.find("seed=3"), std::string::npos);
  ASSERT_TRUE(fs::exists(inst));

  CliRun s = cli("--format json solve --input " + inst + " --method basic --probe");
  ASSERT_EQ(s.code, 0);
  auto j = nlohmann::json::parse(s.out.substr(s.out.find('\n') + 1));
  EXPECT_EQ(j["status"], "optimal");
  EXPECT_TRUE(j["recovered"].get<bool>());
  EXPECT_TRUE(j["unique"].get<bool>());
  EXPECT_DOUBLE_EQ(j["objective"].get<double>(), -10.0 * 3);
}

TEST_F(CliTest, GenToStdoutIsDeterministic) {
  CliRun a = cli("--seed 9 gen --n 4 --d 2 --p-true 0.5 --out -");
  CliRun b = cli("--seed 9 gen --n 4 --d 2 --p-true 0.5 --out -");
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  CliRun c = cli("--seed 10 gen --n 4 --d 2 --p-true 0.5 --out -");
  EXPECT_NE(a.out, c.out);
}

TEST_F(CliTest, SweepIsReproducibleAndCleanCellIsPerfect) {
  const std::string args = "sweep --n 5 --d 3 --p-true 0.5,1.0 --seeds 3 --methods basic,double";
  CliRun a = cli("--out-dir " + d() + "/a --threads 2 " + args);
  CliRun b = cli("--out-dir " + d() + "/b --threads 1 " + args);
  ASSERT_EQ(a.code, 0);
  ASSERT_EQ(b.code, 0);
  const std::string ra = slurp(dir / "a" / "sweep_results.csv");
  ASSERT_FALSE(ra.empty());
  EXPECT_EQ(ra, slurp(dir / "b" / "sweep_results.csv"));
  EXPECT_EQ(slurp(dir / "a" / "sweep_summary.csv"), slurp(dir / "b" / "sweep_summary.csv"));
  EXPECT_TRUE(fs::exists(dir / "a" / "sweep_chart.svg"));

  std::stringstream ss(slurp(dir / "a" / "sweep_summary.csv"));
  std::string line;
  std::getline(ss, line);
  EXPECT_EQ(line, "n,d,p_obs,p_true,method,trials,recovery_rate,tightness_rate,failures");
  int clean = 0;
  while (std::getline(ss, line))
    if (line.find(",1.0000,basic,") != std::string::npos || line.find(",1.0000,double,") != std::string::npos) {
      EXPECT_NE(line.find(",3,1.0000,1.0000,0"), std::string::npos) << line;
      ++clean;
    }
  EXPECT_EQ(clean, 2);
}

TEST_F(CliTest, SweepGridSyntax) {
  CliRun r = cli("--out-dir " + d() + " sweep --n 4 --d 2 --p-true 0.6:0.2:1.0 --seeds 1 --methods basic");
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find(",0.6000,basic,"), std::string::npos);
  EXPECT_NE(r.out.find(",0.8000,basic,"), std::string::npos);
  EXPECT_NE(r.out.find(",1.0000,basic,"), std::string::npos);
  EXPECT_NE(cli("--out-dir " + d() + " sweep --p-true 0.5:0:1 --seeds 1").code, 0);
}

TEST_F(CliTest, SweepRecordsPerRowFailures) {
  CliRun r = cli("--out-dir " + d() + " sweep --n 4 --d 2 --p-true 1.0 --seeds 1 --methods basic,nosuch");
  ASSERT_EQ(r.code, 0);
  const std::string csv = slurp(dir / "sweep_results.csv");
  EXPECT_NE(csv.find("nosuch"), std::string::npos);
  EXPECT_NE(r.out.find(",basic,1,1.0000,1.0000,0"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find(",nosuch,0,0.0000,0.0000,1"), std::string::npos) << r.out;
}

TEST_F(CliTest, VerifyReportsDimensionAndFacets) {
  CliRun r = cli("verify --n 3 --d 2 --family consistency");
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("vertices,87"), std::string::npos);
  EXPECT_NE(r.out.find("dimension,12"), std::string::npos);
  EXPECT_NE(r.out.find("inequalities,54\nvalid,54\nfacets,54"), std::string::npos) << r.out;
}

TEST_F(CliTest, CertifyCleanInstance) {
  CliRun r = cli("--format json certify --n 6 --d 2 --p-true 1.0 --solve");
  ASSERT_EQ(r.code, 0);
  auto j = nlohmann::json::parse(r.out.substr(r.out.find('\n') + 1));
  EXPECT_TRUE(j["all_strict"].get<bool>());
  EXPECT_TRUE(j["certificate"]["verified"].get<bool>());
  EXPECT_TRUE(j["basic_lp"]["recovered"].get<bool>());
}

TEST_F(CliTest, OracleCleanInstance) {
  CliRun r = cli("--format json oracle --n 3 --d 2 --p-true 1.0 --compare");
  ASSERT_EQ(r.code, 0);
  auto j = nlohmann::json::parse(r.out.substr(r.out.find('\n') + 1));
  EXPECT_DOUBLE_EQ(j["optimum"].get<double>(), -6.0);
  EXPECT_DOUBLE_EQ(j["frobenius_optimum"].get<double>(), 0.0);
  EXPECT_TRUE(j["unique"].get<bool>());
  EXPECT_TRUE(j["ground_truth_optimal"].get<bool>());
  EXPECT_DOUBLE_EQ(j["basic_lp_objective"].get<double>(), -6.0);
}

TEST_F(CliTest, ThresholdWritesCsv) {
  CliRun r = cli("--out-dir " + d() + " threshold --d-list 2 --grid-step 0.02 --p-step 0.001");
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(slurp(dir / "threshold.csv").find("d,p_star,alpha,beta\n2,"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "threshold.svg"));
}

TEST_F(CliTest, ExportOnlyBackendWritesLpFile) {
  const std::string lp = (dir / "m.lp").string();
  CliRun r = cli("solve --n 3 --d 2 --backend export-only --export " + lp);
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(fs::exists(lp));
  EXPECT_NE(r.out.find("model written to"), std::string::npos);
}

TEST_F(CliTest, MalformedInputFailsWithNonZeroExit) {
  const fs::path bad = dir / "bad.json";
  std::ofstream(bad) << "{\"n\": 3, \"sizes\": [2, 2]";
  EXPECT_EQ(cli("solve --input " + bad.string()).code, 1);
  EXPECT_EQ(cli("solve --input " + (dir / "missing.json").string()).code, 1);
  EXPECT_NE(cli("solve --method nosuch").code, 0);
  EXPECT_NE(cli("frobnicate").code, 0);
  EXPECT_NE(cli("").code, 0);
}

}  // namespace
