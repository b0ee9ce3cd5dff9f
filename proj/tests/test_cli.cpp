#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string("\"") + VOLSPEC_CLI_PATH + "\" " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[512];
  while (std::fgets(buf, sizeof buf, p)) r.out += buf;
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("volspec_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

}  // namespace

TEST_F(Cli, BasisCheckWritesAllKinds) {
  const auto r = run("basis-check --max-dim 33 --out " + path("b.csv"));
  EXPECT_EQ(r.code, 0);
  std::istringstream in(slurp(path("b.csv")));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "kind,dim,orthogonality_error,diagonalization_error");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 33 + 16 + 33);
}

TEST_F(Cli, BasisCheckUsageAndIo) {
  EXPECT_EQ(run("basis-check --max-dim 2 --out " + path("b.csv")).code, 64);
  EXPECT_EQ(run("basis-check --max-dim 5 --out " + path("no/such/dir/b.csv")).code, 2);
  EXPECT_EQ(run("basis-check --out " + path("b.csv")).code, 64);
}

TEST_F(Cli, EstimateConstantSeries) {
  std::ofstream(path("c.csv")) << "time,value\n0,2\n0.25,2\n0.5,2\n0.75,2\n1,2\n";
  const auto r = run("estimate --input " + path("c.csv") + " --kind siml --m 2");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "siml,4,2,0,0,0,0,0\n");
}

TEST_F(Cli, EstimateUnitJump) {
  std::ofstream(path("j.csv")) << "time,value\r\n0,0\r\n0.5,1\r\n1,1\r\n";
  const auto r = run("estimate --input " + path("j.csv") + " --kind siml --m 1");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("siml,2,1,0,0,0,1.44721359549995", 0), 0u) << r.out;
}

TEST_F(Cli, EstimateComplexWithQ) {
  std::ofstream(path("q.csv")) << "time,value\n0,0\n0.25,1\n0.5,0.5\n0.75,2\n1,1\n";
  const auto r = run("estimate --input " + path("q.csv") + " --kind mm_complex --m 1 --q 1");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("mm_complex,4,1,1,0,0,", 0), 0u) << r.out;
}

TEST_F(Cli, EstimateErrors) {
  std::ofstream(path("e.csv")) << "time,value\n0,0\n0.5,1\n1,1\n";
  std::ofstream(path("bad.csv")) << "time,value\n0,0\n0.5,oops\n";
  std::ofstream(path("one.csv")) << "time,value\n0,0\n";
  EXPECT_EQ(run("estimate --input " + path("e.csv") + " --kind mm_real --m 0").code, 64);
  EXPECT_EQ(run("estimate --input " + path("e.csv") + " --kind siml --m 3").code, 64);
  EXPECT_EQ(run("estimate --input " + path("e.csv") + " --kind nope --m 1").code, 64);
  EXPECT_EQ(run("estimate --input " + path("bad.csv") + " --kind siml --m 1").code, 65);
  EXPECT_EQ(run("estimate --input " + path("one.csv") + " --kind siml --m 1").code, 65);
  EXPECT_EQ(run("estimate --input " + path("missing.csv") + " --kind siml --m 1").code, 66);
}

TEST_F(Cli, ExperimentExitCodes) {
  EXPECT_EQ(run("experiment --config " + path("missing.cfg") + " --out-dir " + path("o")).code, 78);
  std::ofstream(path("bad.cfg")) << "[experiment]\ntypes = consistency\nn_schedule = 64\nwat = 1\n";
  EXPECT_EQ(run("experiment --config " + path("bad.cfg") + " --out-dir " + path("o")).code, 78);

  // a threshold that cannot hold gives an assertion failure
  std::ofstream(path("strict.cfg")) << "[experiment]\ntypes = noise_bounds\nn_schedule = 64\n"
                                       "replications = 20\nina_target_ratio = 0.0001\n"
                                       "[simulation]\nvariance = 0\n[noise]\nvariance = 0.01\n"
                                       "include_initial = true\n[estimators]\nkinds = ina\n";
  EXPECT_EQ(run("experiment --config " + path("strict.cfg") + " --out-dir " + path("o")).code, 1);

  std::ofstream(path("ok.cfg")) << "[experiment]\ntypes = noise_bounds\nn_schedule = 63\n"
                                   "replications = 20\n[simulation]\nvariance = 0\n";
  std::ofstream(path("blocker")) << "x";
  EXPECT_EQ(run("experiment --config " + path("ok.cfg") + " --out-dir " + path("blocker/sub")).code, 2);
  const auto ok = run("experiment --config " + path("ok.cfg") + " --out-dir " + path("o"));
  EXPECT_EQ(ok.code, 0);
  EXPECT_NE(ok.out.find("PASS"), std::string::npos);
  EXPECT_TRUE(fs::exists(path("o/ok_noise_bounds.csv")));
}

TEST_F(Cli, SeedOverrideIsDeterministic) {
  std::ofstream(path("d.cfg")) << "[experiment]\ntypes = noise_bounds\nn_schedule = 63, 255\n"
                                  "replications = 40\n[simulation]\nvariance = 0\n"
                                  "[noise]\nvariance = 0.01\n[estimators]\nkinds = siml, ina\n";
  ASSERT_EQ(run("experiment --config " + path("d.cfg") + " --out-dir " + path("a") + " --seed 7").code, 0);
  ASSERT_EQ(run("experiment --config " + path("d.cfg") + " --out-dir " + path("b") + " --seed 7 --threads 3").code, 0);
  ASSERT_EQ(run("experiment --config " + path("d.cfg") + " --out-dir " + path("c") + " --seed 8").code, 0);
  EXPECT_EQ(slurp(path("a/d_noise_bounds.csv")), slurp(path("b/d_noise_bounds.csv")));
  EXPECT_NE(slurp(path("a/d_noise_bounds.csv")), slurp(path("c/d_noise_bounds.csv")));
}

TEST_F(Cli, NoSubcommandIsUsageError) { EXPECT_EQ(run("").code, 64); }
