#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ixsim/trial_log.hpp"

namespace fs = std::filesystem;

namespace
{

int run_cli(const std::string & args)
{
  const std::string cmd = std::string(IXSIM_BINARY) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path & p)
{
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test
{
protected:
  void SetUp() override
  {
    dir_ = fs::temp_directory_path() /
           ("ixsim_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string & name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, UsageErrorsExitOne)
{
  EXPECT_EQ(run_cli(""), 1);
  EXPECT_EQ(run_cli("bogus"), 1);
  EXPECT_EQ(run_cli("run --trials 2"), 1);
  EXPECT_EQ(run_cli("run --task sideways --out " + path("x.jsonl")), 1);
  EXPECT_EQ(run_cli("--help"), 0);
}

TEST_F(CliTest, MissingFilesExitThree)
{
  EXPECT_EQ(run_cli("report --in " + path("missing.jsonl") + " --out " + path("r")), 3);
  EXPECT_EQ(run_cli("run --trials 1 --config " + path("missing.ini") + " --out " + path("x.jsonl")), 3);
  EXPECT_EQ(run_cli("calibrate --targets " + path("missing.ini")), 3);
}

TEST_F(CliTest, BadConfigExitsOne)
{
  std::ofstream(path("bad.ini")) << "[mechanism]\nnot_a_key = 1\n";
  EXPECT_EQ(run_cli("run --trials 1 --config " + path("bad.ini") + " --out " + path("x.jsonl")), 1);
}

TEST_F(CliTest, SeededRunIsByteIdentical)
{
  const std::string args = "run --task cycle --operator novice --trials 5 --seed 42 --out ";
  ASSERT_EQ(run_cli(args + path("a.jsonl")), 0);
  ASSERT_EQ(run_cli(args + path("b.jsonl")), 0);
  const std::string a = slurp(path("a.jsonl"));
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, slurp(path("b.jsonl")));
  const auto log = ixsim::read_log(path("a.jsonl"));
  EXPECT_EQ(log.records.size(), 5u);
  EXPECT_TRUE(log.errors.empty());
}

TEST_F(CliTest, RunThenReport)
{
  ASSERT_EQ(run_cli("run --task attach --operator expert --trials 3 --seed 1 --out " + path("log.jsonl")), 0);
  ASSERT_EQ(run_cli("report --in " + path("log.jsonl") + " --out " + path("rep")), 0);
  for (const char * f : {"summary.txt", "times.csv", "failures.csv", "success.csv", "learning_curve.csv"}) {
    EXPECT_TRUE(fs::exists(dir_ / "rep" / f)) << f;
  }
}

TEST_F(CliTest, CalibrateWritesLoadableConfigOrExitsTwo)
{
  std::ofstream(path("ok.ini")) << "[targets]\nexpert_cycle_s = 45\nnovice_cycle_s = 70\n"
                                   "tolerance = 0.9\ntrials = 2\n"
                                   "[grid]\nmacro_min_s = 30\nmacro_max_s = 40\nmacro_step_s = 10\n";
  ASSERT_EQ(run_cli("calibrate --targets " + path("ok.ini") + " --out " + path("fit.ini")), 0);
  ASSERT_EQ(run_cli("run --trials 1 --config " + path("fit.ini") + " --out " + path("x.jsonl")), 0);

  std::ofstream(path("far.ini")) << "[targets]\nexpert_cycle_s = 1\nnovice_cycle_s = 70\ntrials = 2\n"
                                    "[grid]\nmacro_min_s = 30\nmacro_max_s = 30\nmacro_step_s = 10\n";
  EXPECT_EQ(run_cli("calibrate --targets " + path("far.ini") + " --out " + path("far_fit.ini")), 2);
}
