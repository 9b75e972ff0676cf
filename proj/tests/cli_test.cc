// Copyright 2026 The Blimp Neurocontrol Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "blimp/cli.h"

#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "blimp/genome_io.h"
#include "blimp/sysid.h"
#include "blimp/text.h"

namespace blimp {
namespace {

namespace fs = std::filesystem;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           (std::string("blimp_cli_") +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string Path(const std::string& name) const { return (dir_ / name).string(); }

  int Run(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    return CliMain(args, out_, err_);
  }

  // Small enough to run in well under a second.
  std::vector<std::string> EvolveArgs(const std::string& out_dir) {
    return {"evolve", "--out", Path(out_dir), "--seed", "7", "--generations", "3",
            "--pop", "6", "--set", "episode.n_setpoints=2", "--set",
            "episode.hold=4", "--set", "evolution.reeval_sets=2"};
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(Run({}), kExitUsage);
  EXPECT_EQ(Run({"fly"}), kExitUsage);
  EXPECT_EQ(Run({"eval", "--controller", "pid", "--bogus"}), kExitUsage);
  EXPECT_EQ(Run({"eval", "--controller", "lqr"}), kExitUsage);
  EXPECT_EQ(Run({"eval", "--controller", "snn", "--genome", Path("none.json")}),
            kExitUsage);
  EXPECT_EQ(Run({"eval", "--controller", "snn"}), kExitUsage);
  EXPECT_EQ(Run({"eval", "--controller", "pid", "--config", Path("none.ini")}),
            kExitUsage);
  EXPECT_EQ(Run({"eval", "--controller", "pid", "--set", "plant.zz=1"}),
            kExitUsage);
  EXPECT_EQ(Run({"sysid", "--log", Path("none.csv")}), kExitUsage);
  EXPECT_EQ(Run({"evolve", "--out", Path("e"), "--pop", "2"}), kExitUsage);
  // diagnostics are a single line
  Run({"eval", "--controller", "snn"});
  const std::string msg = err_.str();
  EXPECT_FALSE(msg.empty());
  EXPECT_EQ(msg.find('\n'), msg.size() - 1);
}

TEST_F(Cli, HelpExitsZero) {
  EXPECT_EQ(Run({"--help"}), kExitOk);
  EXPECT_NE(out_.str().find("evolve"), std::string::npos);
}

TEST_F(Cli, GenomeTypeMismatchIsUsageError) {
  SaveGenome(Path("ann.json"), AnnGenome{});
  EXPECT_EQ(Run({"eval", "--controller", "snn", "--genome", Path("ann.json")}),
            kExitUsage);
  EXPECT_EQ(Run({"eval", "--controller", "ann", "--genome", Path("ann.json")}),
            kExitOk);
}

TEST_F(Cli, InvalidConfigFile) {
  WriteFile(Path("bad.ini"), "[evolution]\npop_size = -4\n");
  EXPECT_EQ(Run({"eval", "--controller", "pid", "--config", Path("bad.ini")}),
            kExitUsage);
}

TEST_F(Cli, EvalWritesTrajectoryAndSummary) {
  ASSERT_EQ(Run({"eval", "--controller", "pid", "--out", Path("pid.csv"),
                 "--summary", Path("pid.json"), "--smooth-out", Path("s.csv")}),
            kExitOk);
  const std::string csv = ReadFile(Path("pid.csv"));
  EXPECT_EQ(csv.rfind("t,h_ref,h_true,h_meas,u_total,u_net,u_pd\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1501);
  const auto summary = LoadJson(Path("pid.json"));
  EXPECT_EQ(summary["steps"], 1500);
  EXPECT_NE(out_.str().find("rmsae="), std::string::npos);
  EXPECT_EQ(ReadFile(Path("s.csv")).rfind("t,u_total,u_smooth\n", 0), 0u);
}

TEST_F(Cli, EvalIsReproducible) {
  ASSERT_EQ(Run({"eval", "--controller", "pid", "--seed", "3", "--out", Path("a.csv")}),
            kExitOk);
  ASSERT_EQ(Run({"eval", "--controller", "pid", "--seed", "3", "--out", Path("b.csv")}),
            kExitOk);
  ASSERT_EQ(Run({"eval", "--controller", "pid", "--seed", "4", "--out", Path("c.csv")}),
            kExitOk);
  EXPECT_EQ(ReadFile(Path("a.csv")), ReadFile(Path("b.csv")));
  EXPECT_NE(ReadFile(Path("a.csv")), ReadFile(Path("c.csv")));
}

TEST_F(Cli, UnwritableOutputIsRuntimeError) {
  EXPECT_EQ(Run({"eval", "--controller", "zero", "--out",
                 Path("missing_dir/x.csv")}),
            kExitRuntime);
}

TEST_F(Cli, EvolveIsByteIdentical) {
  ASSERT_EQ(Run(EvolveArgs("a")), kExitOk) << err_.str();
  ASSERT_EQ(Run(EvolveArgs("b")), kExitOk);
  auto threaded = EvolveArgs("c");
  threaded.insert(threaded.end(), {"--threads", "3"});
  ASSERT_EQ(Run(threaded), kExitOk);
  for (const char* f : {"log.csv", "hof.json", "hof_reevaluated.json", "best.json"}) {
    const std::string a = ReadFile(Path(std::string("a/") + f));
    EXPECT_FALSE(a.empty()) << f;
    EXPECT_EQ(a, ReadFile(Path(std::string("b/") + f))) << f;
    EXPECT_EQ(a, ReadFile(Path(std::string("c/") + f))) << f;
  }
  const std::string log = ReadFile(Path("a/log.csv"));
  EXPECT_EQ(log.rfind("generation,best,mean,std,evaluations,hof_best\n", 0), 0u);
  EXPECT_EQ(std::count(log.begin(), log.end(), '\n'), 4);
  EXPECT_EQ(GenomeTypeOf(LoadJson(Path("a/best.json"))), "snn");
}

TEST_F(Cli, EvolveResumeCompletesTheRun) {
  ASSERT_EQ(Run(EvolveArgs("full")), kExitOk);
  auto partial = EvolveArgs("part");
  partial[6] = "2";  // --generations
  ASSERT_EQ(Run(partial), kExitOk);
  auto resume = EvolveArgs("part");
  resume.insert(resume.end(), {"--resume", Path("part/checkpoint.json")});
  ASSERT_EQ(Run(resume), kExitOk) << err_.str();
  EXPECT_EQ(ReadFile(Path("full/log.csv")), ReadFile(Path("part/log.csv")));
  EXPECT_EQ(ReadFile(Path("full/hof.json")), ReadFile(Path("part/hof.json")));
}

TEST_F(Cli, EvolveAnn) {
  auto args = EvolveArgs("ann");
  args.insert(args.end(), {"--controller", "ann"});
  ASSERT_EQ(Run(args), kExitOk);
  EXPECT_EQ(GenomeTypeOf(LoadJson(Path("ann/best.json"))), "ann");
  EXPECT_EQ(Run({"eval", "--controller", "ann", "--hybrid", "--genome",
                 Path("ann/best.json")}),
            kExitOk);
}

TEST_F(Cli, GenLogThenSysid) {
  ASSERT_EQ(Run({"gen-log", "--out", Path("log.csv"), "--seed", "2"}), kExitOk);
  ASSERT_EQ(Run({"sysid", "--log", Path("log.csv"), "--out", Path("fit.json"),
                 "--residuals", Path("res.csv")}),
            kExitOk);
  const auto fit = LoadJson(Path("fit.json"));
  EXPECT_NEAR(fit["model"]["d1"].get<double>(), -1.99, 1.99e-6);
  EXPECT_NEAR(fit["model"]["a1"].get<double>(), -0.969e-3, 0.969e-9);
  EXPECT_EQ(ReadFile(Path("res.csv")).rfind("t,h_obs,h_model,residual\n", 0), 0u);

  WriteFile(Path("bad.csv"), "t,u,h\n0,0,0\n0,0,0\n");
  EXPECT_EQ(Run({"sysid", "--log", Path("bad.csv")}), kExitUsage);
}

TEST_F(Cli, Compare) {
  for (const char* c : {"pid", "zero"}) {
    ASSERT_EQ(Run({"eval", "--controller", c, "--out", Path(std::string(c) + ".csv")}),
              kExitOk);
  }
  ASSERT_EQ(Run({"compare", "--pid", Path("pid.csv"), "--ann", Path("pid.csv"),
                 "--snn", Path("pid.csv"), "--out", Path("cmp.csv")}),
            kExitOk);
  const std::string table = out_.str();
  EXPECT_LT(table.find("PID"), table.find("ANN"));
  EXPECT_LT(table.find("ANN"), table.find("SNN"));
  EXPECT_NE(ReadFile(Path("cmp.csv")).find("PID,"), std::string::npos);

  // zero controller has no effort: the ratio is still defined against PID
  EXPECT_EQ(Run({"compare", "--pid", Path("pid.csv"), "--ann", Path("zero.csv"),
                 "--snn", Path("pid.csv")}),
            kExitOk);

  ASSERT_EQ(Run({"eval", "--controller", "pid", "--set", "eval.hold=30", "--out",
                 Path("short.csv")}),
            kExitOk);
  EXPECT_EQ(Run({"compare", "--pid", Path("pid.csv"), "--ann", Path("short.csv"),
                 "--snn", Path("pid.csv")}),
            kExitUsage);
}

}  // namespace
}  // namespace blimp
