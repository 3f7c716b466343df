#include <gtest/gtest.h>

#include "test_support.hpp"

using testing_support::kFixture;
using testing_support::run_cli;
using testing_support::slurp;
using testing_support::TempDir;

namespace {

std::string q(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

}  // namespace

TEST(Cli, ValidateFixture) {
  TempDir dir;
  EXPECT_EQ(run_cli("validate --dataset " + q(kFixture), dir / "log"), 0);
  EXPECT_EQ(slurp(dir / "log"), "train=64 validation=16 test=20\n");
}

TEST(Cli, ValidateMalformedExitsOne) {
  TempDir dir;
  testing_support::spit(dir / "bad.tsv", "sentence1\tsentence2\tscore\tsplit\na\tb\t4.5\ttrain\n");
  EXPECT_EQ(run_cli("validate --dataset " + q(dir / "bad.tsv"), dir / "log"), 1);
  EXPECT_NE(slurp(dir / "log").find("bad.tsv:2"), std::string::npos);
}

TEST(Cli, ConfigurationErrorsExitTwo) {
  TempDir dir;
  EXPECT_EQ(run_cli("run --dataset " + q(kFixture) + " --temperature 1.5 --out " + q(dir / "o"), dir / "log"), 2);
  EXPECT_EQ(run_cli("run --dataset " + q(dir / "missing.tsv") + " --out " + q(dir / "o"), dir / "log"), 2);
  EXPECT_EQ(run_cli("run --dataset " + q(kFixture) + " --examples 65 --out " + q(dir / "o"), dir / "log"), 2);
  EXPECT_EQ(run_cli("frobnicate", dir / "log"), 2);
}

TEST(Cli, RunWritesArtifactsAndResumes) {
  TempDir dir;
  const auto args = "run --provider mock --dataset " + q(kFixture) + " --out " + q(dir / "o");
  ASSERT_EQ(run_cli(args, dir / "log"), 0);
  const auto first = slurp(dir / "log");
  EXPECT_TRUE(first.starts_with("pearson_r=1 n=20 excluded=0")) << first;
  std::filesystem::path run_dir;
  for (const auto& e : std::filesystem::directory_iterator(dir / "o/runs")) run_dir = e.path();
  const auto pairs = slurp(run_dir / "pairs.csv");
  ASSERT_EQ(run_cli(args, dir / "log"), 0);
  EXPECT_EQ(slurp(dir / "log"), first);
  EXPECT_EQ(slurp(run_dir / "pairs.csv"), pairs);
  EXPECT_FALSE(std::filesystem::exists(dir / "o/.simrag.lock"));
}

TEST(Cli, AllExcludedExitsFive) {
  TempDir dir;
  EXPECT_EQ(run_cli("run --provider mock --malformed-rate 1 --dataset " + q(kFixture) + " --out " + q(dir / "o"),
                    dir / "log"),
            5);
  EXPECT_NE(slurp(dir / "log").find("excluded"), std::string::npos);
}

TEST(Cli, EnvironmentAndConfigFileLayers) {
  TempDir dir;
  testing_support::spit(dir / "cfg.json", R"({"noise_sigma": 0.5, "seed": 1})");
  const auto base = "run --provider mock --dataset " + q(kFixture) + " --config " + q(dir / "cfg.json");
  ASSERT_EQ(run_cli(base + " --out " + q(dir / "a"), dir / "a.log"), 0);
  ASSERT_EQ(run_cli(base + " --seed 2 --out " + q(dir / "b"), dir / "b.log"), 0);
  // Flag beats file, env beats file: seeds 1 and 2 give different noise.
  EXPECT_NE(slurp(dir / "a.log").substr(0, 30), slurp(dir / "b.log").substr(0, 30));
  const std::string cmd = "SIMRAG_SEED=2 '" + testing_support::kCli.string() + "' " + base + " --out " +
                          q(dir / "c") + " >" + q(dir / "c.log") + " 2>&1";
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  EXPECT_EQ(slurp(dir / "c.log").substr(0, 30), slurp(dir / "b.log").substr(0, 30));
}

TEST(Cli, SweepsAndReport) {
  TempDir dir;
  const auto common = " --provider mock --dataset " + q(kFixture) + " --out " + q(dir / "o");
  ASSERT_EQ(run_cli("sweep-temp --temperatures 0,0.5,1" + common, dir / "log"), 0);
  EXPECT_EQ(slurp(dir / "o/temperature_sweep.csv").find("temperature,k,pearson_r"), 0u);
  ASSERT_EQ(run_cli("sweep-examples --sizes 0,10,70" + common, dir / "log"), 0);
  const auto sweep = slurp(dir / "o/example_sweep.csv");
  EXPECT_NE(sweep.find("70,,,,failed"), std::string::npos) << sweep;
  EXPECT_TRUE(std::filesystem::exists(dir / "o/example_scatter.svg"));
  ASSERT_EQ(run_cli("grid --temperatures 0,1 --sizes 0,10" + common, dir / "log"), 0);
  const auto meta = nlohmann::json::parse(slurp(dir / "o/meta.json"));
  EXPECT_EQ(meta.at("cells").size(), 4u);
  EXPECT_EQ(meta.at("argmax").at("temperature"), 0.0);

  std::filesystem::remove(dir / "o/grid_heatmap.svg");
  ASSERT_EQ(run_cli("report --out " + q(dir / "o"), dir / "log"), 0);
  EXPECT_TRUE(std::filesystem::exists(dir / "o/grid_heatmap.svg"));
}

TEST(Cli, Baseline) {
  TempDir dir;
  ASSERT_EQ(run_cli("baseline --metric levenshtein --dataset " + q(kFixture) + " --out " + q(dir / "o"), dir / "log"),
            0);
  EXPECT_TRUE(slurp(dir / "log").starts_with("metric=levenshtein"));
  bool found = false;
  for (const auto& e : std::filesystem::recursive_directory_iterator(dir / "o/baselines")) {
    found |= e.path().filename() == "values.csv";
  }
  EXPECT_TRUE(found);
}
