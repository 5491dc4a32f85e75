/* Copyright 2026 The EgoSDE Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "egosde/scene.h"

namespace egosde {
namespace {

namespace fs = std::filesystem;

const char kCli[] = EGOSDE_CLI_PATH;
const char kGoldenDir[] = EGOSDE_TEST_DATA_DIR "/golden";

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::vector<std::string> Lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

std::vector<std::string> SplitCsv(const std::string& line) {
  std::vector<std::string> fields;
  std::istringstream in(line);
  for (std::string f; std::getline(in, f, ',');) fields.push_back(f);
  return fields;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::path(::testing::TempDir()) /
           ("egosde_cli_" +
            std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  // Runs the tool in the scratch directory; returns the exit code.
  int Run(const std::string& args) {
    const std::string cmd =
        "cd '" + dir_.string() + "' && '" + kCli + "' " + args + " > stdout.txt 2> stderr.txt";
    const int status = std::system(cmd.c_str());
    stdout_ = ReadFile(dir_ / "stdout.txt");
    stderr_ = ReadFile(dir_ / "stderr.txt");
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  fs::path Path(const std::string& name) const { return dir_ / name; }

  fs::path dir_;
  std::string stdout_;
  std::string stderr_;
};

TEST_F(CliTest, SynthIsDeterministic) {
  const std::string flags = "synth --objects 20 --frames 100 --seed 7 --noise 0.1";
  ASSERT_EQ(Run(flags + " -o a.jsonl"), 0) << stderr_;
  ASSERT_EQ(Run(flags + " -o b.jsonl"), 0) << stderr_;
  ASSERT_EQ(Run("synth --objects 20 --frames 100 --seed 8 --noise 0.1 -o c.jsonl"), 0);
  EXPECT_EQ(ReadFile(Path("a.jsonl")), ReadFile(Path("b.jsonl")));
  EXPECT_NE(ReadFile(Path("a.jsonl")), ReadFile(Path("c.jsonl")));

  const auto ma = nlohmann::json::parse(ReadFile(Path("a.jsonl.manifest.json")));
  const auto mb = nlohmann::json::parse(ReadFile(Path("b.jsonl.manifest.json")));
  EXPECT_EQ(ma["command"], "synth");
  EXPECT_EQ(ma["seed"], 7);
  const std::string hash = ma["outputs"]["a.jsonl"];
  EXPECT_EQ(hash.size(), 64u);
  EXPECT_EQ(hash, mb["outputs"]["b.jsonl"].get<std::string>());
  EXPECT_TRUE(ma.contains("tool_version"));
  EXPECT_TRUE(ma.contains("wall_time_s"));

  const Scene scene = LoadScene(Path("a.jsonl").string());
  EXPECT_EQ(scene.objects.size(), 20u);
  EXPECT_EQ(scene.ego.size(), 100u);
}

TEST_F(CliTest, UsageErrorsExitTwo) {
  EXPECT_EQ(Run("synth --objects 0 -o x.jsonl"), 2);
  EXPECT_NE(stderr_.find("num_objects"), std::string::npos) << stderr_;
  EXPECT_EQ(Run("synth --frobnicate -o x.jsonl"), 2);
  EXPECT_EQ(Run("fit -i missing.jsonl -o y.jsonl"), 2);
  EXPECT_EQ(Run("bogus"), 2);
  ASSERT_EQ(Run("synth --objects 2 --frames 10 -o s.jsonl"), 0);
  EXPECT_EQ(Run("fit -i s.jsonl -o y.jsonl --rep blob"), 2);
  EXPECT_EQ(Run("eval -i s.jsonl --out-dir ev --metric map"), 2);
  EXPECT_EQ(Run("eval -i s.jsonl --out-dir ev --buckets 5,1"), 2);
  EXPECT_EQ(Run("eval -i s.jsonl --out-dir ev --rep contour"), 2);
  EXPECT_EQ(Run("eval -i s.jsonl --out-dir ev --t 30"), 2);
  EXPECT_EQ(Run("collide -i s.jsonl --out-dir co --step 0"), 2);
  EXPECT_EQ(Run("collide -i s.jsonl --out-dir co --horizon -1"), 2);
}

TEST_F(CliTest, JsonErrors) {
  EXPECT_EQ(Run("--json-errors fit -i missing.jsonl -o y.jsonl"), 2);
  const std::vector<std::string> lines = Lines(stderr_);
  ASSERT_EQ(lines.size(), 1u) << stderr_;
  const auto err = nlohmann::json::parse(lines[0]);
  EXPECT_EQ(err["error"], "IoError");
  EXPECT_EQ(err["exit_code"], 2);
  EXPECT_TRUE(err["message"].is_string());
}

TEST_F(CliTest, ZeroNoiseStarPolyCoversEverything) {
  ASSERT_EQ(Run("synth --objects 20 --frames 20 --seed 3 -o s.jsonl"), 0);
  ASSERT_EQ(Run("fit -i s.jsonl -o f.jsonl --rep starpoly"), 0) << stderr_;
  const std::size_t at = stdout_.find(" coverage ");
  ASSERT_NE(at, std::string::npos) << stdout_;
  EXPECT_LT(std::stod(stdout_.substr(at + 10)), 1e-6) << stdout_;
  const Scene scene = LoadScene(Path("f.jsonl").string());
  for (const Detection& d : scene.detections) EXPECT_TRUE(d.contour.has_value());
  EXPECT_TRUE(fs::exists(Path("f.jsonl.manifest.json")));
}

TEST_F(CliTest, CvcContoursOnFullyVisibleObjects) {
  ASSERT_EQ(Run("synth --objects 10 --frames 20 --seed 4 --full-visible -o s.jsonl"), 0);
  ASSERT_EQ(Run("fit -i s.jsonl -o f.jsonl --rep cvc"), 0) << stderr_;
  EXPECT_NE(stdout_.find(", 0 fallbacks"), std::string::npos) << stdout_;
  const Scene scene = LoadScene(Path("f.jsonl").string());
  ASSERT_FALSE(scene.detections.empty());
  for (const Detection& d : scene.detections) {
    ASSERT_TRUE(d.contour.has_value());
    EXPECT_GE(d.contour->size(), 3u);
  }
}

TEST_F(CliTest, ZeroNoiseEvalIsPerfect) {
  ASSERT_EQ(Run("synth --objects 10 --frames 30 --seed 5 -o s.jsonl"), 0);
  ASSERT_EQ(Run("eval -i s.jsonl --out-dir ev --metric sde-ap,sde-apd,iou-ap,iou-apd "
                "--t 0,1 --buckets 0,20,inf"),
            0)
      << stderr_;
  const std::vector<std::string> rows = Lines(ReadFile(Path("ev/ap.csv")));
  ASSERT_EQ(rows[0], "metric,bucket,t,delta,beta,ap");
  // Four metrics by two horizons by the buckets all, 0-20 and 20-inf.
  ASSERT_EQ(rows.size(), 1u + 4u * 2u * 3u);
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_EQ(SplitCsv(rows[i])[5], "1") << rows[i];
  EXPECT_TRUE(fs::exists(Path("ev/pr.csv")));
  EXPECT_TRUE(fs::exists(Path("ev/manifest.json")));
}

TEST_F(CliTest, ApdWithBetaZeroEqualsAp) {
  ASSERT_EQ(Run("synth --objects 15 --frames 40 --seed 6 --noise 0.2 --fp-rate 0.3 -o s.jsonl"), 0);
  ASSERT_EQ(Run("eval -i s.jsonl --out-dir a --metric sde-ap"), 0);
  ASSERT_EQ(Run("eval -i s.jsonl --out-dir b --metric sde-apd --beta 0"), 0);
  const auto a = Lines(ReadFile(Path("a/ap.csv")));
  const auto b = Lines(ReadFile(Path("b/ap.csv")));
  ASSERT_EQ(a.size(), 2u);
  ASSERT_EQ(b.size(), 2u);
  EXPECT_EQ(SplitCsv(a[1])[5], SplitCsv(b[1])[5]);
}

TEST_F(CliTest, DeltaSweepIsMonotone) {
  ASSERT_EQ(Run("synth --objects 15 --frames 40 --seed 9 --noise 0.2 -o s.jsonl"), 0);
  ASSERT_EQ(Run("eval -i s.jsonl --out-dir ev --delta 0.1,0.2,0.3"), 0);
  const auto rows = Lines(ReadFile(Path("ev/ap.csv")));
  ASSERT_EQ(rows.size(), 4u);
  double prev = -1.0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double ap = std::stod(SplitCsv(rows[i])[5]);
    EXPECT_GE(ap, prev);
    prev = ap;
  }
}

TEST_F(CliTest, CollideReport) {
  ASSERT_EQ(Run("synth --objects 20 --frames 60 --seed 10 -o s.jsonl"), 0);
  ASSERT_EQ(Run("collide -i s.jsonl --out-dir co --horizon 10 --step 1"), 0) << stderr_;
  const auto per_t = Lines(ReadFile(Path("co/per_t.csv")));
  EXPECT_EQ(per_t.size(), 1u + 11u);
  const auto groups = Lines(ReadFile(Path("co/groups.csv")));
  ASSERT_EQ(groups.size(), 3u);
  EXPECT_EQ(SplitCsv(groups[2])[0], "fp_fn");
  EXPECT_EQ(SplitCsv(groups[2]).back(), "true");
  EXPECT_EQ(SplitCsv(groups[1]).back(), "false");
}

TEST_F(CliTest, PipelineRerunIsByteIdentical) {
  const auto pipeline = [&](const std::string& tag, const std::string& jobs) {
    ASSERT_EQ(
        Run(jobs + " synth --objects 6 --frames 30 --seed 11 --noise 0.15 -o " + tag + ".jsonl"),
        0);
    ASSERT_EQ(Run(jobs + " fit -i " + tag + ".jsonl -o " + tag + "_fit.jsonl"), 0);
    ASSERT_EQ(Run(jobs + " eval -i " + tag + "_fit.jsonl --rep starpoly --out-dir " + tag +
                  "_ev --metric sde-ap,sde-apd --t 0,1"),
              0);
    ASSERT_EQ(
        Run(jobs + " collide -i " + tag + "_fit.jsonl --rep starpoly --out-dir " + tag + "_co"), 0);
  };
  pipeline("a", "");
  pipeline("b", "");
  pipeline("c", "--jobs 1");
  for (const std::string& file :
       {"_fit.jsonl", "_ev/ap.csv", "_ev/pr.csv", "_co/groups.csv", "_co/per_t.csv"}) {
    const std::string a = ReadFile(Path("a" + file));
    EXPECT_FALSE(a.empty()) << file;
    EXPECT_EQ(a, ReadFile(Path("b" + file))) << file;
    EXPECT_EQ(a, ReadFile(Path("c" + file))) << file;
  }
  int manifests = 0;
  for (const auto& entry : fs::directory_iterator(Path("a_ev"))) {
    manifests += entry.path().extension() == ".json";
  }
  EXPECT_EQ(manifests, 1);
}

// Output schemas and values for a fixed small pipeline.
TEST_F(CliTest, GoldenCsvs) {
  ASSERT_EQ(Run("synth --objects 3 --frames 20 --seed 7 --noise 0.1 -o s.jsonl"), 0);
  ASSERT_EQ(Run("eval -i s.jsonl --out-dir ev --metric sde-ap,iou-apd --buckets 0,20,inf"), 0);
  ASSERT_EQ(Run("collide -i s.jsonl --out-dir co --horizon 2 --step 0.5"), 0);
  for (const std::string& file : {"ev/ap.csv", "co/groups.csv", "co/per_t.csv"}) {
    const std::string golden = fs::path(file).stem().string() + ".csv";
    EXPECT_EQ(ReadFile(Path(file)), ReadFile(fs::path(kGoldenDir) / golden)) << file;
  }
}

}  // namespace
}  // namespace egosde
