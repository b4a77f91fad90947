//
// Copyright 2026 The Canary Audit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "cli.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "absl/strings/str_split.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "json.hpp"

namespace canary_audit {
namespace {

using ::testing::HasSubstr;
using Json = nlohmann::json;

struct CliOutput {
  int code = 0;
  std::string out;
  std::string err;
};

CliOutput Cli(std::vector<std::string> args) {
  args.insert(args.begin(), "canary_audit");
  std::vector<const char*> argv;
  for (const std::string& arg : args) argv.push_back(arg.c_str());
  std::ostringstream out;
  std::ostringstream err;
  CliOutput result;
  result.code = RunCli(static_cast<int>(argv.size()), argv.data(), out, err);
  result.out = out.str();
  result.err = err.str();
  return result;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("canary_audit_cli_test_" +
            std::string(::testing::UnitTest::GetInstance()
                            ->current_test_info()
                            ->name()));
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }

  std::string Path(const std::string& name) const {
    return (dir_ / name).string();
  }

  std::string WriteFile(const std::string& name, const std::string& text) {
    const std::string path = Path(name);
    std::ofstream(path, std::ios::binary) << text;
    return path;
  }

  // Writes a simulated loss file through the CLI and returns its path.
  std::string SimulateFile(const std::string& name,
                           std::vector<std::string> flags) {
    const std::string path = Path(name);
    flags.insert(flags.begin(), "simulate");
    flags.push_back("--out-file");
    flags.push_back(path);
    const CliOutput result = Cli(flags);
    EXPECT_EQ(result.code, kExitOk) << result.err;
    return path;
  }

  std::filesystem::path dir_;
};

double MedianExposure(const Json& report) {
  for (const Json& entry : report.at("exposure").at("quantiles")) {
    if (entry.at("q") == 0.5) return entry.at("exposure").get<double>();
  }
  ADD_FAILURE() << "no median in report";
  return NAN;
}

TEST_F(CliTest, NullAuditFindsNoLeakage) {
  const std::string file = SimulateFile(
      "null.csv", {"--mu", "0", "--m", "2001", "--n", "2000", "--seed", "3"});
  const CliOutput result = Cli({"audit", file});
  ASSERT_EQ(result.code, kExitOk) << result.err;
  const Json report = Json::parse(result.out);
  EXPECT_NEAR(MedianExposure(report), 1.0, 0.15);
  EXPECT_EQ(report.at("epsilon_bounds")[0]
                .at("raw")
                .at("confident_lower_bound")
                .get<double>(),
            0.0);
}

TEST_F(CliTest, ShiftedAuditIsPositive) {
  const std::string file = SimulateFile(
      "shift.jsonl",
      {"--mu", "4", "--m", "1000", "--n", "1000", "--format", "jsonl"});
  const CliOutput result = Cli({"audit", file, "--fpr-target", "0.01"});
  ASSERT_EQ(result.code, kExitOk) << result.err;
  const Json report = Json::parse(result.out);
  EXPECT_GT(MedianExposure(report), 5.0);
  ASSERT_EQ(report.at("epsilon_bounds").size(), 2u);
  for (const Json& entry : report.at("epsilon_bounds")) {
    EXPECT_GT(entry.at("raw").at("confident_lower_bound").get<double>(), 0.5);
  }
}

TEST_F(CliTest, ReplicationsDivideEpsilon) {
  std::string text = "role,loss,id,replications\n";
  for (int i = 0; i < 200; ++i) {
    text += "canary," + std::to_string(i * 0.01) + ",c" + std::to_string(i) +
            ",4\n";
    text += "reference," + std::to_string(1.5 + i * 0.01) + ",,\n";
  }
  const CliOutput result = Cli({"audit", WriteFile("rep.csv", text)});
  ASSERT_EQ(result.code, kExitOk) << result.err;
  const Json report = Json::parse(result.out);
  const Json& bound = report.at("epsilon_bounds")[0];
  const double raw = bound.at("raw").at("confident_lower_bound").get<double>();
  EXPECT_GT(raw, 0.0);
  EXPECT_EQ(bound.at("per_example").at("confident_lower_bound").get<double>(),
            raw / 4);
  EXPECT_THAT(report.at("warnings").dump(), HasSubstr("group privacy"));
}

TEST_F(CliTest, UnachievableTargetWarns) {
  const std::string file =
      SimulateFile("small.csv", {"--mu", "1", "--m", "100", "--n", "100"});
  const CliOutput result = Cli({"audit", file, "--fpr-target", "0.001"});
  ASSERT_EQ(result.code, kExitOk) << result.err;
  const Json report = Json::parse(result.out);
  const Json& entry = report.at("epsilon_bounds")[1];
  EXPECT_TRUE(entry.at("target_unachievable").get<bool>());
  EXPECT_EQ(entry.at("attack").at("fpr").get<double>(), 0.0);
  EXPECT_THAT(report.at("warnings").dump(), HasSubstr("below 1/n"));
}

TEST_F(CliTest, AuditOutputFormats) {
  const std::string file =
      SimulateFile("formats.csv", {"--mu", "1", "--m", "30", "--n", "40"});
  const CliOutput md = Cli({"audit", file, "--out", "md"});
  ASSERT_EQ(md.code, kExitOk) << md.err;
  EXPECT_THAT(md.out, HasSubstr("# Canary exposure audit"));
  const CliOutput csv = Cli({"audit", file, "--out", "csv"});
  ASSERT_EQ(csv.code, kExitOk) << csv.err;
  const std::vector<std::string> lines =
      absl::StrSplit(csv.out, '\n', absl::SkipEmpty());
  EXPECT_EQ(lines.size(), 31u);
}

TEST_F(CliTest, UsageErrors) {
  const std::string file =
      SimulateFile("usage.csv", {"--m", "10", "--n", "10"});
  EXPECT_EQ(Cli({"audit", file, "--bogus"}).code, kExitUsageError);
  EXPECT_EQ(Cli({"audit", file, "--confidence", "1.0"}).code, kExitUsageError);
  EXPECT_EQ(Cli({"audit", file, "--confidence", "2"}).code, kExitUsageError);
  EXPECT_EQ(Cli({"audit", file, "--tie-policy", "random"}).code,
            kExitUsageError);
  EXPECT_EQ(Cli({"audit"}).code, kExitUsageError);
  EXPECT_EQ(Cli({}).code, kExitUsageError);
  EXPECT_EQ(Cli({"baseline", "--statistic", "mode"}).code, kExitUsageError);
  EXPECT_EQ(Cli({"--help"}).code, kExitOk);
}

TEST_F(CliTest, DataErrors) {
  const CliOutput missing = Cli({"audit", Path("does_not_exist.csv")});
  EXPECT_EQ(missing.code, kExitDataError);
  const CliOutput malformed = Cli(
      {"audit", WriteFile("bad.csv", "role,loss\ncanary,1\nreference,abc\n")});
  EXPECT_EQ(malformed.code, kExitDataError);
  EXPECT_THAT(malformed.err, HasSubstr("line 3"));
  EXPECT_EQ(Cli({"roc", WriteFile("empty.csv", "role,loss\n")}).code,
            kExitDataError);
}

TEST_F(CliTest, BaselineCommand) {
  const CliOutput mean = Cli({"baseline", "--n", "1000000", "--m", "10",
                              "--statistic", "mean", "--trials", "5", "--json"});
  ASSERT_EQ(mean.code, kExitOk) << mean.err;
  const Json summary = Json::parse(mean.out);
  EXPECT_NEAR(summary.at("exact").get<double>(), 1.4427, 1e-4);

  const CliOutput quartile =
      Cli({"baseline", "--statistic", "quantile=0.75", "--json"});
  ASSERT_EQ(quartile.code, kExitOk) << quartile.err;
  EXPECT_EQ(Json::parse(quartile.out).at("asymptotic").get<double>(), 2.0);

  const CliOutput first = Cli({"baseline", "--seed", "7", "--trials", "20"});
  const CliOutput second = Cli({"baseline", "--seed", "7", "--trials", "20"});
  EXPECT_EQ(first.code, kExitOk);
  EXPECT_EQ(first.out, second.out);
  EXPECT_THAT(first.out, HasSubstr("statistic:   quantile=0.5"));
}

TEST_F(CliTest, SimulateCommand) {
  const CliOutput bad = Cli({"simulate", "--m", "0"});
  EXPECT_EQ(bad.code, kExitUsageError);
  EXPECT_THAT(bad.err, HasSubstr("m >= 1 required, got 0"));
  const CliOutput text = Cli({"simulate", "--m", "3", "--n", "2"});
  ASSERT_EQ(text.code, kExitOk);
  const std::vector<std::string> lines =
      absl::StrSplit(text.out, '\n', absl::SkipEmpty());
  EXPECT_EQ(lines.size(), 6u);
  EXPECT_EQ(Cli({"simulate", "--m", "3", "--n", "2"}).out, text.out);
}

TEST_F(CliTest, RocCommand) {
  const CliOutput tiny =
      Cli({"roc", WriteFile("tiny.csv", "role,loss\ncanary,1\nreference,2\n")});
  ASSERT_EQ(tiny.code, kExitOk) << tiny.err;
  EXPECT_EQ(tiny.out, "threshold,fpr,tpr\n-inf,0,0\n1,0,0\n2,0,1\ninf,1,1\n");

  const std::string separated = SimulateFile(
      "sep.csv", {"--mu", "20", "--m", "50", "--n", "50"});
  const std::string out_file = Path("roc.csv");
  ASSERT_EQ(Cli({"roc", separated, "--out-file", out_file}).code, kExitOk);
  std::ifstream in(out_file);
  std::stringstream contents;
  contents << in.rdbuf();
  EXPECT_THAT(contents.str(), HasSubstr(",0,1\n"));

  const std::string null = SimulateFile(
      "null.csv", {"--mu", "0", "--m", "2000", "--n", "2000"});
  const CliOutput sweep = Cli({"roc", null});
  ASSERT_EQ(sweep.code, kExitOk);
  std::vector<std::string> rows =
      absl::StrSplit(sweep.out, '\n', absl::SkipEmpty());
  rows.erase(rows.begin());
  double worst = 0.0;
  for (const std::string& row : rows) {
    const std::vector<std::string> fields = absl::StrSplit(row, ',');
    worst = std::max(worst,
                     std::abs(std::stod(fields[2]) - std::stod(fields[1])));
  }
  EXPECT_LT(worst, 0.06);
}

}  // namespace
}  // namespace canary_audit
