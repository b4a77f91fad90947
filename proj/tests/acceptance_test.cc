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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "absl/strings/str_cat.h"
#include "canary_audit/attack.h"
#include "canary_audit/audit.h"
#include "canary_audit/baseline.h"
#include "canary_audit/exposure.h"
#include "canary_audit/ingest.h"
#include "canary_audit/simulate.h"
#include "oracles.h"

namespace canary_audit {
namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Records the first failure message and keeps the outcome failed.
void Require(Outcome& outcome, bool condition, const std::string& message) {
  if (!condition && outcome.pass) {
    outcome.pass = false;
    outcome.detail = message;
  }
}

double SecondsSince(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Outcome ExpectedExposureBaseline() {
  Outcome outcome;
  const auto start = Clock::now();
  const double value = *ExpectedExposureExact(1000000);
  const double seconds = SecondsSince(start);
  const double target = 1.0 / std::numbers::ln2;
  Require(outcome, std::abs(value - target) <= 0.01,
          absl::StrCat("E(1e6) = ", value));
  Require(outcome, seconds < 1.0, absl::StrCat("took ", seconds, " s"));
  double worst = 0.0;
  for (int64_t n = 1; n <= 100000; n = n < 100 ? n + 1 : n * 11 / 10) {
    worst = std::max(worst, std::abs(*ExpectedExposureExact(n) -
                                     oracle::ExpectedExposureBySummation(n)));
  }
  const double at_max = std::abs(*ExpectedExposureExact(100000) -
                                 oracle::ExpectedExposureBySummation(100000));
  worst = std::max(worst, at_max);
  Require(outcome, worst <= 1e-8,
          absl::StrCat("summation disagrees by ", worst));
  outcome.detail = outcome.pass
                       ? absl::StrCat("E(1e6) = ", value, " in ", seconds,
                                      " s; max summation gap ", worst)
                       : outcome.detail;
  return outcome;
}

Outcome MedianBaseline() {
  Outcome outcome;
  const std::vector<ExposureStatistic> statistics = {
      ExposureStatistic::Quantile(0.5), ExposureStatistic::Quantile(0.75)};
  const std::vector<BaselineSummary> summaries =
      *MonteCarloBaselines(10001, 10000, statistics, 200, 0);
  const double median = summaries[0].mc_mean;
  const double quartile = summaries[1].mc_mean;
  Require(outcome, std::abs(median - 1.0) <= 0.05,
          absl::StrCat("median statistic ", median));
  Require(outcome, std::abs(quartile - 2.0) <= 0.1,
          absl::StrCat("0.75 statistic ", quartile));
  if (outcome.pass) {
    outcome.detail =
        absl::StrCat("median ", median, ", 0.75-quantile ", quartile);
  }
  return outcome;
}

Outcome ExposureEndpoints() {
  Outcome outcome;
  for (int64_t n : {1, 2, 10, 1024}) {
    const double nd = static_cast<double>(n);
    Require(outcome, ExposureFromRank(1, n) == std::log2(nd),
            absl::StrCat("rank 1, n = ", n));
    Require(outcome,
            ExposureFromRank(n + 1, n) == std::log2(nd) - std::log2(nd + 1),
            absl::StrCat("rank n + 1, n = ", n));
  }
  if (outcome.pass) outcome.detail = "n in {1, 2, 10, 1024}";
  return outcome;
}

Outcome MedianIdentity() {
  Outcome outcome;
  double worst = 0.0;
  for (int k = 1; k <= 20; ++k) {
    const double p_r = std::ldexp(1.0, -k);
    worst = std::max(worst, std::abs(*EpsilonPoint(0.5, p_r) -
                                     EpsilonFromMedianExposure(
                                         std::log2(1.0 / p_r))));
  }
  Require(outcome, worst <= 1e-12, absl::StrCat("max gap ", worst));
  if (outcome.pass) outcome.detail = absl::StrCat("max gap ", worst);
  return outcome;
}

Outcome OracleEquivalence() {
  Outcome outcome;
  std::mt19937_64 rng(2026);
  for (int instance = 0; instance < 1000 && outcome.pass; ++instance) {
    const AuditDataset dataset = oracle::RandomDataset(rng, 50);
    for (TiePolicy policy : {TiePolicy::kPessimistic, TiePolicy::kOptimistic}) {
      const ExposureReport report = *ComputeExposures(dataset, policy);
      const std::vector<oracle::ExposureRow> expected =
          oracle::ExposureAll(dataset, policy);
      for (size_t i = 0; i < expected.size(); ++i) {
        const ExposureResult& row = report.per_canary[i];
        Require(outcome,
                row.rank == expected[i].rank &&
                    row.exposure == expected[i].exposure &&
                    row.empirical_fpr == expected[i].empirical_fpr,
                absl::StrCat("exposure mismatch in instance ", instance));
      }
    }
    const std::vector<MIResult> roc = Roc(dataset);
    const std::vector<oracle::RocPoint> expected = oracle::Roc(dataset);
    Require(outcome, roc.size() == expected.size(),
            absl::StrCat("roc length mismatch in instance ", instance));
    for (size_t i = 0; outcome.pass && i < roc.size(); ++i) {
      const double m = static_cast<double>(dataset.m());
      const double n = static_cast<double>(dataset.n());
      Require(outcome,
              roc[i].threshold == expected[i].threshold &&
                  roc[i].canary_hits == expected[i].canary_hits &&
                  roc[i].reference_hits == expected[i].reference_hits &&
                  roc[i].tpr == expected[i].canary_hits / m &&
                  roc[i].fpr == expected[i].reference_hits / n,
              absl::StrCat("roc mismatch in instance ", instance));
    }
  }
  if (outcome.pass) outcome.detail = "1000 instances, both tie policies";
  return outcome;
}

Outcome ClopperPearsonCorrectness() {
  Outcome outcome;
  double closed_gap = 0.0;
  for (int64_t trials : {1, 2, 5, 10, 20, 100, 1000, 10000}) {
    for (double alpha : {0.001, 0.025, 0.05, 0.1, 0.3}) {
      closed_gap = std::max(
          closed_gap,
          std::abs(*ClopperPearson(trials, trials, alpha, BoundSide::kLower) -
                   std::pow(alpha, 1.0 / trials)));
    }
  }
  Require(outcome, closed_gap <= 1e-9,
          absl::StrCat("closed form gap ", closed_gap));
  std::mt19937_64 rng(7);
  double grid_gap = 0.0;
  for (int i = 0; i < 200; ++i) {
    const int64_t trials = std::uniform_int_distribution<int64_t>(1, 200)(rng);
    const int64_t k = std::uniform_int_distribution<int64_t>(0, trials)(rng);
    const double alpha =
        std::uniform_real_distribution<double>(0.001, 0.2)(rng);
    const bool lower = i % 2 == 0;
    const double ours = *ClopperPearson(
        k, trials, alpha, lower ? BoundSide::kLower : BoundSide::kUpper);
    grid_gap = std::max(
        grid_gap,
        std::abs(ours - oracle::GridClopperPearson(k, trials, alpha, lower)));
  }
  Require(outcome, grid_gap <= 2e-6, absl::StrCat("grid gap ", grid_gap));
  if (outcome.pass) {
    outcome.detail = absl::StrCat("closed form gap ", closed_gap,
                                  ", grid gap ", grid_gap);
  }
  return outcome;
}

Outcome NullSoundness() {
  Outcome outcome;
  constexpr int kSeeds = 500;
  AuditConfig config;
  config.baseline_trials = 0;
  int positive = 0;
  for (int seed = 0; seed < kSeeds; ++seed) {
    const AuditDataset dataset = *Simulate({.mu = 0.0,
                                            .sigma = 1.0,
                                            .m = 1000,
                                            .n = 1000,
                                            .seed = uint64_t(seed)});
    const AuditResult result = *RunAudit(dataset, config);
    positive += result.bounds[0].raw.confident_lower_bound > 0.0;
  }
  const double rate = static_cast<double>(positive) / kSeeds;
  const double limit = 0.05 + 3.0 * std::sqrt(0.05 * 0.95 / kSeeds);
  Require(outcome, rate <= limit,
          absl::StrCat("positive rate ", rate, " > ", limit));
  if (outcome.pass) {
    outcome.detail = absl::StrCat(positive, "/", kSeeds,
                                  " seeds positive (limit ", limit, ")");
  }
  return outcome;
}

Outcome Power() {
  Outcome outcome;
  constexpr int kSeeds = 100;
  AuditConfig config;
  config.baseline_trials = 0;
  int detected = 0;
  for (int seed = 0; seed < kSeeds; ++seed) {
    const AuditDataset dataset = *Simulate({.mu = 3.0,
                                            .sigma = 1.0,
                                            .m = 10000,
                                            .n = 10000,
                                            .seed = uint64_t(seed)});
    const OperatingPointResult median = RunAudit(dataset, config)->bounds[0];
    detected += median.raw.point_estimate > 1.0 &&
                *median.exposure_epsilon > 1.0 &&
                median.raw.confident_lower_bound > 0.5;
  }
  Require(outcome, detected >= 95,
          absl::StrCat(detected, "/", kSeeds, " seeds detected"));
  if (outcome.pass) {
    outcome.detail = absl::StrCat(detected, "/", kSeeds, " seeds detected");
  }
  return outcome;
}

Outcome GroupPrivacy() {
  Outcome outcome;
  AuditConfig config;
  config.baseline_trials = 0;
  config.operating_points.push_back(OperatingPoint::FprTarget(0.01));
  config.operating_points.push_back(OperatingPoint::FprTarget(0.0001));
  int checked = 0;
  for (int64_t k : {1, 2, 3, 4, 7, 16, 100}) {
    const AuditDataset simulated = *Simulate(
        {.mu = 2.0, .sigma = 1.0, .m = 500, .n = 500, .seed = uint64_t(k)});
    std::vector<LossRecord> canaries = simulated.canaries();
    for (LossRecord& record : canaries) record.replications = k;
    const AuditDataset dataset =
        *AuditDataset::Create(std::move(canaries), simulated.references());
    for (const OperatingPointResult& entry : RunAudit(dataset, config)->bounds) {
      const double kd = static_cast<double>(k);
      Require(outcome,
              entry.raw.replications == k &&
                  entry.per_example.point_estimate ==
                      entry.raw.point_estimate / kd &&
                  entry.per_example.confident_lower_bound ==
                      entry.raw.confident_lower_bound / kd,
              absl::StrCat("mismatch at k = ", k));
      ++checked;
    }
  }
  if (outcome.pass) outcome.detail = absl::StrCat(checked, " bounds checked");
  return outcome;
}

Outcome Performance() {
  Outcome outcome;
  const std::filesystem::path path =
      std::filesystem::temp_directory_path() / "canary_audit_acceptance.csv";
  {
    const AuditDataset simulated = *Simulate(
        {.mu = 1.0, .sigma = 1.0, .m = 100000, .n = 100000, .seed = 1});
    FILE* file = std::fopen(path.c_str(), "wb");
    const std::string text = *SerializeDataset(simulated, DataFormat::kCsv);
    std::fwrite(text.data(), 1, text.size(), file);
    std::fclose(file);
  }
  const auto start = Clock::now();
  const AuditDataset dataset = *ReadDatasetFile(path.string(), DataFormat::kCsv);
  const ExposureReport report = *ComputeExposures(dataset);
  const std::vector<MIResult> roc = Roc(dataset);
  const MIResult median = *ThresholdAttack(dataset, MedianThreshold(dataset));
  const MIResult low_fpr = *TprAtFpr(roc, 0.001);
  const EpsilonBound first = *EpsilonConfident(dataset, median, 0.95);
  const EpsilonBound second = *EpsilonConfident(dataset, low_fpr, 0.95);
  const double seconds = SecondsSince(start);
  std::filesystem::remove(path);
  Require(outcome, report.per_canary.size() == 100000 && roc.size() > 2,
          "incomplete audit");
  Require(outcome, seconds < 5.0, absl::StrCat("took ", seconds, " s"));
  if (outcome.pass) {
    outcome.detail = absl::StrCat(seconds, " s (bounds ",
                                  first.confident_lower_bound, ", ",
                                  second.confident_lower_bound, ")");
  }
  return outcome;
}

}  // namespace
}  // namespace canary_audit

int main() {
  using canary_audit::Outcome;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria =
      {
          {"expected-exposure baseline",
           canary_audit::ExpectedExposureBaseline},
          {"median and 0.75-quantile baselines", canary_audit::MedianBaseline},
          {"exposure endpoints", canary_audit::ExposureEndpoints},
          {"median exposure identity", canary_audit::MedianIdentity},
          {"oracle equivalence", canary_audit::OracleEquivalence},
          {"Clopper-Pearson correctness",
           canary_audit::ClopperPearsonCorrectness},
          {"null soundness", canary_audit::NullSoundness},
          {"power", canary_audit::Power},
          {"group privacy", canary_audit::GroupPrivacy},
          {"performance", canary_audit::Performance},
      };
  int failures = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    const Outcome outcome = criteria[i].second();
    failures += !outcome.pass;
    std::printf("%s criterion %zu: %s: %s\n", outcome.pass ? "PASS" : "FAIL",
                i + 1, criteria[i].first, outcome.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
