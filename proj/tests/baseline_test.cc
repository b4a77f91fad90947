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

#include "canary_audit/baseline.h"

#include <cmath>
#include <numbers>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "oracles.h"

namespace canary_audit {
namespace {

using ::testing::DoubleNear;

TEST(ExpectedExposureExactTest, Examples) {
  EXPECT_THAT(*ExpectedExposureExact(1), DoubleNear(-0.5, 1e-12));
  EXPECT_THAT(*ExpectedExposureExact(3), DoubleNear(0.43872, 1e-5));
  EXPECT_THAT(*ExpectedExposureExact(1000000), DoubleNear(1.4427, 1e-2));
  EXPECT_FALSE(ExpectedExposureExact(0).ok());
  EXPECT_FALSE(ExpectedExposureExact(-3).ok());
}

TEST(ExpectedExposureExactTest, MatchesSummationOracle) {
  for (int64_t n : {1, 2, 3, 7, 10, 100, 1000, 12345, 100000}) {
    EXPECT_NEAR(*ExpectedExposureExact(n),
                oracle::ExpectedExposureBySummation(n), 1e-9)
        << n;
  }
}

TEST(ExpectedExposureExactTest, IncreasingAndConvergent) {
  double previous = *ExpectedExposureExact(1);
  for (int64_t n = 2; n <= 10000; ++n) {
    const double current = *ExpectedExposureExact(n);
    ASSERT_GT(current, previous) << n;
    previous = current;
  }
  EXPECT_LT(std::abs(*ExpectedExposureExact(1000000) -
                     ExpectedExposureAsymptote()),
            0.01);
  EXPECT_GT(std::abs(*ExpectedExposureExact(10) - ExpectedExposureAsymptote()),
            0.1);
}

TEST(ExpectedExposureAsymptoteTest, IsOneOverLnTwo) {
  EXPECT_THAT(ExpectedExposureAsymptote(), DoubleNear(1.442695, 1e-6));
}

TEST(BaselineQuantileExposureTest, Examples) {
  EXPECT_EQ(*BaselineQuantileExposure(0.5), 1.0);
  EXPECT_EQ(*BaselineQuantileExposure(0.75), 2.0);
  EXPECT_EQ(*BaselineQuantileExposure(0.875), 3.0);
  for (double q : {0.0, 1.0, -1.0, 2.0, std::nan("")}) {
    EXPECT_FALSE(BaselineQuantileExposure(q).ok()) << q;
  }
}

TEST(BaselineQuantileExposureTest, StrictlyIncreasing) {
  double previous = *BaselineQuantileExposure(0.001);
  for (int k = 2; k < 1000; ++k) {
    const double current = *BaselineQuantileExposure(k / 1000.0);
    ASSERT_GT(current, previous);
    previous = current;
  }
}

TEST(ExposureStatisticTest, ParseAndName) {
  EXPECT_EQ(*ParseExposureStatistic("mean"), ExposureStatistic::Mean());
  EXPECT_EQ(*ParseExposureStatistic("median"),
            ExposureStatistic::Quantile(0.5));
  EXPECT_EQ(*ParseExposureStatistic("quantile=0.75"),
            ExposureStatistic::Quantile(0.75));
  EXPECT_EQ(ExposureStatisticName(ExposureStatistic::Quantile(0.75)),
            "quantile=0.75");
  for (const char* bad : {"quantile=1", "quantile=", "quantile=abc", "max"}) {
    EXPECT_FALSE(ParseExposureStatistic(bad).ok()) << bad;
  }
}

TEST(MonteCarloBaselineTest, MedianNearOne) {
  absl::StatusOr<BaselineSummary> summary = MonteCarloBaseline(
      10001, 10000, ExposureStatistic::Quantile(0.5), 200, 1);
  ASSERT_TRUE(summary.ok());
  EXPECT_THAT(summary->mc_mean, DoubleNear(1.0, 0.05));
  EXPECT_EQ(summary->asymptotic_value, 1.0);
  EXPECT_FALSE(summary->exact_value.has_value());
  EXPECT_EQ(summary->trials, 200);
  EXPECT_EQ(summary->mc_quantiles.size(), 3u);
  EXPECT_LE(summary->mc_quantiles.at(0.05), summary->mc_quantiles.at(0.95));
}

TEST(MonteCarloBaselineTest, SingleCanarySingleReferenceMean) {
  constexpr int64_t kTrials = 20000;
  absl::StatusOr<BaselineSummary> summary =
      MonteCarloBaseline(1, 1, ExposureStatistic::Mean(), kTrials, 9);
  ASSERT_TRUE(summary.ok());
  ASSERT_TRUE(summary->exact_value.has_value());
  EXPECT_THAT(*summary->exact_value, DoubleNear(-0.5, 1e-12));
  // Exposures are 0 or -1 with equal probability: std 0.5.
  EXPECT_THAT(summary->mc_mean,
              DoubleNear(-0.5, 5 * 0.5 / std::sqrt(double{kTrials})));
  EXPECT_THAT(summary->mc_std, DoubleNear(0.5, 0.01));
}

TEST(MonteCarloBaselineTest, DeterministicGivenSeed) {
  const auto run = [](uint64_t seed) {
    return *MonteCarloBaseline(50, 200, ExposureStatistic::Quantile(0.75), 50,
                               seed);
  };
  EXPECT_EQ(run(42), run(42));
  EXPECT_NE(run(42).mc_mean, run(43).mc_mean);
}

TEST(MonteCarloBaselineTest, SharedTrialsMatchSingleRuns) {
  const std::vector<ExposureStatistic> statistics = {
      ExposureStatistic::Mean(), ExposureStatistic::Quantile(0.5),
      ExposureStatistic::Quantile(0.9)};
  absl::StatusOr<std::vector<BaselineSummary>> all =
      MonteCarloBaselines(33, 64, statistics, 40, 5);
  ASSERT_TRUE(all.ok());
  for (size_t i = 0; i < statistics.size(); ++i) {
    EXPECT_EQ((*all)[i], *MonteCarloBaseline(33, 64, statistics[i], 40, 5));
  }
}

TEST(MonteCarloBaselineTest, MeanConsistentWithExactValue) {
  constexpr int kSeeds = 100;
  constexpr int64_t kTrials = 200;
  int within = 0;
  for (int seed = 0; seed < kSeeds; ++seed) {
    absl::StatusOr<BaselineSummary> summary =
        MonteCarloBaseline(20, 100, ExposureStatistic::Mean(), kTrials, seed);
    ASSERT_TRUE(summary.ok());
    within += std::abs(summary->mc_mean - *summary->exact_value) <
              5 * summary->mc_std / std::sqrt(double{kTrials});
  }
  EXPECT_GE(within, 99);
}

TEST(MonteCarloBaselineTest, InvalidParameters) {
  EXPECT_FALSE(MonteCarloBaseline(0, 10, ExposureStatistic::Mean(), 1, 0).ok());
  EXPECT_FALSE(MonteCarloBaseline(10, 0, ExposureStatistic::Mean(), 1, 0).ok());
  EXPECT_FALSE(MonteCarloBaseline(10, 10, ExposureStatistic::Mean(), 0, 0).ok());
  EXPECT_FALSE(
      MonteCarloBaseline(10, 10, ExposureStatistic::Quantile(1.0), 1, 0).ok());
}

}  // namespace
}  // namespace canary_audit
